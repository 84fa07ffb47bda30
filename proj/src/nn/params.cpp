#include "pitt/nn/params.hpp"

#include <cmath>
#include <stdexcept>

#include "pitt/nn/ops.hpp"

namespace pitt::nn {

Var ParamStore::add(const std::string& name, Tensor init) {
  for (const auto& [n, v] : items_)
    if (n == name) throw std::logic_error("duplicate parameter name " + name);
  items_.emplace_back(name, parameter(std::move(init)));
  return items_.back().second;
}

Var& ParamStore::get(const std::string& name) {
  for (auto& [n, v] : items_)
    if (n == name) return v;
  throw std::out_of_range("no parameter named " + name);
}

const Var& ParamStore::get(const std::string& name) const {
  for (const auto& [n, v] : items_)
    if (n == name) return v;
  throw std::out_of_range("no parameter named " + name);
}

void ParamStore::zero_grad() {
  for (auto& [n, v] : items_) v.zero_grad();
}

std::int64_t ParamStore::scalar_count() const {
  std::int64_t total = 0;
  for (const auto& [n, v] : items_) total += v.value().size();
  return total;
}

Tensor uniform_init(Shape shape, std::int64_t fan_in, Rng& rng, double gain) {
  Tensor t(std::move(shape));
  const double bound = gain / std::sqrt(static_cast<double>(fan_in));
  for (auto& x : t.data) x = rng.uniform(-bound, bound);
  return t;
}

Var Dense::operator()(const Var& x) const { return linear(x, w, b); }

Dense make_dense(ParamStore& ps, const std::string& name, std::int64_t in, std::int64_t out, Rng& rng, bool bias) {
  Dense d;
  d.w = ps.add(name + ".w", uniform_init({in, out}, in, rng));
  if (bias) d.b = ps.add(name + ".b", uniform_init({out}, in, rng));
  return d;
}

Var Mlp::operator()(const Var& x) const { return second(gelu(first(x))); }

Mlp make_mlp(ParamStore& ps, const std::string& name, std::int64_t in, std::int64_t hidden, std::int64_t out,
             Rng& rng) {
  return {make_dense(ps, name + ".0", in, hidden, rng), make_dense(ps, name + ".1", hidden, out, rng)};
}

}  // namespace pitt::nn
