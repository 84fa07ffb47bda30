#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pitt/nn/tensor.hpp"
#include "pitt/util/random.hpp"

namespace pitt::nn {

/// Ordered, named parameters of a model.
class ParamStore {
 public:
  Var add(const std::string& name, Tensor init);
  const std::vector<std::pair<std::string, Var>>& items() const { return items_; }
  Var& get(const std::string& name);
  const Var& get(const std::string& name) const;
  void zero_grad();
  std::int64_t scalar_count() const;

 private:
  std::vector<std::pair<std::string, Var>> items_;
};

/// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) entries, the usual dense-layer default.
Tensor uniform_init(Shape shape, std::int64_t fan_in, Rng& rng, double gain = 1.0);

struct Dense {
  Var w, b;
  Var operator()(const Var& x) const;
};
Dense make_dense(ParamStore& ps, const std::string& name, std::int64_t in, std::int64_t out, Rng& rng,
                 bool bias = true);

/// in -> hidden -> out with GELU between.
struct Mlp {
  Dense first, second;
  Var operator()(const Var& x) const;
};
Mlp make_mlp(ParamStore& ps, const std::string& name, std::int64_t in, std::int64_t hidden, std::int64_t out,
             Rng& rng);

}  // namespace pitt::nn
