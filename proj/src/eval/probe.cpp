#include "pitt/eval/probe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pitt/eqtok/tokenizer.hpp"

namespace pitt::eval {

double AttentionDiffMap::max() const {
  double m = 0.0;
  for (double v : diff) m = std::max(m, v);
  return m;
}

std::vector<double> position_attention(const nn::Pitt& model, const std::vector<std::int32_t>& ids, int head) {
  const int V = model.config().vocab;
  const nn::Tensor counts = nn::token_counts(ids, V);
  const nn::Tensor w = model.attention_weights(counts, head);  // [1, V, V] over distinct ids
  // A distinct id n stands for counts[n] identical positions that share its weight equally.
  const auto P = ids.size();
  std::vector<double> out(P * P);
  for (std::size_t i = 0; i < P; ++i)
    for (std::size_t j = 0; j < P; ++j) {
      const auto m = static_cast<std::size_t>(ids[i]), n = static_cast<std::size_t>(ids[j]);
      out[i * P + j] = w.data[m * static_cast<std::size_t>(V) + n] / counts.data[n];
    }
  return out;
}

AttentionDiffMap probe_attention(const nn::Pitt& model, const eqtok::EquationSpec& base,
                                 const eqtok::EquationSpec& modified, int head) {
  const int pad = model.config().pad_length;
  const auto a = eqtok::tokenize_equation(base, pad);
  const auto b = eqtok::tokenize_equation(modified, pad);
  if (a.ids.size() != b.ids.size())
    throw std::invalid_argument("probe_attention: token lengths differ (" + std::to_string(a.ids.size()) + " vs " +
                                std::to_string(b.ids.size()) + ")");
  AttentionDiffMap out;
  out.base = base;
  out.modified = modified;
  out.head = head;
  out.length = static_cast<int>(a.ids.size());
  const auto wa = position_attention(model, a.ids, head);
  const auto wb = position_attention(model, b.ids, head);
  out.diff.resize(wa.size());
  for (std::size_t i = 0; i < wa.size(); ++i) out.diff[i] = std::abs(wb[i] - wa[i]);
  return out;
}

std::vector<bool> support(const AttentionDiffMap& m, double rel) {
  const double cut = rel * m.max();
  std::vector<bool> s(m.diff.size(), false);
  if (cut <= 0.0) return s;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = m.diff[i] >= cut;
  return s;
}

double support_overlap(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("support_overlap: map sizes differ");
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    both += a[i] && b[i];
    either += a[i] || b[i];
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace pitt::eval
