#pragma once

#include <cstdint>
#include <vector>

#include "pitt/eqtok/equation_spec.hpp"
#include "pitt/nn/models.hpp"

namespace pitt::eval {

struct AttentionDiffMap {
  eqtok::EquationSpec base, modified;
  int head = 0;
  int length = 0;             // padded token length P
  std::vector<double> diff;   // |W_modified - W_base| over token positions [P, P]

  double max() const;
};

/// Post-softmax self-attention weights between token positions [P, P] in eval mode (no dropout).
/// Row i holds the weights with which position i attends to every position.
std::vector<double> position_attention(const nn::Pitt& model, const std::vector<std::int32_t>& ids, int head = 0);

/// Both specs are tokenized to the model's padded length; throws std::invalid_argument
/// when their sequences differ in length.
AttentionDiffMap probe_attention(const nn::Pitt& model, const eqtok::EquationSpec& base,
                                 const eqtok::EquationSpec& modified, int head = 0);

/// Entries whose change is at least `rel` times the largest change. All false for a zero map.
std::vector<bool> support(const AttentionDiffMap& m, double rel = 0.1);

/// |A and B| / |A or B| of two supports; 1 when both are empty.
double support_overlap(const std::vector<bool>& a, const std::vector<bool>& b);

}  // namespace pitt::eval
