#pragma once

#include <vector>

#include "pitt/nn/tensor.hpp"
#include "pitt/util/random.hpp"

namespace pitt::nn {

inline constexpr double kNormEps = 1e-5;

Var add(const Var& a, const Var& b);
Var scale(const Var& a, double c);

/// x [..., in] * W [in, out] (+ b [out]).
Var linear(const Var& x, const Var& w, const Var& b = {});

/// Exact (erf) GELU.
Var gelu(const Var& x);

/// [B, S, C1] and [B, C2] -> [B, S, C1 + C2], the second input repeated over S.
Var concat_broadcast(const Var& x, const Var& t);

/// [B, S, C1] and [B, S, C2] -> [B, S, C1 + C2].
Var concat_last(const Var& a, const Var& b);

/// Standardizes each row of the last axis within `groups` equal blocks, without affine
/// terms: (x - mean) / sqrt(var + eps). A constant block maps to zeros.
Var group_norm(const Var& x, int groups, double eps = kNormEps);

/// x [B, S, h], M [B, h, h] -> x M^T per batch entry.
Var bmm_nt(const Var& x, const Var& m);

/// Q, K [B, V, h] with per-row multiplicities c [B, V]:
/// M[b] = sum_v c[b, v] Q[b, v]^T K[b, v] / (h / groups), kept only on the diagonal blocks.
Var weighted_outer(const Var& q, const Var& k, const Tensor& counts, int groups);

/// Multi-head softmax attention over a sequence in which row v of q/k/v [V, h] occurs
/// counts[b, v] times. Returns the attention output for every distinct row: [B, V, h].
/// This equals ordinary self-attention over the expanded sequence, row for row.
Var count_attention(const Var& q, const Var& k, const Var& v, const Tensor& counts, int heads);

/// Inverted dropout; identity when not training or p == 0.
Var dropout(const Var& x, double p, Rng& rng, bool training);

/// Mean squared error against a fixed target, as a scalar.
Var mse_loss(const Var& pred, const Tensor& target);

/// Linear attention Q (K~^T V~) / n on [n, d] inputs (V may have its own width), with K~ and V~
/// instance-normalized over the sequence axis. Forward only.
Tensor linear_attention(const Tensor& q, const Tensor& k, const Tensor& v, double eps = kNormEps);

}  // namespace pitt::nn
