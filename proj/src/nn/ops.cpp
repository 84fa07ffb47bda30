#include "pitt/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pitt::nn {

namespace {

// Plain row-major kernels. Every output element is accumulated in a fixed order, so results do
// not depend on where the buffers happen to sit in memory.

// C[m, n] += A[m, k] B[k, n]
void gemm_nn(std::int64_t m, std::int64_t k, std::int64_t n, const double* A, std::int64_t lda, const double* B,
             std::int64_t ldb, double* C, std::int64_t ldc) {
  for (std::int64_t i = 0; i < m; ++i) {
    double* c = C + i * ldc;
    const double* a = A + i * lda;
    for (std::int64_t p = 0; p < k; ++p) {
      const double s = a[p];
      const double* b = B + p * ldb;
      for (std::int64_t j = 0; j < n; ++j) c[j] += s * b[j];
    }
  }
}

// C[m, n] += A[k, m]^T B[k, n]
void gemm_tn(std::int64_t m, std::int64_t k, std::int64_t n, const double* A, std::int64_t lda, const double* B,
             std::int64_t ldb, double* C, std::int64_t ldc) {
  for (std::int64_t p = 0; p < k; ++p) {
    const double* a = A + p * lda;
    const double* b = B + p * ldb;
    for (std::int64_t i = 0; i < m; ++i) {
      const double s = a[i];
      double* c = C + i * ldc;
      for (std::int64_t j = 0; j < n; ++j) c[j] += s * b[j];
    }
  }
}

std::vector<double> transposed(const double* A, std::int64_t rows, std::int64_t cols, std::int64_t lda) {
  std::vector<double> t(static_cast<std::size_t>(rows * cols));
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c) t[static_cast<std::size_t>(c * rows + r)] = A[r * lda + c];
  return t;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

Node& parent(Node& out, std::size_t i) { return *out.parents[i]; }

}  // namespace

Var add(const Var& a, const Var& b) {
  require(a.shape() == b.shape(), "add: shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
  Tensor y(a.shape());
  const auto n = y.data.size();
  for (std::size_t i = 0; i < n; ++i) y.data[i] = a.value().data[i] + b.value().data[i];
  return make_result(std::move(y), {a, b}, [](Node& out) {
    for (std::size_t p = 0; p < 2; ++p) {
      Node& in = parent(out, p);
      if (!in.requires_grad) continue;
      auto& g = in.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i];
    }
  });
}

Var scale(const Var& a, double c) {
  Tensor y(a.shape());
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] = c * a.value().data[i];
  return make_result(std::move(y), {a}, [c](Node& out) {
    auto& g = parent(out, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * out.grad[i];
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  require(w.value().rank() == 2, "linear: weight must be 2D");
  const auto in = w.dim(0), outd = w.dim(1);
  require(x.value().rank() >= 1 && x.dim(-1) == in,
          "linear: input " + shape_str(x.shape()) + " vs weight " + shape_str(w.shape()));
  if (b.defined()) require(b.value().size() == outd, "linear: bias size");
  const auto rows = x.value().size() / in;
  Shape ys = x.shape();
  ys.back() = outd;
  Tensor y(ys);
  if (b.defined())
    for (std::int64_t r = 0; r < rows; ++r) std::copy_n(b.value().ptr(), outd, y.ptr() + r * outd);
  gemm_nn(rows, in, outd, x.value().ptr(), in, w.value().ptr(), outd, y.ptr(), outd);
  std::vector<Var> parents{x, w};
  if (b.defined()) parents.push_back(b);
  return make_result(std::move(y), parents, [rows, in, outd](Node& out) {
    const double* G = out.grad.data();
    Node& nx = parent(out, 0);
    Node& nw = parent(out, 1);
    if (nx.requires_grad) {
      const auto wt = transposed(nw.value.ptr(), in, outd, outd);
      gemm_nn(rows, outd, in, G, outd, wt.data(), in, nx.ensure_grad().data(), in);
    }
    if (nw.requires_grad) gemm_tn(in, rows, outd, nx.value.ptr(), in, G, outd, nw.ensure_grad().data(), outd);
    if (out.parents.size() > 2 && parent(out, 2).requires_grad) {
      double* gb = parent(out, 2).ensure_grad().data();
      for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t j = 0; j < outd; ++j) gb[j] += G[r * outd + j];
    }
  });
}

Var gelu(const Var& x) {
  Tensor y(x.shape());
  const auto& xv = x.value().data;
  const bool keep = grad_enabled() && x.requires_grad();
  // dy/dx is formed alongside y so the backward pass is a single multiply
  auto slope = keep ? std::make_shared<std::vector<double>>(xv.size()) : nullptr;
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv[i];
    const double cdf = 0.5 * std::erfc(-v * std::numbers::sqrt2 / 2.0);
    y.data[i] = v * cdf;
    if (keep) (*slope)[i] = cdf + v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
  }
  return make_result(std::move(y), {x}, [slope](Node& out) {
    auto& g = parent(out, 0).ensure_grad();
    const auto& d = *slope;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i] * d[i];
  });
}

Var concat_broadcast(const Var& x, const Var& t) {
  require(x.value().rank() == 3 && t.value().rank() == 2 && x.dim(0) == t.dim(0),
          "concat_broadcast: shapes " + shape_str(x.shape()) + " and " + shape_str(t.shape()));
  const auto B = x.dim(0), S = x.dim(1), C1 = x.dim(2), C2 = t.dim(1), C = C1 + C2;
  Tensor y({B, S, C});
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t s = 0; s < S; ++s) {
      double* row = y.ptr() + (b * S + s) * C;
      std::copy_n(x.value().ptr() + (b * S + s) * C1, C1, row);
      std::copy_n(t.value().ptr() + b * C2, C2, row + C1);
    }
  return make_result(std::move(y), {x, t}, [B, S, C1, C2, C](Node& out) {
    Node& nx = parent(out, 0);
    Node& nt = parent(out, 1);
    double* gx = nx.requires_grad ? nx.ensure_grad().data() : nullptr;
    double* gt = nt.requires_grad ? nt.ensure_grad().data() : nullptr;
    for (std::int64_t b = 0; b < B; ++b)
      for (std::int64_t s = 0; s < S; ++s) {
        const double* row = out.grad.data() + (b * S + s) * C;
        if (gx)
          for (std::int64_t c = 0; c < C1; ++c) gx[(b * S + s) * C1 + c] += row[c];
        if (gt)
          for (std::int64_t c = 0; c < C2; ++c) gt[b * C2 + c] += row[C1 + c];
      }
  });
}

Var concat_last(const Var& a, const Var& b) {
  require(a.value().rank() == 3 && b.value().rank() == 3 && a.dim(0) == b.dim(0) && a.dim(1) == b.dim(1),
          "concat_last: shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
  const auto rows = a.dim(0) * a.dim(1), C1 = a.dim(2), C2 = b.dim(2), C = C1 + C2;
  Tensor y({a.dim(0), a.dim(1), C});
  for (std::int64_t r = 0; r < rows; ++r) {
    std::copy_n(a.value().ptr() + r * C1, C1, y.ptr() + r * C);
    std::copy_n(b.value().ptr() + r * C2, C2, y.ptr() + r * C + C1);
  }
  return make_result(std::move(y), {a, b}, [rows, C1, C2, C](Node& out) {
    Node& na = parent(out, 0);
    Node& nb = parent(out, 1);
    for (std::int64_t r = 0; r < rows; ++r) {
      const double* row = out.grad.data() + r * C;
      if (na.requires_grad)
        for (std::int64_t c = 0; c < C1; ++c) na.ensure_grad()[r * C1 + c] += row[c];
      if (nb.requires_grad)
        for (std::int64_t c = 0; c < C2; ++c) nb.ensure_grad()[r * C2 + c] += row[C1 + c];
    }
  });
}

Var group_norm(const Var& x, int groups, double eps) {
  const auto C = x.dim(-1);
  require(groups >= 1 && C % groups == 0, "group_norm: width " + std::to_string(C) + " not divisible into groups");
  const auto m = C / groups;
  const auto blocks = x.value().size() / m;
  Tensor y(x.shape());
  std::vector<double> inv_std(static_cast<std::size_t>(blocks));
  for (std::int64_t k = 0; k < blocks; ++k) {
    const double* xi = x.value().ptr() + k * m;
    double mean = 0.0;
    for (std::int64_t i = 0; i < m; ++i) mean += xi[i];
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::int64_t i = 0; i < m; ++i) var += (xi[i] - mean) * (xi[i] - mean);
    var /= static_cast<double>(m);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<std::size_t>(k)] = is;
    for (std::int64_t i = 0; i < m; ++i) y.data[static_cast<std::size_t>(k * m + i)] = (xi[i] - mean) * is;
  }
  return make_result(std::move(y), {x}, [m, blocks, inv_std = std::move(inv_std)](Node& out) {
    auto& g = parent(out, 0).ensure_grad();
    for (std::int64_t k = 0; k < blocks; ++k) {
      const double* gy = out.grad.data() + k * m;
      const double* yh = out.value.ptr() + k * m;
      double mg = 0.0, mgy = 0.0;
      for (std::int64_t i = 0; i < m; ++i) {
        mg += gy[i];
        mgy += gy[i] * yh[i];
      }
      mg /= static_cast<double>(m);
      mgy /= static_cast<double>(m);
      const double is = inv_std[static_cast<std::size_t>(k)];
      for (std::int64_t i = 0; i < m; ++i) g[static_cast<std::size_t>(k * m + i)] += is * (gy[i] - mg - yh[i] * mgy);
    }
  });
}

Var bmm_nt(const Var& x, const Var& m) {
  require(x.value().rank() == 3 && m.value().rank() == 3 && x.dim(0) == m.dim(0) && m.dim(1) == m.dim(2) &&
              x.dim(2) == m.dim(2),
          "bmm_nt: shapes " + shape_str(x.shape()) + " and " + shape_str(m.shape()));
  const auto B = x.dim(0), S = x.dim(1), h = x.dim(2);
  Tensor y(x.shape());
  for (std::int64_t b = 0; b < B; ++b) {
    const auto mt = transposed(m.value().ptr() + b * h * h, h, h, h);
    gemm_nn(S, h, h, x.value().ptr() + b * S * h, h, mt.data(), h, y.ptr() + b * S * h, h);
  }
  return make_result(std::move(y), {x, m}, [B, S, h](Node& out) {
    Node& nx = parent(out, 0);
    Node& nm = parent(out, 1);
    for (std::int64_t b = 0; b < B; ++b) {
      const double* G = out.grad.data() + b * S * h;
      if (nx.requires_grad)
        gemm_nn(S, h, h, G, h, nm.value.ptr() + b * h * h, h, nx.ensure_grad().data() + b * S * h, h);
      if (nm.requires_grad)
        gemm_tn(h, S, h, G, h, nx.value.ptr() + b * S * h, h, nm.ensure_grad().data() + b * h * h, h);
    }
  });
}

Var weighted_outer(const Var& q, const Var& k, const Tensor& counts, int groups) {
  require(q.value().rank() == 3 && q.shape() == k.shape(), "weighted_outer: q and k must match");
  const auto B = q.dim(0), V = q.dim(1), h = q.dim(2);
  require(counts.shape == Shape{B, V}, "weighted_outer: counts must be [B, V]");
  require(groups >= 1 && h % groups == 0, "weighted_outer: width not divisible by groups");
  const auto blk = h / groups;
  const double inv_n = 1.0 / static_cast<double>(blk);
  Tensor y({B, h, h});
  // only the diagonal blocks are ever formed
  for (std::int64_t b = 0; b < B; ++b) {
    double* M = y.ptr() + b * h * h;
    for (std::int64_t v = 0; v < V; ++v) {
      const double cv = counts.ptr()[b * V + v] * inv_n;
      const double* qr = q.value().ptr() + (b * V + v) * h;
      const double* kr = k.value().ptr() + (b * V + v) * h;
      for (std::int64_t r = 0; r < h; ++r) {
        const double a = cv * qr[r];
        const auto s0 = (r / blk) * blk;
        for (std::int64_t s = s0; s < s0 + blk; ++s) M[r * h + s] += a * kr[s];
      }
    }
  }
  return make_result(std::move(y), {q, k}, [B, V, h, blk, inv_n, counts](Node& out) {
    Node& nq = parent(out, 0);
    Node& nk = parent(out, 1);
    double* gq = nq.requires_grad ? nq.ensure_grad().data() : nullptr;
    double* gk = nk.requires_grad ? nk.ensure_grad().data() : nullptr;
    for (std::int64_t b = 0; b < B; ++b) {
      const double* G = out.grad.data() + b * h * h;
      for (std::int64_t v = 0; v < V; ++v) {
        const double cv = counts.ptr()[b * V + v] * inv_n;
        const auto off = (b * V + v) * h;
        const double* qr = nq.value.ptr() + off;
        const double* kr = nk.value.ptr() + off;
        for (std::int64_t r = 0; r < h; ++r) {
          const auto s0 = (r / blk) * blk;
          if (gq) {
            double acc = 0.0;
            for (std::int64_t s = s0; s < s0 + blk; ++s) acc += kr[s] * G[r * h + s];
            gq[off + r] += cv * acc;
          }
          if (gk) {
            const double a = cv * qr[r];
            for (std::int64_t s = s0; s < s0 + blk; ++s) gk[off + s] += a * G[r * h + s];
          }
        }
      }
    }
  });
}

Var count_attention(const Var& q, const Var& k, const Var& v, const Tensor& counts, int heads) {
  require(q.value().rank() == 2 && q.shape() == k.shape() && q.shape() == v.shape(),
          "count_attention: q, k, v must share a [V, h] shape");
  const auto V = q.dim(0), h = q.dim(1);
  require(counts.rank() == 2 && counts.dim(1) == V, "count_attention: counts must be [B, V]");
  require(heads >= 1 && h % heads == 0, "count_attention: width not divisible by heads");
  const auto B = counts.dim(0), d = h / heads;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  const double* qv = q.value().ptr();
  const double* kv = k.value().ptr();
  const double* vv = v.value().ptr();

  // Scores are independent of the sample; only the multiplicities differ.
  std::vector<double> scores(static_cast<std::size_t>(heads * V * V));
  for (int g = 0; g < heads; ++g)
    for (std::int64_t m = 0; m < V; ++m)
      for (std::int64_t n = 0; n < V; ++n) {
        double acc = 0.0;
        for (std::int64_t t = g * d; t < (g + 1) * d; ++t) acc += qv[m * h + t] * kv[n * h + t];
        scores[static_cast<std::size_t>((g * V + m) * V + n)] = acc * inv_sqrt_d;
      }
  // attn holds one [V, V] weight matrix per (sample, head)
  auto attn = std::make_shared<std::vector<double>>(static_cast<std::size_t>(B * heads * V * V));
  Tensor y({B, V, h});
  for (std::int64_t b = 0; b < B; ++b) {
    const double* c = counts.ptr() + b * V;
    double total = 0.0;
    for (std::int64_t n = 0; n < V; ++n) {
      require(c[n] >= 0.0, "count_attention: negative count");
      total += c[n];
    }
    require(total > 0.0, "count_attention: empty sequence");
    for (int g = 0; g < heads; ++g) {
      const double* S = scores.data() + g * V * V;
      double* A = attn->data() + (b * heads + g) * V * V;
      for (std::int64_t m = 0; m < V; ++m) {
        double mx = -INFINITY;
        for (std::int64_t n = 0; n < V; ++n)
          if (c[n] > 0.0) mx = std::max(mx, S[m * V + n]);
        double z = 0.0;
        for (std::int64_t n = 0; n < V; ++n) {
          const double e = c[n] > 0.0 ? c[n] * std::exp(S[m * V + n] - mx) : 0.0;
          A[m * V + n] = e;
          z += e;
        }
        for (std::int64_t n = 0; n < V; ++n) A[m * V + n] /= z;
      }
      gemm_nn(V, V, d, A, V, vv + g * d, h, y.ptr() + b * V * h + g * d, h);
    }
  }
  return make_result(std::move(y), {q, k, v}, [B, V, h, d, heads, inv_sqrt_d, attn](Node& out) {
    Node& nq = parent(out, 0);
    Node& nk = parent(out, 1);
    Node& nv = parent(out, 2);
    std::vector<double> dq(static_cast<std::size_t>(V * h)), dk(dq.size()), dv(dq.size());
    std::vector<double> dS(static_cast<std::size_t>(V * V));
    const double* qv = nq.value.ptr();
    const double* kv = nk.value.ptr();
    const double* vv = nv.value.ptr();
    for (std::int64_t b = 0; b < B; ++b) {
      const double* G = out.grad.data() + b * V * h;
      for (int g = 0; g < heads; ++g) {
        const double* A = attn->data() + (b * heads + g) * V * V;
        const auto c0 = g * d;
        gemm_tn(V, V, d, A, V, G + c0, h, dv.data() + c0, h);
        // softmax backward, row by row
        for (std::int64_t m = 0; m < V; ++m) {
          double rowdot = 0.0;
          for (std::int64_t n = 0; n < V; ++n) {
            double da = 0.0;
            for (std::int64_t t = c0; t < c0 + d; ++t) da += G[m * h + t] * vv[n * h + t];
            dS[static_cast<std::size_t>(m * V + n)] = da;
            rowdot += A[m * V + n] * da;
          }
          for (std::int64_t n = 0; n < V; ++n) {
            auto& s = dS[static_cast<std::size_t>(m * V + n)];
            s = A[m * V + n] * (s - rowdot) * inv_sqrt_d;
          }
        }
        gemm_nn(V, V, d, dS.data(), V, kv + c0, h, dq.data() + c0, h);
        gemm_tn(V, V, d, dS.data(), V, qv + c0, h, dk.data() + c0, h);
      }
    }
    auto acc = [](Node& n, const std::vector<double>& src) {
      if (!n.requires_grad) return;
      auto& g = n.ensure_grad();
      for (std::size_t i = 0; i < src.size(); ++i) g[i] += src[i];
    };
    acc(nq, dq);
    acc(nk, dk);
    acc(nv, dv);
  });
}

Var dropout(const Var& x, double p, Rng& rng, bool training) {
  require(p >= 0.0 && p < 1.0, "dropout: rate must be in [0, 1)");
  if (!training || p == 0.0) return x;
  auto mask = std::make_shared<std::vector<double>>(x.value().data.size());
  const double keep = 1.0 / (1.0 - p);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < mask->size(); ++i) {
    (*mask)[i] = rng.uniform() < p ? 0.0 : keep;
    y.data[i] = x.value().data[i] * (*mask)[i];
  }
  return make_result(std::move(y), {x}, [mask](Node& out) {
    auto& g = parent(out, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i] * (*mask)[i];
  });
}

Var mse_loss(const Var& pred, const Tensor& target) {
  require(pred.shape() == target.shape,
          "mse_loss: prediction " + shape_str(pred.shape()) + " vs target " + shape_str(target.shape));
  const auto n = pred.value().data.size();
  require(n > 0, "mse_loss: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = pred.value().data[i] - target.data[i];
    s += e * e;
  }
  Tensor y({1}, {s / static_cast<double>(n)});
  return make_result(std::move(y), {pred}, [target, n](Node& out) {
    Node& np = parent(out, 0);
    auto& g = np.ensure_grad();
    const double c = 2.0 * out.grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) g[i] += c * (np.value.data[i] - target.data[i]);
  });
}

Tensor linear_attention(const Tensor& q, const Tensor& k, const Tensor& v, double eps) {
  require(q.rank() == 2 && k.rank() == 2 && v.rank() == 2, "linear_attention: inputs must be [n, d]");
  const auto n = q.dim(0), d = q.dim(1), dv = v.dim(1);
  require(n > 0, "linear_attention: empty sequence");
  require(k.dim(0) == n && v.dim(0) == n, "linear_attention: sequence lengths differ");
  require(k.dim(1) == d, "linear_attention: query and key widths differ");
  auto norm_cols = [n, eps](const Tensor& t) {
    const auto w = t.dim(1);
    std::vector<double> m(t.data);
    for (std::int64_t c = 0; c < w; ++c) {
      double mean = 0.0, var = 0.0;
      for (std::int64_t r = 0; r < n; ++r) mean += m[r * w + c];
      mean /= static_cast<double>(n);
      for (std::int64_t r = 0; r < n; ++r) var += (m[r * w + c] - mean) * (m[r * w + c] - mean);
      var /= static_cast<double>(n);
      const double is = 1.0 / std::sqrt(var + eps);
      for (std::int64_t r = 0; r < n; ++r) m[r * w + c] = (m[r * w + c] - mean) * is;
    }
    return m;
  };
  const auto kt = norm_cols(k), vt = norm_cols(v);
  std::vector<double> kv(static_cast<std::size_t>(d * dv));
  gemm_tn(d, n, dv, kt.data(), d, vt.data(), dv, kv.data(), dv);
  for (auto& e : kv) e /= static_cast<double>(n);
  Tensor z({n, dv});
  gemm_nn(n, d, dv, q.ptr(), d, kv.data(), dv, z.ptr(), dv);
  return z;
}

}  // namespace pitt::nn
