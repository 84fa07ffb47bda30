#include "pitt/nn/spectral.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <tuple>

namespace pitt::nn {

namespace {

using cplx = std::complex<double>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Pruned separable transform for C interleaved channels on an n0 x n1 grid (n0 = 1 in 1D).
// Rows are transformed along the last axis into a channel-major half spectrum
// T[c][row][k1]; only the first m1 columns are then transformed along the first axis.
struct ChannelPlans {
  int n0 = 1, n1 = 1, half = 1, m1 = 1;
  std::int64_t channels = 1;
  fftw_plan fwd_rows = nullptr, fwd_cols = nullptr, inv_cols = nullptr, inv_rows = nullptr;
  std::unique_ptr<double, FftwFree> real;
  std::unique_ptr<fftw_complex, FftwFree> spec;
  std::size_t real_size = 0, spec_size = 0;

  ChannelPlans(const std::vector<int>& grid, int c, int retained_cols) : m1(retained_cols), channels(c) {
    n0 = grid.size() == 1 ? 1 : grid[0];
    n1 = grid.back();
    half = n1 / 2 + 1;
    real_size = static_cast<std::size_t>(n0) * n1 * c;
    spec_size = static_cast<std::size_t>(n0) * half * c;
    real.reset(fftw_alloc_real(real_size));
    spec.reset(fftw_alloc_complex(spec_size));
    fftw_iodim row_f{n1, c, 1};
    fftw_iodim many_f[2] = {{n0, n1 * c, half}, {c, 1, n0 * half}};
    fwd_rows = fftw_plan_guru_dft_r2c(1, &row_f, 2, many_f, real.get(), spec.get(), FFTW_ESTIMATE);
    fftw_iodim row_b{n1, 1, c};
    fftw_iodim many_b[2] = {{n0, half, n1 * c}, {c, n0 * half, 1}};
    inv_rows = fftw_plan_guru_dft_c2r(1, &row_b, 2, many_b, spec.get(), real.get(), FFTW_ESTIMATE);
    if (!fwd_rows || !inv_rows) throw std::runtime_error("spectral_conv: FFTW planning failed");
    if (n0 > 1) {
      fftw_iodim col{n0, half, half};
      fftw_iodim many_c[2] = {{c, n0 * half, n0 * half}, {m1, 1, 1}};
      fwd_cols = fftw_plan_guru_dft(1, &col, 2, many_c, spec.get(), spec.get(), FFTW_FORWARD, FFTW_ESTIMATE);
      inv_cols = fftw_plan_guru_dft(1, &col, 2, many_c, spec.get(), spec.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
      if (!fwd_cols || !inv_cols) throw std::runtime_error("spectral_conv: FFTW planning failed");
    }
  }
  ~ChannelPlans() {
    for (auto p : {fwd_rows, fwd_cols, inv_cols, inv_rows})
      if (p) fftw_destroy_plan(p);
  }
  ChannelPlans(const ChannelPlans&) = delete;
  ChannelPlans& operator=(const ChannelPlans&) = delete;

  cplx* spectrum() { return reinterpret_cast<cplx*>(spec.get()); }
  std::int64_t at(std::int64_t c, int row, int col) const { return (c * n0 + row) * half + col; }

  // real -> retained part of the spectrum
  void forward() {
    fftw_execute(fwd_rows);
    if (fwd_cols) fftw_execute(fwd_cols);
  }
  // spectrum (nonzero only in the first m1 columns) -> real
  void inverse() {
    if (inv_cols) fftw_execute(inv_cols);
    fftw_execute(inv_rows);
  }
};

ChannelPlans& plans_for(const std::vector<int>& grid, int channels, int m1) {
  static std::map<std::tuple<std::vector<int>, int, int>, std::unique_ptr<ChannelPlans>> cache;
  auto& slot = cache[{grid, channels, m1}];
  if (!slot) slot = std::make_unique<ChannelPlans>(grid, channels, m1);
  return *slot;
}

// Retained modes in weight-row order, with the Hermitian multiplicity c_k
// (1 on the zero column, 2 elsewhere).
struct ModeTable {
  std::vector<int> row, col;
  std::vector<double> mult;
};

ModeTable mode_table(const std::vector<int>& grid, const SpectralModes& m) {
  ModeTable t;
  auto add = [&](int r, int k) {
    t.row.push_back(r);
    t.col.push_back(k);
    t.mult.push_back(k == 0 ? 1.0 : 2.0);
  };
  if (grid.size() == 1) {
    for (int k = 0; k < m.modes[0]; ++k) add(0, k);
  } else {
    const int n0 = grid[0];
    std::vector<int> rows;
    for (int k = 0; k < m.modes[0]; ++k) rows.push_back(k);
    for (int k = n0 - m.modes[0]; k < n0; ++k) rows.push_back(k);
    for (int r : rows)
      for (int k1 = 0; k1 < m.modes[1]; ++k1) add(r, k1);
  }
  return t;
}

// Makes the zero column exactly Hermitian along the first axis, so the inverse returns
// Re(sum_k Z_k e^{ik.x}). The Nyquist column is never retained.
void hermitian_zero_column(ChannelPlans& p) {
  cplx* Z = p.spectrum();
  for (std::int64_t c = 0; c < p.channels; ++c)
    for (int r = 0; r < p.n0; ++r) {
      const int rr = (p.n0 - r) % p.n0;
      if (rr < r) continue;
      cplx& a = Z[p.at(c, r, 0)];
      cplx& b = Z[p.at(c, rr, 0)];
      const cplx m = 0.5 * (a + std::conj(b));
      a = m;
      b = std::conj(m);
    }
}

}  // namespace

void SpectralModes::check(const std::vector<int>& grid) const {
  if (modes.empty() || modes.size() > 2 || modes.size() != grid.size()) {
    throw std::invalid_argument("spectral_conv: mode count does not match grid rank");
  }
  for (std::size_t a = 0; a < modes.size(); ++a) {
    if (modes[a] < 1 || 2 * modes[a] > grid[a]) {
      throw std::invalid_argument("spectral_conv: " + std::to_string(modes[a]) + " modes exceed the Nyquist limit of a " +
                                  std::to_string(grid[a]) + "-point axis");
    }
  }
}

Var spectral_conv(const Var& x, const Var& w_re, const Var& w_im, const std::vector<int>& grid,
                  const SpectralModes& modes) {
  modes.check(grid);
  std::int64_t total = 1;
  for (int g : grid) total *= g;
  if (x.value().rank() != 3 || x.dim(1) != total) {
    throw std::invalid_argument("spectral_conv: input " + shape_str(x.shape()) + " does not match the grid");
  }
  const auto B = x.dim(0), Cin = x.dim(2);
  const auto R = modes.weight_rows();
  if (w_re.shape() != w_im.shape() || w_re.value().rank() != 3 || w_re.dim(0) != R || w_re.dim(1) != Cin) {
    throw std::invalid_argument("spectral_conv: weight shape " + shape_str(w_re.shape()) + " does not match");
  }
  const auto Cout = w_re.dim(2);
  const auto table = std::make_shared<ModeTable>(mode_table(grid, modes));
  const int m1 = modes.modes.back();
  auto& pin = plans_for(grid, static_cast<int>(Cin), m1);
  auto& pout = plans_for(grid, static_cast<int>(Cout), m1);
  const double inv_total = 1.0 / static_cast<double>(total);

  // Retained input spectra, kept for the weight gradient: [B, R, Cin].
  auto xhat = std::make_shared<std::vector<cplx>>(static_cast<std::size_t>(B * R * Cin));
  Tensor y({B, total, Cout});
  const double* wr = w_re.value().ptr();
  const double* wi = w_im.value().ptr();
  for (std::int64_t b = 0; b < B; ++b) {
    std::copy_n(x.value().ptr() + b * total * Cin, total * Cin, pin.real.get());
    pin.forward();
    const cplx* X = pin.spectrum();
    cplx* xh = xhat->data() + b * R * Cin;
    for (std::int64_t r = 0; r < R; ++r)
      for (std::int64_t c = 0; c < Cin; ++c) xh[r * Cin + c] = X[pin.at(c, table->row[r], table->col[r])];

    cplx* Y = pout.spectrum();
    std::fill(Y, Y + pout.spec_size, cplx(0.0));
    std::vector<cplx> yk(static_cast<std::size_t>(Cout));
    for (std::int64_t r = 0; r < R; ++r) {
      std::fill(yk.begin(), yk.end(), cplx(0.0));
      for (std::int64_t ci = 0; ci < Cin; ++ci) {
        const cplx xv = xh[r * Cin + ci];
        const double* wrr = wr + (r * Cin + ci) * Cout;
        const double* wir = wi + (r * Cin + ci) * Cout;
        for (std::int64_t co = 0; co < Cout; ++co) yk[co] += xv * cplx(wrr[co], wir[co]);
      }
      for (std::int64_t co = 0; co < Cout; ++co) Y[pout.at(co, table->row[r], table->col[r])] = yk[co];
    }
    hermitian_zero_column(pout);
    pout.inverse();
    double* yb = y.ptr() + b * total * Cout;
    for (std::int64_t i = 0; i < total * Cout; ++i) yb[i] = pout.real.get()[i] * inv_total;
  }

  return make_result(std::move(y), {x, w_re, w_im},
                     [B, total, Cin, Cout, R, table, xhat, grid, m1, inv_total](Node& out) {
    Node& nx = *out.parents[0];
    Node& nr = *out.parents[1];
    Node& ni = *out.parents[2];
    auto& pin = plans_for(grid, static_cast<int>(Cin), m1);
    auto& pout = plans_for(grid, static_cast<int>(Cout), m1);
    const double* wr = nr.value.ptr();
    const double* wi = ni.value.ptr();
    double* gwr = nr.requires_grad ? nr.ensure_grad().data() : nullptr;
    double* gwi = ni.requires_grad ? ni.ensure_grad().data() : nullptr;
    double* gx = nx.requires_grad ? nx.ensure_grad().data() : nullptr;
    std::vector<cplx> G(static_cast<std::size_t>(R * Cout));
    for (std::int64_t b = 0; b < B; ++b) {
      // Gradient w.r.t. the retained output spectrum: c_k DFT(g)_k / N.
      std::copy_n(out.grad.data() + b * total * Cout, total * Cout, pout.real.get());
      pout.forward();
      const cplx* GY = pout.spectrum();
      for (std::int64_t r = 0; r < R; ++r)
        for (std::int64_t co = 0; co < Cout; ++co) {
          G[r * Cout + co] = GY[pout.at(co, table->row[r], table->col[r])] * (table->mult[r] * inv_total);
        }
      const cplx* xh = xhat->data() + b * R * Cin;
      if (gwr || gwi) {
        for (std::int64_t r = 0; r < R; ++r)
          for (std::int64_t ci = 0; ci < Cin; ++ci) {
            const cplx xc = std::conj(xh[r * Cin + ci]);
            for (std::int64_t co = 0; co < Cout; ++co) {
              const cplx gw = xc * G[r * Cout + co];
              if (gwr) gwr[(r * Cin + ci) * Cout + co] += gw.real();
              if (gwi) gwi[(r * Cin + ci) * Cout + co] += gw.imag();
            }
          }
      }
      if (gx) {
        // H = conj(W) G on retained modes; dx = c2r(H / c_k).
        cplx* H = pin.spectrum();
        std::fill(H, H + pin.spec_size, cplx(0.0));
        for (std::int64_t r = 0; r < R; ++r) {
          const double inv_mult = 1.0 / table->mult[r];
          for (std::int64_t ci = 0; ci < Cin; ++ci) {
            cplx acc(0.0);
            const double* wrr = wr + (r * Cin + ci) * Cout;
            const double* wir = wi + (r * Cin + ci) * Cout;
            for (std::int64_t co = 0; co < Cout; ++co) acc += cplx(wrr[co], -wir[co]) * G[r * Cout + co];
            H[pin.at(ci, table->row[r], table->col[r])] = acc * inv_mult;
          }
        }
        hermitian_zero_column(pin);
        pin.inverse();
        double* gxb = gx + b * total * Cin;
        for (std::int64_t i = 0; i < total * Cin; ++i) gxb[i] += pin.real.get()[i];
      }
    }
  });
}

}  // namespace pitt::nn
