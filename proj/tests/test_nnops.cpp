#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "pitt/eqtok/tokenizer.hpp"
#include "pitt/nn/models.hpp"
#include "pitt/nn/ops.hpp"
#include "pitt/nn/spectral.hpp"
#include "support.hpp"

using namespace pitt;
using namespace pitt::nn;
using namespace pitt::testing;

TEST_CASE("linear attention matches the triple-loop oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 5), d = rng.integer(1, 4), dv = rng.integer(1, 4);
    const auto q = random_tensor({n, d}, rng), k = random_tensor({n, d}, rng), v = random_tensor({n, dv}, rng);
    CHECK(max_abs_diff(linear_attention(q, k, v).data, la_oracle(q, k, v).data) < 1e-12);
  }
  const auto q = random_tensor({3, 2}, rng), k = random_tensor({3, 2}, rng), v = random_tensor({3, 2}, rng);
  CHECK(max_abs_diff(linear_attention(q, k, v).data, la_oracle(q, k, v).data) < 1e-12);
}

TEST_CASE("linear attention edge cases and linearity in Q") {
  Rng rng(2);
  const auto q = random_tensor({4, 3}, rng), k = random_tensor({4, 3}, rng), v = random_tensor({4, 2}, rng);
  // Zero values normalize to zero.
  for (double z : linear_attention(q, k, Tensor({4, 2})).data) CHECK(z == 0.0);
  const auto base = linear_attention(q, k, v);
  for (double c : {2.0, 0.5, -4.0, 0.0}) {
    Tensor qc = q;
    for (auto& x : qc.data) x *= c;
    const auto out = linear_attention(qc, k, v);
    for (std::size_t i = 0; i < out.data.size(); ++i) CHECK(out.data[i] == c * base.data[i]);
  }
  Tensor q3 = q;
  for (auto& x : q3.data) x *= 3.7;
  const auto out3 = linear_attention(q3, k, v);
  for (std::size_t i = 0; i < out3.data.size(); ++i) CHECK(out3.data[i] == doctest::Approx(3.7 * base.data[i]).epsilon(1e-14));
  CHECK_THROWS_AS(linear_attention(Tensor({0, 2}), Tensor({0, 2}), Tensor({0, 2})), std::invalid_argument);
  CHECK_THROWS_AS(linear_attention(q, random_tensor({4, 2}, rng), v), std::invalid_argument);
  CHECK_THROWS_AS(linear_attention(q, k, random_tensor({3, 2}, rng)), std::invalid_argument);
}

TEST_CASE("spectral convolution matches a direct Fourier sum") {
  Rng rng(3);
  using cplx = std::complex<double>;
  const double two_pi = 2.0 * std::numbers::pi;
  SUBCASE("1d") {
    const int N = 16, Cin = 3, Cout = 2, m = 5, B = 2;
    const auto x = random_tensor({B, N, Cin}, rng);
    const auto wr = random_tensor({m, Cin, Cout}, rng), wi = random_tensor({m, Cin, Cout}, rng);
    const auto y = spectral_conv(constant(x), constant(wr), constant(wi), {N}, SpectralModes{{m}});
    for (int b = 0; b < B; ++b)
      for (int co = 0; co < Cout; ++co)
        for (int p = 0; p < N; ++p) {
          double acc = 0.0;
          for (int k = 0; k < m; ++k) {
            cplx yk(0.0);
            for (int ci = 0; ci < Cin; ++ci) {
              cplx xk(0.0);
              for (int s = 0; s < N; ++s) xk += x.data[(b * N + s) * Cin + ci] * std::polar(1.0, -two_pi * k * s / N);
              yk += xk * cplx(wr.data[(k * Cin + ci) * Cout + co], wi.data[(k * Cin + ci) * Cout + co]);
            }
            acc += (k == 0 ? 1.0 : 2.0) * (yk * std::polar(1.0, two_pi * k * p / N)).real();
          }
          CHECK(std::abs(y.value().data[(b * N + p) * Cout + co] - acc / N) < 1e-12);
        }
  }
  SUBCASE("2d") {
    const int N0 = 6, N1 = 8, Cin = 2, Cout = 2, m0 = 2, m1 = 3;
    const auto x = random_tensor({1, N0 * N1, Cin}, rng);
    const SpectralModes sm{{m0, m1}};
    const auto wr = random_tensor({sm.weight_rows(), Cin, Cout}, rng), wi = random_tensor({sm.weight_rows(), Cin, Cout}, rng);
    const auto y = spectral_conv(constant(x), constant(wr), constant(wi), {N0, N1}, sm);
    std::vector<int> rows;
    for (int k = 0; k < m0; ++k) rows.push_back(k);
    for (int k = N0 - m0; k < N0; ++k) rows.push_back(k);
    for (int co = 0; co < Cout; ++co)
      for (int p0 = 0; p0 < N0; ++p0)
        for (int p1 = 0; p1 < N1; ++p1) {
          double acc = 0.0;
          for (std::size_t r = 0; r < rows.size(); ++r)
            for (int k1 = 0; k1 < m1; ++k1) {
              const int row = static_cast<int>(r) * m1 + k1;
              cplx yk(0.0);
              for (int ci = 0; ci < Cin; ++ci) {
                cplx xk(0.0);
                for (int s0 = 0; s0 < N0; ++s0)
                  for (int s1 = 0; s1 < N1; ++s1)
                    xk += x.data[(s0 * N1 + s1) * Cin + ci] *
                          std::polar(1.0, -two_pi * (double(rows[r]) * s0 / N0 + double(k1) * s1 / N1));
                yk += xk * cplx(wr.data[(row * Cin + ci) * Cout + co], wi.data[(row * Cin + ci) * Cout + co]);
              }
              acc += (k1 == 0 ? 1.0 : 2.0) *
                     (yk * std::polar(1.0, two_pi * (double(rows[r]) * p0 / N0 + double(k1) * p1 / N1))).real();
            }
          CHECK(std::abs(y.value().data[(p0 * N1 + p1) * Cout + co] - acc / (N0 * N1)) < 1e-12);
        }
  }
}

TEST_CASE("spectral convolution is resolution consistent on band-limited input") {
  Rng rng(4);
  const int C = 2, m = 3;
  const auto wr = random_tensor({m, C, C}, rng), wi = random_tensor({m, C, C}, rng);
  auto field = [](int n) {
    Tensor t({1, n, C});
    for (int s = 0; s < n; ++s) {
      const double x = static_cast<double>(s) / n;
      t.data[s * C] = 0.3 + std::sin(2 * std::numbers::pi * x) - 0.5 * std::cos(4 * std::numbers::pi * x);
      t.data[s * C + 1] = std::cos(2 * std::numbers::pi * 2 * x + 0.3);
    }
    return t;
  };
  const auto coarse = spectral_conv(constant(field(16)), constant(wr), constant(wi), {16}, SpectralModes{{m}});
  const auto fine = spectral_conv(constant(field(32)), constant(wr), constant(wi), {32}, SpectralModes{{m}});
  for (int s = 0; s < 16; ++s)
    for (int c = 0; c < C; ++c) CHECK(std::abs(coarse.value().data[s * C + c] - fine.value().data[2 * s * C + c]) < 1e-12);
  CHECK_THROWS_AS(SpectralModes{{9}}.check({16}), std::invalid_argument);
}

TEST_CASE("op gradients match finite differences") {
  Rng rng(5);
  const Tensor target_small = random_tensor({2, 5, 4}, rng);
  auto run = [&](const std::function<Var()>& f, std::vector<Var> params, const Tensor& target) {
    for (auto& p : params) p.zero_grad();
    const Var loss = mse_loss(f(), target);
    backward(loss);
    auto eval = [&] {
      NoGradGuard g;
      return mse_loss(f(), target).value().data[0];
    };
    for (auto& p : params) CHECK(gradient_error(p, eval) < 1e-6);
  };
  Var x = parameter(random_tensor({2, 5, 3}, rng));
  Var w = parameter(random_tensor({3, 4}, rng));
  Var b = parameter(random_tensor({4}, rng));
  run([&] { return gelu(linear(x, w, b)); }, {x, w, b}, target_small);
  Var t = parameter(random_tensor({2, 1}, rng));
  run([&] { return concat_broadcast(x, t); }, {x, t}, target_small);
  Var y = parameter(random_tensor({2, 5, 1}, rng));
  run([&] { return concat_last(x, y); }, {x, y}, target_small);
  Var z = parameter(random_tensor({2, 5, 4}, rng));
  run([&] { return group_norm(z, 2); }, {z}, target_small);
  run([&] { return add(scale(z, -1.5), gelu(z)); }, {z}, target_small);
  Var m = parameter(random_tensor({2, 4, 4}, rng));
  run([&] { return bmm_nt(z, m); }, {z, m}, target_small);

  Tensor counts({2, 6});
  for (auto& c : counts.data) c = rng.integer(0, 3);
  counts.data[0] = 1;
  counts.data[6] = 2;
  Var qv = parameter(random_tensor({2, 6, 4}, rng)), kv = parameter(random_tensor({2, 6, 4}, rng));
  run([&] { return weighted_outer(qv, kv, counts, 2); }, {qv, kv}, random_tensor({2, 4, 4}, rng));
  Var q = parameter(random_tensor({6, 4}, rng)), k = parameter(random_tensor({6, 4}, rng)),
      v = parameter(random_tensor({6, 4}, rng));
  run([&] { return count_attention(q, k, v, counts, 2); }, {q, k, v}, random_tensor({2, 6, 4}, rng));

  Var xs = parameter(random_tensor({2, 16, 3}, rng));
  Var wr = parameter(random_tensor({4, 3, 2}, rng)), wi = parameter(random_tensor({4, 3, 2}, rng));
  run([&] { return spectral_conv(xs, wr, wi, {16}, SpectralModes{{4}}); }, {xs, wr, wi}, random_tensor({2, 16, 2}, rng));
  Var x2 = parameter(random_tensor({1, 16, 2}, rng));
  Var w2r = parameter(random_tensor({8, 2, 2}, rng)), w2i = parameter(random_tensor({8, 2, 2}, rng));
  run([&] { return spectral_conv(x2, w2r, w2i, {4, 4}, SpectralModes{{2, 2}}); }, {x2, w2r, w2i},
      random_tensor({1, 16, 2}, rng));
}

TEST_CASE("count attention equals dense self-attention over the padded sequence") {
  Rng rng(6);
  PittConfig c = toy_pitt(1, 40);
  c.heads = 3;
  Pitt model(c, 11);
  const auto ids = random_ids(rng, c.pad_length, 17, c.vocab);
  const Tensor th = model.token_block(ids);
  REQUIRE(th.shape == Shape{40, 6});

  // Dense multi-head attention over all 40 positions, written out directly.
  const auto& ps = model.params();
  const int h = c.hidden, d = h / c.heads, P = c.pad_length;
  auto at = [&](const std::string& n, int i) { return ps.get(n).value().data[static_cast<std::size_t>(i)]; };
  std::vector<double> e(P * h), q(P * h), k(P * h), v(P * h), o(P * h);
  for (int i = 0; i < P; ++i) {
    const double tau = eqtok::normalize_id(ids[i], c.vocab);
    for (int a = 0; a < h; ++a) e[i * h + a] = tau * at("token.embed.w", a) + at("token.embed.b", a);
  }
  for (int i = 0; i < P; ++i)
    for (int a = 0; a < h; ++a) {
      double sq = 0, sk = 0, sv = 0;
      for (int r = 0; r < h; ++r) {
        sq += e[i * h + r] * at("token.w_t1.w", r * h + a);
        sk += e[i * h + r] * at("token.w_t2.w", r * h + a);
        sv += e[i * h + r] * at("token.w_t3.w", r * h + a);
      }
      q[i * h + a] = sq;
      k[i * h + a] = sk;
      v[i * h + a] = sv;
    }
  for (int g = 0; g < c.heads; ++g)
    for (int i = 0; i < P; ++i) {
      std::vector<double> s(P);
      double mx = -1e300;
      for (int j = 0; j < P; ++j) {
        double acc = 0;
        for (int a = g * d; a < (g + 1) * d; ++a) acc += q[i * h + a] * k[j * h + a];
        s[j] = acc / std::sqrt(double(d));
        mx = std::max(mx, s[j]);
      }
      double z = 0;
      for (int j = 0; j < P; ++j) z += s[j] = std::exp(s[j] - mx);
      for (int a = g * d; a < (g + 1) * d; ++a) {
        double acc = 0;
        for (int j = 0; j < P; ++j) acc += s[j] / z * v[j * h + a];
        o[i * h + a] = acc;
      }
    }
  double err = 0.0;
  for (int i = 0; i < P; ++i)
    for (int a = 0; a < h; ++a) {
      double acc = at("token.out.b", a);
      for (int r = 0; r < h; ++r) acc += o[i * h + r] * at("token.out.w", r * h + a);
      err = std::max(err, std::abs(acc - th.data[i * h + a]));
    }
  CHECK(err < 1e-12);

  // Determinism, and sensitivity to which token sits where.
  CHECK(model.token_block(ids).data == th.data);
  auto swapped = ids;
  int a = 0, b2 = 1;
  while (swapped[a] == swapped[b2]) ++b2;
  std::swap(swapped[a], swapped[b2]);
  CHECK(model.token_block(swapped).data != th.data);
  CHECK_THROWS_AS(model.token_block(std::vector<std::int32_t>(39, 0)), std::invalid_argument);
}

TEST_CASE("one update layer equals the hand-unrolled scheme") {
  Rng rng(7);
  PittConfig c = toy_pitt(1, 30);
  Pitt model(c, 12);
  const auto ids = random_ids(rng, c.pad_length, 12, c.vocab);
  const int S = 9, h = c.hidden, H = c.heads, d = h / H, P = c.pad_length;
  const Tensor v0 = random_tensor({1, S, h}, rng);
  const Tensor dt({1}, {0.37});
  const Tensor counts = token_counts(ids, c.vocab);
  Rng r0(0);
  Tensor got;
  {
    NoGradGuard g;
    got = model.numerical_update(constant(v0), counts, dt, false, r0).value();
  }

  const auto& ps = model.params();
  auto W = [&](const std::string& n) { return ps.get(n).value(); };
  const Tensor th = model.token_block(ids);
  auto matmul = [](const Tensor& a, const Tensor& b) {
    const auto n = a.dim(0), k = a.dim(1), m = b.dim(1);
    Tensor out({n, m});
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < m; ++j)
        for (std::int64_t r = 0; r < k; ++r) out.data[i * m + j] += a.data[i * k + r] * b.data[r * m + j];
    return out;
  };
  const Tensor th1 = matmul(th, W("update.w_th1.w")), th2 = matmul(th, W("update.w_th2.w"));
  // X_1 = LA(T_h1, T_h2, V_0) with the hidden axis as the sequence, head by head.
  Tensor x({S, h});
  for (int g = 0; g < H; ++g) {
    Tensor qt({d, P}), kt({d, P}), vt({d, S});
    for (int a = 0; a < d; ++a) {
      for (int i = 0; i < P; ++i) {
        qt.data[a * P + i] = th1.data[i * h + g * d + a];
        kt.data[a * P + i] = th2.data[i * h + g * d + a];
      }
      for (int s = 0; s < S; ++s) vt.data[a * S + s] = v0.data[s * h + g * d + a];
    }
    const Tensor z = linear_attention(qt, kt, vt);
    for (int a = 0; a < d; ++a)
      for (int s = 0; s < S; ++s) x.data[s * h + g * d + a] = z.data[a * S + s];
  }
  auto gelu_ref = [](double u) { return 0.5 * u * (1.0 + std::erf(u / std::sqrt(2.0))); };
  // t_1 = MLP(1 * t / 1)
  std::vector<double> hid(h), t1(h);
  for (int a = 0; a < h; ++a) hid[a] = gelu_ref(0.37 * W("update.time1.0.w").data[a] + W("update.time1.0.b").data[a]);
  for (int a = 0; a < h; ++a) {
    double acc = W("update.time1.1.b").data[a];
    for (int r = 0; r < h; ++r) acc += hid[r] * W("update.time1.1.w").data[r * h + a];
    t1[a] = acc;
  }
  double err = 0.0;
  for (int s = 0; s < S; ++s) {
    std::vector<double> in(2 * h), mid(h);
    for (int a = 0; a < h; ++a) {
      in[a] = x.data[s * h + a];
      in[h + a] = t1[a];
    }
    for (int a = 0; a < h; ++a) {
      double acc = W("update.mlp1.0.b").data[a];
      for (int r = 0; r < 2 * h; ++r) acc += in[r] * W("update.mlp1.0.w").data[r * h + a];
      mid[a] = gelu_ref(acc);
    }
    for (int a = 0; a < h; ++a) {
      double acc = W("update.mlp1.1.b").data[a];
      for (int r = 0; r < h; ++r) acc += mid[r] * W("update.mlp1.1.w").data[r * h + a];
      const double expect = v0.data[s * h + a] + acc;
      err = std::max(err, std::abs(expect - got.data[s * h + a]) / (1.0 + std::abs(expect)));
    }
  }
  CHECK(err < 1e-11);
}

TEST_CASE("zeroed update MLPs make the numerical update the identity") {
  Rng rng(8);
  for (int L : {1, 8, 20}) {
    Pitt model(toy_pitt(L, 25), 100 + L);
    model.zero_update_mlps();
    const Tensor v0 = random_tensor({2, 7, 6}, rng, 3.0);
    Tensor counts({2, 50});
    for (int b = 0; b < 2; ++b) {
      const auto row = token_counts(random_ids(rng, 25, 9, 50), 50);
      std::copy(row.data.begin(), row.data.end(), counts.data.begin() + b * 50);
    }
    for (double t : {0.0, 0.25, 20.0}) {
      Rng r(1);
      NoGradGuard g;
      const auto out = model.numerical_update(constant(v0), counts, Tensor({2}, {t, 2 * t}), false, r);
      CHECK(out.value().data == v0.data);
      // Also with dropout active, the residual path is untouched.
      const auto drop = model.numerical_update(constant(v0), counts, Tensor({2}, {t, t}), true, r);
      CHECK(drop.value().data == v0.data);
    }
  }
  PittConfig bad = toy_pitt(0, 10);
  CHECK_THROWS_AS(Pitt(bad, 1), std::invalid_argument);
}

TEST_CASE("decomposition sums exactly to the forward output") {
  Rng rng(9);
  PittConfig c = toy_pitt(3, 30);
  Pitt model(c, 13);
  for (int trial = 0; trial < 5; ++trial) {
    const auto in = toy_input(rng, c, 3, 16, 10);
    Rng r(0);
    NoGradGuard g;
    const auto p = model.forward(in, false, r);
    const auto& o = p.output.value().data;
    const auto& a = p.passthrough.value().data;
    const auto& u = p.update.value().data;
    REQUIRE(p.output.shape() == Shape{3, 16, 1});
    bool exact = true;
    for (std::size_t i = 0; i < o.size(); ++i) exact = exact && (o[i] == a[i] + u[i]);
    CHECK(exact);
    Rng r2(0);
    CHECK(model.forward(in, false, r2).output.value().data == o);
  }
  model.zero_update();
  const auto in = toy_input(rng, c, 2, 16, 10);
  Rng r(0);
  const auto p = model.forward(in, false, r);
  for (double u : p.update.value().data) CHECK(u == 0.0);
  CHECK(p.output.value().data == p.passthrough.value().data);

  auto wrong = in;
  wrong.counts.data[3] += 1.0;
  CHECK_THROWS_AS(model.forward(wrong, false, r), std::invalid_argument);
}

TEST_CASE("pitt gradients match finite differences for every parameter group") {
  Rng rng(10);
  PittConfig c = toy_pitt(2, 20);
  c.dropout = 0.2;
  c.backbone.dropout = 0.2;
  Pitt model(c, 14);
  const auto in = toy_input(rng, c, 2, 16, 8);
  const Tensor target = random_tensor({2, 16, 1}, rng);
  for (bool training : {false, true}) {
    model.params().zero_grad();
    Rng r(42);
    backward(mse_loss(model.forward(in, training, r).output, target));
    auto loss = [&] {
      Rng rr(42);  // same dropout masks every evaluation
      NoGradGuard g;
      return mse_loss(model.forward(in, training, rr).output, target).value().data[0];
    };
    for (auto [name, p] : model.params().items()) {
      const double e = gradient_error(p, loss);
      INFO(name << (training ? " (training)" : ""));
      CHECK(e < 1e-4);
    }
  }
}

TEST_CASE("fno gradients on a 2d toy grid") {
  Rng rng(11);
  FnoConfig c;
  c.in_channels = 1;
  c.width = 4;
  c.modes = {2, 2};
  c.proj_width = 5;
  Fno model(c, 3);
  ModelInput in;
  in.grid = {4, 4};
  in.coords = grid_coords(in.grid);
  in.fields = random_tensor({2, 16, 1}, rng);
  const Tensor target = random_tensor({2, 16, 1}, rng);
  Rng r(0);
  backward(mse_loss(model.forward(in, false, r).output, target));
  auto loss = [&] {
    NoGradGuard g;
    Rng rr(0);
    return mse_loss(model.forward(in, false, rr).output, target).value().data[0];
  };
  for (auto [name, p] : model.params().items()) {
    INFO(name);
    CHECK(gradient_error(p, loss) < 1e-4);
  }
}

TEST_CASE("fno shape contracts") {
  Rng rng(12);
  FnoConfig c;
  c.in_channels = 10;
  c.width = 8;
  c.modes = {4};
  c.proj_width = 8;
  c.grid = {100};
  Fno model(c, 5);
  ModelInput in;
  in.grid = {100};
  in.coords = grid_coords(in.grid);
  in.fields = random_tensor({3, 100, 10}, rng);
  Rng r(0);
  CHECK(model.forward(in, false, r).output.shape() == Shape{3, 100, 1});
  in.grid = {200};
  in.coords = grid_coords(in.grid);
  in.fields = random_tensor({1, 200, 10}, rng);
  const auto fine = model.forward(in, false, r).output;
  CHECK(fine.shape() == Shape{1, 200, 1});
  for (double v : fine.value().data) CHECK(std::isfinite(v));

  for (auto [name, p] : model.params().items()) std::fill(p.mutable_value().data.begin(), p.mutable_value().data.end(), 0.0);
  const auto zero = model.forward(in, false, r);
  for (double v : zero.output.value().data) CHECK(v == 0.0);

  FnoConfig too_many = c;
  too_many.modes = {51};
  CHECK_THROWS_AS(Fno(too_many, 1), std::invalid_argument);
  in.grid = {6};
  in.coords = grid_coords(in.grid);
  in.fields = random_tensor({1, 6, 10}, rng);
  CHECK_THROWS_AS(model.forward(in, false, r), std::invalid_argument);

  // 2D regimes: next-step (1 frame), fixed-future (41 frames), steady state (1 field).
  for (int frames : {1, 41}) {
    FnoConfig c2;
    c2.in_channels = frames;
    c2.width = 4;
    c2.modes = {3, 3};
    c2.proj_width = 4;
    Fno m2(c2, 2);
    ModelInput i2;
    i2.grid = {8, 12};
    i2.coords = grid_coords(i2.grid);
    i2.fields = random_tensor({2, 96, frames}, rng);
    CHECK(m2.forward(i2, false, r).output.shape() == Shape{2, 96, 1});
  }
}
