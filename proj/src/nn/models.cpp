#include "pitt/nn/models.hpp"

#include <cmath>
#include <stdexcept>

#include "pitt/eqtok/tokenizer.hpp"
#include "pitt/nn/ops.hpp"

namespace pitt::nn {

using nlohmann::json;

Tensor token_counts(const std::vector<std::int32_t>& ids, int vocab) {
  Tensor c({1, vocab});
  for (auto id : ids) {
    if (id < 0 || id >= vocab) throw std::out_of_range("token_counts: id " + std::to_string(id) + " outside the vocabulary");
    c.data[static_cast<std::size_t>(id)] += 1.0;
  }
  return c;
}

Tensor grid_coords(const std::vector<int>& grid) {
  if (grid.empty() || grid.size() > 2) throw std::invalid_argument("grid_coords: grid must be 1D or 2D");
  std::int64_t total = 1;
  for (int g : grid) total *= g;
  const auto rank = static_cast<std::int64_t>(grid.size());
  Tensor c({total, rank});
  for (std::int64_t p = 0; p < total; ++p) {
    if (rank == 1) {
      c.data[p] = static_cast<double>(p) / grid[0];
    } else {
      // Column (x) first, then row (y).
      c.data[p * 2] = static_cast<double>(p % grid[1]) / grid[1];
      c.data[p * 2 + 1] = static_cast<double>(p / grid[1]) / grid[0];
    }
  }
  return c;
}

// ---------------------------------------------------------------- FNO

json FnoConfig::to_json() const {
  return {{"in_channels", in_channels}, {"out_channels", out_channels}, {"width", width},  {"modes", modes},
          {"blocks", blocks},           {"proj_width", proj_width},     {"dropout", dropout}, {"grid", grid}};
}

FnoConfig FnoConfig::from_json(const json& j) {
  FnoConfig c;
  c.in_channels = j.at("in_channels").get<int>();
  c.out_channels = j.at("out_channels").get<int>();
  c.width = j.at("width").get<int>();
  c.modes = j.at("modes").get<std::vector<int>>();
  c.blocks = j.at("blocks").get<int>();
  c.proj_width = j.at("proj_width").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.grid = j.value("grid", std::vector<int>{});
  return c;
}

Fno::Fno(const FnoConfig& cfg, std::uint64_t seed, const std::string& prefix) : cfg_(cfg) {
  Rng rng(seed);
  build(params_, rng, prefix);
}

Fno::Fno(const FnoConfig& cfg, ParamStore& store, Rng& rng, const std::string& prefix) : cfg_(cfg) {
  build(store, rng, prefix);
}

void Fno::build(ParamStore& store, Rng& rng, const std::string& prefix) {
  if (cfg_.in_channels < 1 || cfg_.out_channels < 1 || cfg_.width < 1 || cfg_.blocks < 1 || cfg_.proj_width < 1) {
    throw std::invalid_argument("fno: sizes must be positive");
  }
  if (cfg_.modes.empty() || cfg_.modes.size() > 2) throw std::invalid_argument("fno: modes must be 1D or 2D");
  for (int m : cfg_.modes)
    if (m < 1) throw std::invalid_argument("fno: mode counts must be positive");
  const auto rank = static_cast<int>(cfg_.modes.size());
  const SpectralModes sm{cfg_.modes};
  if (!cfg_.grid.empty()) sm.check(cfg_.grid);
  lift_ = make_dense(store, prefix + ".lift", cfg_.in_channels + rank, cfg_.width, rng);
  const double scale = 1.0 / (static_cast<double>(cfg_.width) * cfg_.width);
  for (int i = 0; i < cfg_.blocks; ++i) {
    const std::string n = prefix + ".block" + std::to_string(i);
    Tensor re({sm.weight_rows(), cfg_.width, cfg_.width}), im({sm.weight_rows(), cfg_.width, cfg_.width});
    for (auto& x : re.data) x = scale * rng.uniform();
    for (auto& x : im.data) x = scale * rng.uniform();
    spec_re_.push_back(store.add(n + ".spectral_re", std::move(re)));
    spec_im_.push_back(store.add(n + ".spectral_im", std::move(im)));
    pointwise_.push_back(make_dense(store, n + ".pointwise", cfg_.width, cfg_.width, rng));
  }
  proj0_ = make_dense(store, prefix + ".proj0", cfg_.width, cfg_.proj_width, rng);
  proj1_ = make_dense(store, prefix + ".proj1", cfg_.proj_width, cfg_.out_channels, rng);
}

Fno::Features Fno::features(const ModelInput& in, bool training, Rng& rng) const {
  const auto& f = in.fields;
  if (f.rank() != 3 || f.dim(2) != cfg_.in_channels) {
    throw std::invalid_argument("fno: expected [B, S, " + std::to_string(cfg_.in_channels) + "] input, got " +
                                shape_str(f.shape));
  }
  if (in.grid.size() != cfg_.modes.size()) throw std::invalid_argument("fno: grid rank does not match the modes");
  SpectralModes{cfg_.modes}.check(in.grid);
  const auto B = f.dim(0), S = f.dim(1), C = f.dim(2), g = in.coords.dim(1);
  if (in.coords.dim(0) != S) throw std::invalid_argument("fno: coordinates do not match the field size");
  Tensor x({B, S, C + g});
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t s = 0; s < S; ++s) {
      double* row = x.ptr() + (b * S + s) * (C + g);
      std::copy_n(f.ptr() + (b * S + s) * C, C, row);
      std::copy_n(in.coords.ptr() + s * g, g, row + C);
    }
  Var h = lift_(constant(std::move(x)));
  const SpectralModes sm{cfg_.modes};
  for (int i = 0; i < cfg_.blocks; ++i) {
    Var y = add(spectral_conv(h, spec_re_[i], spec_im_[i], in.grid, sm), pointwise_[i](h));
    if (i + 1 < cfg_.blocks) y = dropout(gelu(y), cfg_.dropout, rng, training);
    h = y;
  }
  return {h, proj1_(gelu(proj0_(h)))};
}

Prediction Fno::forward(const ModelInput& in, bool training, Rng& rng) const {
  auto f = features(in, training, rng);
  return {f.out, f.out, Var{}};
}

// ---------------------------------------------------------------- PITT

json PittConfig::to_json() const {
  return {{"backbone", backbone.to_json()}, {"hidden", hidden},         {"layers", layers},  {"heads", heads},
          {"vocab", vocab},                 {"pad_length", pad_length}, {"dropout", dropout}};
}

PittConfig PittConfig::from_json(const json& j) {
  PittConfig c;
  c.backbone = FnoConfig::from_json(j.at("backbone"));
  c.hidden = j.at("hidden").get<int>();
  c.layers = j.at("layers").get<int>();
  c.heads = j.at("heads").get<int>();
  c.vocab = j.at("vocab").get<int>();
  c.pad_length = j.at("pad_length").get<int>();
  c.dropout = j.at("dropout").get<double>();
  return c;
}

Pitt::Pitt(const PittConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg_.layers < 1) throw std::invalid_argument("pitt: at least one update layer is required");
  if (cfg_.heads < 1 || cfg_.hidden % cfg_.heads != 0) throw std::invalid_argument("pitt: hidden width must split into heads");
  if (cfg_.vocab < 2 || cfg_.pad_length < 1) throw std::invalid_argument("pitt: bad vocabulary or pad length");
  Rng rng(seed);
  backbone_ = std::make_unique<Fno>(cfg_.backbone, params_, rng, "backbone");
  const int h = cfg_.hidden;
  Tensor tau({cfg_.vocab, 1});
  for (int v = 0; v < cfg_.vocab; ++v) tau.data[v] = eqtok::normalize_id(v, static_cast<std::size_t>(cfg_.vocab));
  tau_ = constant(std::move(tau));
  embed_ = make_dense(params_, "token.embed", 1, h, rng);
  wt1_ = make_dense(params_, "token.w_t1", h, h, rng, false);
  wt2_ = make_dense(params_, "token.w_t2", h, h, rng, false);
  wt3_ = make_dense(params_, "token.w_t3", h, h, rng, false);
  wo_ = make_dense(params_, "token.out", h, h, rng);
  wx_ = make_dense(params_, "update.w_x", cfg_.backbone.width, h, rng, false);
  wth1_ = make_dense(params_, "update.w_th1", h, h, rng, false);
  wth2_ = make_dense(params_, "update.w_th2", h, h, rng, false);
  for (int l = 1; l <= cfg_.layers; ++l) {
    time_mlp_.push_back(make_mlp(params_, "update.time" + std::to_string(l), 1, h, h, rng));
    update_mlp_.push_back(make_mlp(params_, "update.mlp" + std::to_string(l), 2 * h, h, h, rng));
  }
  out_ = make_dense(params_, "update.out", h, cfg_.backbone.out_channels, rng);
}

namespace {
void check_counts(const Tensor& counts, const PittConfig& cfg) {
  if (counts.rank() != 2 || counts.dim(1) != cfg.vocab) {
    throw std::invalid_argument("pitt: token counts must be [B, " + std::to_string(cfg.vocab) + "], got " +
                                shape_str(counts.shape));
  }
  for (std::int64_t b = 0; b < counts.dim(0); ++b) {
    double total = 0.0;
    for (std::int64_t v = 0; v < cfg.vocab; ++v) total += counts.data[b * cfg.vocab + v];
    if (total != cfg.pad_length) {
      throw std::invalid_argument("pitt: token sequence length " + std::to_string(total) + " does not match the configured " +
                                  std::to_string(cfg.pad_length));
    }
  }
}
}  // namespace

Var Pitt::token_latent(const Tensor& counts, bool training, Rng& rng) const {
  check_counts(counts, cfg_);
  const Var e = embed_(tau_);
  const Var o = count_attention(wt1_(e), wt2_(e), wt3_(e), counts, cfg_.heads);
  return dropout(wo_(o), cfg_.dropout, rng, training);
}

Tensor Pitt::token_block(const std::vector<std::int32_t>& ids) const {
  if (static_cast<int>(ids.size()) != cfg_.pad_length) {
    throw std::invalid_argument("pitt: token sequence has length " + std::to_string(ids.size()) + ", expected " +
                                std::to_string(cfg_.pad_length));
  }
  NoGradGuard guard;
  Rng unused(0);
  const Var th = token_latent(token_counts(ids, cfg_.vocab), false, unused);
  const auto h = cfg_.hidden;
  Tensor out({static_cast<std::int64_t>(ids.size()), h});
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::copy_n(th.value().ptr() + static_cast<std::int64_t>(ids[i]) * h, h, out.ptr() + static_cast<std::int64_t>(i) * h);
  return out;
}

Tensor Pitt::attention_weights(const Tensor& counts, int head) const {
  check_counts(counts, cfg_);
  if (head < 0 || head >= cfg_.heads) throw std::out_of_range("pitt: head index out of range");
  NoGradGuard guard;
  const Var e = embed_(tau_);
  const Var q = wt1_(e), k = wt2_(e);
  const auto V = cfg_.vocab, h = cfg_.hidden, d = h / cfg_.heads;
  const auto B = counts.dim(0);
  Tensor out({B, V, V});
  for (std::int64_t b = 0; b < B; ++b) {
    const double* c = counts.ptr() + b * V;
    for (int m = 0; m < V; ++m) {
      std::vector<double> s(static_cast<std::size_t>(V));
      double mx = -INFINITY;
      for (int n = 0; n < V; ++n) {
        double acc = 0.0;
        for (int i = head * d; i < (head + 1) * d; ++i) acc += q.value().data[m * h + i] * k.value().data[n * h + i];
        s[n] = acc / std::sqrt(static_cast<double>(d));
        if (c[n] > 0.0) mx = std::max(mx, s[n]);
      }
      double z = 0.0;
      for (int n = 0; n < V; ++n) {
        s[n] = c[n] > 0.0 ? c[n] * std::exp(s[n] - mx) : 0.0;
        z += s[n];
      }
      for (int n = 0; n < V; ++n) out.data[(b * V + m) * V + n] = s[n] / z;
    }
  }
  return out;
}

Var Pitt::update_operator(const Tensor& counts, bool training, Rng& rng) const {
  const Var th = token_latent(counts, training, rng);
  return weighted_outer(wth1_(th), group_norm(wth2_(th), cfg_.heads), counts, cfg_.heads);
}

Var Pitt::update_layer(int l, const Var& v, const Var& m, const Tensor& dt, bool training, Rng& rng) const {
  if (l < 1 || l > cfg_.layers) throw std::out_of_range("pitt: layer index out of range");
  const auto B = v.dim(0);
  if (dt.size() != B) throw std::invalid_argument("pitt: one time step per sample is required");
  Tensor frac({B, 1});
  for (std::int64_t b = 0; b < B; ++b) frac.data[b] = l * dt.data[b] / cfg_.layers;
  const Var x = dropout(bmm_nt(group_norm(v, cfg_.heads), m), cfg_.dropout, rng, training);
  const Var tl = time_mlp_[l - 1](constant(std::move(frac)));
  return add(v, update_mlp_[l - 1](concat_broadcast(x, tl)));
}

Var Pitt::numerical_update(const Var& v0, const Tensor& counts, const Tensor& dt, bool training, Rng& rng) const {
  for (double t : dt.data)
    if (!(t >= 0.0)) throw std::invalid_argument("pitt: time step must be non-negative");
  const Var m = update_operator(counts, training, rng);
  Var v = v0;
  for (int l = 1; l <= cfg_.layers; ++l) v = update_layer(l, v, m, dt, training, rng);
  return v;
}

Prediction Pitt::forward(const ModelInput& in, bool training, Rng& rng) const {
  check_counts(in.counts, cfg_);
  if (in.counts.dim(0) != in.batch()) throw std::invalid_argument("pitt: token batch does not match field batch");
  const auto feat = backbone_->features(in, training, rng);
  const Var vl = numerical_update(wx_(feat.hidden), in.counts, in.dt, training, rng);
  const Var update = out_(vl);
  return {add(feat.out, update), feat.out, update};
}

void Pitt::zero_update() {
  for (auto* v : {&out_.w, &out_.b}) std::fill(v->mutable_value().data.begin(), v->mutable_value().data.end(), 0.0);
}

void Pitt::zero_update_mlps() {
  for (auto& mlp : update_mlp_)
    for (auto* v : {&mlp.second.w, &mlp.second.b})
      std::fill(v->mutable_value().data.begin(), v->mutable_value().data.end(), 0.0);
}

std::unique_ptr<Model> make_model(const std::string& kind, const json& config, std::uint64_t seed) {
  if (kind == "fno") return std::make_unique<Fno>(FnoConfig::from_json(config), seed);
  if (kind == "pitt") return std::make_unique<Pitt>(PittConfig::from_json(config), seed);
  throw std::invalid_argument("unknown model kind '" + kind + "'");
}

}  // namespace pitt::nn
