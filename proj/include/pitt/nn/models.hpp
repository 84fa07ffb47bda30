#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitt/nn/params.hpp"
#include "pitt/nn/spectral.hpp"
#include "pitt/nn/tensor.hpp"
#include "pitt/util/random.hpp"

namespace pitt::nn {

/// Field inputs on a regular grid, channels-last.
struct ModelInput {
  Tensor fields;           // [B, S, Cin]
  std::vector<int> grid;   // spatial dims, product S
  Tensor coords;           // [S, rank(grid)], appended as input channels
  Tensor counts;           // [B, vocab] token multiplicities (PITT only)
  Tensor dt;               // [B] time step to the target (PITT only)

  std::int64_t batch() const { return fields.dim(0); }
};

/// Multiplicity of every vocabulary id in a padded sequence, as one row [1, vocab].
Tensor token_counts(const std::vector<std::int32_t>& ids, int vocab);

/// Unit-interval coordinates for a regular grid (row-major, last axis fastest).
Tensor grid_coords(const std::vector<int>& grid);

struct Prediction {
  Var output;       // [B, S, Cout]
  Var passthrough;  // PITT: backbone head; FNO: same as output
  Var update;       // PITT: token-conditioned correction; FNO: undefined
};

class Model {
 public:
  virtual ~Model() = default;
  virtual Prediction forward(const ModelInput& in, bool training, Rng& rng) const = 0;
  virtual std::string kind() const = 0;
  virtual nlohmann::json config_json() const = 0;
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 protected:
  ParamStore params_;
};

struct FnoConfig {
  int in_channels = 10;
  int out_channels = 1;
  int width = 64;
  std::vector<int> modes{8};
  int blocks = 6;  // three encoding and three decoding Fourier layers
  int proj_width = 128;
  double dropout = 0.0;
  std::vector<int> grid;  // training grid; mode counts are validated against it when set

  nlohmann::json to_json() const;
  static FnoConfig from_json(const nlohmann::json& j);
};

/// Lift, Fourier blocks (spectral + pointwise path, GELU between blocks), two-layer projection.
class Fno : public Model {
 public:
  Fno(const FnoConfig& cfg, std::uint64_t seed, const std::string& prefix = "fno");

  struct Features {
    Var hidden;  // output of the last Fourier block [B, S, width]
    Var out;     // projection head [B, S, out_channels]
  };
  Features features(const ModelInput& in, bool training, Rng& rng) const;
  Prediction forward(const ModelInput& in, bool training, Rng& rng) const override;
  std::string kind() const override { return "fno"; }
  nlohmann::json config_json() const override { return cfg_.to_json(); }
  const FnoConfig& config() const { return cfg_; }

  /// Builds the layers into an external store (PITT's backbone).
  Fno(const FnoConfig& cfg, ParamStore& store, Rng& rng, const std::string& prefix);

 private:
  void build(ParamStore& store, Rng& rng, const std::string& prefix);

  FnoConfig cfg_;
  Dense lift_;
  std::vector<Var> spec_re_, spec_im_;
  std::vector<Dense> pointwise_;
  Dense proj0_, proj1_;
};

struct PittConfig {
  FnoConfig backbone;
  int hidden = 64;
  int layers = 1;
  int heads = 1;
  int vocab = 50;
  int pad_length = 500;  // every token-count row must sum to this
  double dropout = 0.0;

  nlohmann::json to_json() const;
  static PittConfig from_json(const nlohmann::json& j);
};

/// FNO passthrough plus a token-conditioned linear-attention update.
class Pitt : public Model {
 public:
  Pitt(const PittConfig& cfg, std::uint64_t seed);

  Prediction forward(const ModelInput& in, bool training, Rng& rng) const override;
  std::string kind() const override { return "pitt"; }
  nlohmann::json config_json() const override { return cfg_.to_json(); }
  const PittConfig& config() const { return cfg_; }

  /// Latent equation rows T_h for every vocabulary entry [B, vocab, hidden] (eval mode).
  Var token_latent(const Tensor& counts, bool training, Rng& rng) const;
  /// T_h laid out per token position [P, hidden] for one sequence (eval mode).
  Tensor token_block(const std::vector<std::int32_t>& ids) const;
  /// Post-softmax self-attention weights of head `head` for the distinct tokens [B, vocab, vocab].
  Tensor attention_weights(const Tensor& counts, int head) const;
  /// V_L for given V_0, token counts and time step.
  Var numerical_update(const Var& v0, const Tensor& counts, const Tensor& dt, bool training, Rng& rng) const;
  /// Applies layer `l` (1-based) once.
  Var update_layer(int l, const Var& v, const Var& m, const Tensor& dt, bool training, Rng& rng) const;
  /// The per-sample update operator M built from the latent equation [B, hidden, hidden].
  Var update_operator(const Tensor& counts, bool training, Rng& rng) const;
  /// Zeroes the output projection, so the update component vanishes.
  void zero_update();
  /// Zeroes the last layer of every update MLP, so each numerical update is the identity.
  void zero_update_mlps();

 private:
  PittConfig cfg_;
  std::unique_ptr<Fno> backbone_;
  Var tau_;  // normalized value of each vocabulary id [vocab, 1]
  Dense embed_, wt1_, wt2_, wt3_, wo_;
  Dense wx_, wth1_, wth2_;
  std::vector<Mlp> time_mlp_, update_mlp_;
  Dense out_;
};

std::unique_ptr<Model> make_model(const std::string& kind, const nlohmann::json& config, std::uint64_t seed);

}  // namespace pitt::nn
