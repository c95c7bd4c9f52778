#pragma once

#include <Eigen/Dense>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace tbnpb {

inline constexpr double kMinStd = 1e-6;

// Per-dimension standardization statistics. std is clamped at fit time,
// so it is strictly positive and normalize/denormalize round-trip exactly.
struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  Eigen::Index dim() const { return mean.size(); }

  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const {
    return (x - mean).cwiseQuotient(std);
  }
  Eigen::VectorXd denormalize(const Eigen::VectorXd& z) const {
    return z.cwiseProduct(std) + mean;
  }
};

// Population mean/std per row of a (dim x N) sample matrix, std clamped to kMinStd.
NormStats fit_norm_stats(const Eigen::MatrixXd& samples);

// Stats for a (command, tool-tip) sample set. Latent inputs are learned, not
// observed, so they carry no statistics and bypass normalization entirely.
struct IoNormStats {
  NormStats in_norm;   // command part of the input
  NormStats out_norm;  // tool-tip output
};
IoNormStats fit_normalization(const Eigen::MatrixXd& commands,
                              const Eigen::MatrixXd& tips);

// Dense tanh network mapping [normalized command; latent] to a normalized
// 3-d tool-tip position. layer_dims counts the input and output layers.
struct MlpModel {
  std::vector<int> layer_dims;
  std::vector<Eigen::MatrixXd> weights;  // weights[l]: layer_dims[l+1] x layer_dims[l]
  std::vector<Eigen::VectorXd> biases;   // biases[l]:  layer_dims[l+1]
  int command_dim = 0;
  int latent_dim = 0;
  NormStats in_norm;   // command block only
  NormStats out_norm;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  int layer_count() const { return static_cast<int>(layer_dims.size()); }

  void set_zero();
  void validate() const;
};

// Network with the given hidden widths; weights zero, stats identity.
MlpModel make_model(int command_dim, int latent_dim,
                    const std::vector<int>& hidden_dims);

// The canonical 7-layer configuration: five hidden layers of width 300.
MlpModel make_tbnpb_model(int command_dim, int latent_dim = 2);

// Glorot-uniform init, +-sqrt(6/(fan_in+fan_out)), from the given stream.
void init_weights(MlpModel& model, Rng& rng);

// ---------------------------------------------------------------------------
// Batched passes in the network's own (normalized) coordinates. Columns are
// samples. These are the building blocks for the trainers and the public
// per-sample forward/backward below.

struct ForwardCache {
  std::vector<Eigen::MatrixXd> acts;  // acts[0] = input, acts.back() = output
};

struct ParamGrads {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static ParamGrads zeros_like(const MlpModel& model);
};

Eigen::MatrixXd net_forward(const MlpModel& model, const Eigen::MatrixXd& input,
                            ForwardCache* cache = nullptr);

// Backpropagates an upstream gradient (same shape as the output) through the
// cached forward pass. Returns the gradient w.r.t. the network input; fills
// param_grads with the weight/bias gradients when non-null. Throws a
// numeric_failure naming the layer if non-finite values appear.
Eigen::MatrixXd net_backward(const MlpModel& model, const ForwardCache& cache,
                             const Eigen::MatrixXd& upstream,
                             ParamGrads* param_grads = nullptr);

// Assembles [normalized commands; latents] network inputs column-wise.
Eigen::MatrixXd assemble_input(const MlpModel& model,
                               const Eigen::MatrixXd& commands_deg,
                               const Eigen::MatrixXd& latents);

// ---------------------------------------------------------------------------
// Per-sample operations in physical units (command in degrees, tip in mm).

Eigen::Vector3d forward(const MlpModel& model, const Eigen::VectorXd& u_deg,
                        const Eigen::VectorXd& p);

struct Gradients {
  Eigen::VectorXd wrt_command;  // d<upstream, tip>/du, through input normalization
  Eigen::VectorXd wrt_latent;
  ParamGrads wrt_params;
};

// Exact reverse-mode gradients of <upstream, forward(u, p)>.
Gradients backward(const MlpModel& model, const Eigen::VectorXd& u_deg,
                   const Eigen::VectorXd& p, const Eigen::Vector3d& upstream);

// ---------------------------------------------------------------------------
// Flat views over parameters, in a fixed order (all weights, then all
// biases), for optimizers operating on raw storage.

using ParamView = Eigen::Map<Eigen::ArrayXd>;
using ConstParamView = Eigen::Map<const Eigen::ArrayXd>;

std::vector<ParamView> param_views(MlpModel& model);
std::vector<ConstParamView> grad_views(const ParamGrads& grads);

}  // namespace tbnpb
