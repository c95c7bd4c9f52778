#include "mlp.hpp"

#include <cmath>
#include <string>

namespace tbnpb {

NormStats fit_norm_stats(const Eigen::MatrixXd& samples) {
  require(samples.cols() >= 2, ErrorCode::invalid_argument,
          "normalization needs at least 2 samples, got " +
              std::to_string(samples.cols()));
  NormStats s;
  s.mean = samples.rowwise().mean();
  const Eigen::MatrixXd centered = samples.colwise() - s.mean;
  s.std = (centered.array().square().rowwise().mean()).sqrt().matrix();
  s.std = s.std.cwiseMax(kMinStd);
  return s;
}

IoNormStats fit_normalization(const Eigen::MatrixXd& commands,
                              const Eigen::MatrixXd& tips) {
  require(commands.cols() == tips.cols(), ErrorCode::dimension_mismatch,
          "command/tip sample counts differ");
  return IoNormStats{fit_norm_stats(commands), fit_norm_stats(tips)};
}

void MlpModel::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

void MlpModel::validate() const {
  require(layer_dims.size() >= 2, ErrorCode::invalid_argument,
          "model needs at least input and output layers");
  require(command_dim + latent_dim == layer_dims.front(),
          ErrorCode::dimension_mismatch,
          "input width must equal command_dim + latent_dim");
  require(weights.size() == layer_dims.size() - 1 &&
              biases.size() == weights.size(),
          ErrorCode::dimension_mismatch, "parameter count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    require(weights[l].rows() == layer_dims[l + 1] &&
                weights[l].cols() == layer_dims[l] &&
                biases[l].size() == layer_dims[l + 1],
            ErrorCode::dimension_mismatch,
            "parameter shape mismatch at layer " + std::to_string(l + 1));
  }
  require(in_norm.dim() == command_dim && out_norm.dim() == layer_dims.back(),
          ErrorCode::dimension_mismatch, "normalization stats shape mismatch");
}

MlpModel make_model(int command_dim, int latent_dim,
                    const std::vector<int>& hidden_dims) {
  require(command_dim >= 1 && latent_dim >= 0, ErrorCode::invalid_argument,
          "bad input dims");
  MlpModel m;
  m.command_dim = command_dim;
  m.latent_dim = latent_dim;
  m.layer_dims.push_back(command_dim + latent_dim);
  for (int h : hidden_dims) {
    require(h >= 1, ErrorCode::invalid_argument, "bad hidden width");
    m.layer_dims.push_back(h);
  }
  m.layer_dims.push_back(3);
  for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
    m.weights.emplace_back(
        Eigen::MatrixXd::Zero(m.layer_dims[l + 1], m.layer_dims[l]));
    m.biases.emplace_back(Eigen::VectorXd::Zero(m.layer_dims[l + 1]));
  }
  m.in_norm.mean = Eigen::VectorXd::Zero(command_dim);
  m.in_norm.std = Eigen::VectorXd::Ones(command_dim);
  m.out_norm.mean = Eigen::VectorXd::Zero(3);
  m.out_norm.std = Eigen::VectorXd::Ones(3);
  return m;
}

MlpModel make_tbnpb_model(int command_dim, int latent_dim) {
  return make_model(command_dim, latent_dim, {300, 300, 300, 300, 300});
}

void init_weights(MlpModel& model, Rng& rng) {
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    Eigen::MatrixXd& w = model.weights[l];
    const double bound =
        std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    // Row-major fill so the draw order is independent of storage layout.
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c)
        w(r, c) = rng.uniform(-bound, bound);
    model.biases[l].setZero();
  }
}

Eigen::MatrixXd net_forward(const MlpModel& model, const Eigen::MatrixXd& input,
                            ForwardCache* cache) {
  require(input.rows() == model.input_dim(), ErrorCode::dimension_mismatch,
          "network input has " + std::to_string(input.rows()) +
              " rows, model expects " + std::to_string(model.input_dim()));
  if (cache) {
    cache->acts.clear();
    cache->acts.reserve(model.layer_dims.size());
    cache->acts.push_back(input);
  }
  Eigen::MatrixXd a = input;
  const std::size_t n_affine = model.weights.size();
  for (std::size_t l = 0; l < n_affine; ++l) {
    Eigen::MatrixXd z = model.weights[l] * a;
    z.colwise() += model.biases[l];
    if (l + 1 < n_affine) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);  // identity output layer
    }
    if (cache) cache->acts.push_back(a);
  }
  return a;
}

ParamGrads ParamGrads::zeros_like(const MlpModel& model) {
  ParamGrads g;
  for (const auto& w : model.weights)
    g.weights.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : model.biases)
    g.biases.emplace_back(Eigen::VectorXd::Zero(b.size()));
  return g;
}

Eigen::MatrixXd net_backward(const MlpModel& model, const ForwardCache& cache,
                             const Eigen::MatrixXd& upstream,
                             ParamGrads* param_grads) {
  const std::size_t n_affine = model.weights.size();
  require(cache.acts.size() == n_affine + 1, ErrorCode::invalid_argument,
          "forward cache does not match model depth");
  require(upstream.rows() == model.output_dim() &&
              upstream.cols() == cache.acts.back().cols(),
          ErrorCode::dimension_mismatch, "upstream gradient shape mismatch");
  require(upstream.allFinite(), ErrorCode::numeric_failure,
          "upstream gradient is not finite");

  Eigen::MatrixXd delta = upstream;  // d(scalar)/dz of the output layer
  for (std::size_t l = n_affine; l-- > 0;) {
    require(cache.acts[l + 1].allFinite(), ErrorCode::numeric_failure,
            "non-finite activations at layer " + std::to_string(l + 1));
    if (param_grads) {
      param_grads->weights[l].noalias() = delta * cache.acts[l].transpose();
      param_grads->biases[l] = delta.rowwise().sum();
    }
    Eigen::MatrixXd grad_in = model.weights[l].transpose() * delta;
    if (l > 0) {
      // tanh'(z) = 1 - a^2, from the cached post-activation
      delta = grad_in.cwiseProduct(
          (1.0 - cache.acts[l].array().square()).matrix());
    } else {
      delta = std::move(grad_in);
    }
  }
  require(delta.allFinite(), ErrorCode::numeric_failure,
          "non-finite gradient at the input layer");
  return delta;
}

Eigen::MatrixXd assemble_input(const MlpModel& model,
                               const Eigen::MatrixXd& commands_deg,
                               const Eigen::MatrixXd& latents) {
  require(commands_deg.rows() == model.command_dim &&
              latents.rows() == model.latent_dim &&
              commands_deg.cols() == latents.cols(),
          ErrorCode::dimension_mismatch, "input block shape mismatch");
  Eigen::MatrixXd in(model.input_dim(), commands_deg.cols());
  in.topRows(model.command_dim) =
      (commands_deg.colwise() - model.in_norm.mean)
          .array()
          .colwise() /
      model.in_norm.std.array();
  if (model.latent_dim > 0) in.bottomRows(model.latent_dim) = latents;
  return in;
}

Eigen::Vector3d forward(const MlpModel& model, const Eigen::VectorXd& u_deg,
                        const Eigen::VectorXd& p) {
  require(u_deg.size() == model.command_dim, ErrorCode::dimension_mismatch,
          "command has " + std::to_string(u_deg.size()) +
              " dims, model expects " + std::to_string(model.command_dim));
  require(p.size() == model.latent_dim, ErrorCode::dimension_mismatch,
          "latent has " + std::to_string(p.size()) + " dims, model expects " +
              std::to_string(model.latent_dim));
  const Eigen::MatrixXd out = net_forward(model, assemble_input(model, u_deg, p));
  return model.out_norm.denormalize(out.col(0));
}

Gradients backward(const MlpModel& model, const Eigen::VectorXd& u_deg,
                   const Eigen::VectorXd& p, const Eigen::Vector3d& upstream) {
  require(u_deg.size() == model.command_dim && p.size() == model.latent_dim,
          ErrorCode::dimension_mismatch, "backward input shape mismatch");
  ForwardCache cache;
  net_forward(model, assemble_input(model, u_deg, p), &cache);

  Gradients g;
  g.wrt_params = ParamGrads::zeros_like(model);
  // Denormalization y = z .* out_std + out_mean folds into the upstream.
  const Eigen::MatrixXd up_net = upstream.cwiseProduct(model.out_norm.std);
  const Eigen::MatrixXd grad_in =
      net_backward(model, cache, up_net, &g.wrt_params);
  // Input normalization u_norm = (u - mean) / std contributes 1/std.
  g.wrt_command =
      grad_in.col(0).head(model.command_dim).cwiseQuotient(model.in_norm.std);
  g.wrt_latent = grad_in.col(0).tail(model.latent_dim);
  return g;
}

std::vector<ParamView> param_views(MlpModel& model) {
  std::vector<ParamView> views;
  views.reserve(model.weights.size() + model.biases.size());
  for (auto& w : model.weights) views.emplace_back(w.data(), w.size());
  for (auto& b : model.biases) views.emplace_back(b.data(), b.size());
  return views;
}

std::vector<ConstParamView> grad_views(const ParamGrads& grads) {
  std::vector<ConstParamView> views;
  views.reserve(grads.weights.size() + grads.biases.size());
  for (const auto& w : grads.weights) views.emplace_back(w.data(), w.size());
  for (const auto& b : grads.biases) views.emplace_back(b.data(), b.size());
  return views;
}

}  // namespace tbnpb
