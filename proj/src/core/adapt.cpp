#include "adapt.hpp"

namespace tbnpb {
namespace {

// Stacks the buffer into network inputs/targets with a shared latent.
void buffer_batch(const MlpModel& model, const OnlineBuffer& buffer,
                  const Eigen::VectorXd& p, Eigen::MatrixXd& in,
                  Eigen::MatrixXd& target_norm) {
  const auto n = static_cast<Eigen::Index>(buffer.size());
  Eigen::MatrixXd commands(model.command_dim, n);
  Eigen::MatrixXd latents(model.latent_dim, n);
  target_norm.resize(3, n);
  Eigen::Index i = 0;
  for (const auto& e : buffer.entries()) {
    commands.col(i) = e.command_deg;
    latents.col(i) = p;
    target_norm.col(i) = model.out_norm.normalize(e.tip_mm);
    ++i;
  }
  in = assemble_input(model, commands, latents);
}

}  // namespace

OnlineBuffer::OnlineBuffer(int capacity, double c_collect_deg)
    : capacity_(capacity), c_collect_deg_(c_collect_deg) {
  require(capacity >= 1, ErrorCode::invalid_argument,
          "buffer capacity must be >= 1");
}

bool OnlineBuffer::observe(const Eigen::VectorXd& u_deg,
                           const Eigen::Vector3d& tip_mm) {
  if (!entries_.empty()) {
    require(u_deg.size() == entries_.back().command_deg.size(),
            ErrorCode::dimension_mismatch, "command dimension changed");
    if ((u_deg - entries_.back().command_deg).norm() <= c_collect_deg_)
      return false;
  }
  entries_.push_back({u_deg, tip_mm});
  while (static_cast<int>(entries_.size()) > capacity_) entries_.pop_front();
  return true;
}

const Eigen::VectorXd& OnlineBuffer::last_stored_command() const {
  require(!entries_.empty(), ErrorCode::invalid_argument, "buffer is empty");
  return entries_.back().command_deg;
}

void OnlineBuffer::clear() { entries_.clear(); }

LatentUpdater::LatentUpdater(const AdaptParams& params, int latent_dim)
    : params_(params),
      optimizer_(momentum_sgd_config(params.latent_lr, params.momentum),
                 {latent_dim}) {}

Eigen::VectorXd LatentUpdater::update(const MlpModel& model,
                                      const OnlineBuffer& buffer,
                                      const Eigen::VectorXd& p) {
  require(p.size() == model.latent_dim, ErrorCode::dimension_mismatch,
          "latent dimension mismatch");
  if (static_cast<int>(buffer.size()) < params_.n_thre) return p;

  Eigen::VectorXd latent = p;
  const auto n = static_cast<double>(buffer.size());
  for (int epoch = 0; epoch < params_.n_epoch; ++epoch) {
    Eigen::MatrixXd in, target;
    buffer_batch(model, buffer, latent, in, target);
    ForwardCache cache;
    const Eigen::MatrixXd out = net_forward(model, in, &cache);
    const Eigen::MatrixXd upstream =
        (2.0 / (3.0 * n)) * (out - target);
    const Eigen::MatrixXd grad_in = net_backward(model, cache, upstream);
    const Eigen::VectorXd grad_p =
        grad_in.bottomRows(model.latent_dim).rowwise().sum();

    std::vector<ParamView> params{{latent.data(), latent.size()}};
    std::vector<ConstParamView> grads{{grad_p.data(), grad_p.size()}};
    optimizer_.step(params, grads);
  }
  return latent;
}

WeightUpdater::WeightUpdater(const AdaptParams& params, const MlpModel& shape)
    : params_(params),
      optimizer_(momentum_sgd_config(params.weight_lr, params.momentum),
                 [&] {
                   MlpModel tmp = shape;
                   return view_sizes(param_views(tmp));
                 }()) {}

void WeightUpdater::update(MlpModel& model, const OnlineBuffer& buffer,
                           const Eigen::VectorXd& p_fixed) {
  require(p_fixed.size() == model.latent_dim, ErrorCode::dimension_mismatch,
          "latent dimension mismatch");
  if (static_cast<int>(buffer.size()) < params_.n_thre) return;

  const auto n = static_cast<double>(buffer.size());
  ParamGrads grads = ParamGrads::zeros_like(model);
  for (int epoch = 0; epoch < params_.n_epoch; ++epoch) {
    Eigen::MatrixXd in, target;
    buffer_batch(model, buffer, p_fixed, in, target);
    ForwardCache cache;
    const Eigen::MatrixXd out = net_forward(model, in, &cache);
    const Eigen::MatrixXd upstream =
        (2.0 / (3.0 * n)) * (out - target);
    net_backward(model, cache, upstream, &grads);

    auto params = param_views(model);
    auto gviews = grad_views(grads);
    optimizer_.step(params, gviews);
  }
}

double buffer_mse(const MlpModel& model, const OnlineBuffer& buffer,
                  const Eigen::VectorXd& p) {
  require(!buffer.empty(), ErrorCode::invalid_argument, "buffer is empty");
  Eigen::MatrixXd in, target;
  buffer_batch(model, buffer, p, in, target);
  const Eigen::MatrixXd out = net_forward(model, in);
  return (out - target).squaredNorm() /
         (3.0 * static_cast<double>(buffer.size()));
}

double buffer_rmse_mm(const MlpModel& model, const OnlineBuffer& buffer,
                      const Eigen::VectorXd& p) {
  require(!buffer.empty(), ErrorCode::invalid_argument, "buffer is empty");
  double total = 0.0;
  for (const auto& e : buffer.entries())
    total += (forward(model, e.command_deg, p) - e.tip_mm).squaredNorm();
  return std::sqrt(total / static_cast<double>(buffer.size()));
}

}  // namespace tbnpb
