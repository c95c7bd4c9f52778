#include "controller.hpp"

#include <cmath>
#include <string>

namespace tbnpb {
namespace {

constexpr double kNormFloor = 1e-12;  // |r| below this: direction gradient is 0

double constraint_value(const CommandConstraint& constraint,
                        const Eigen::VectorXd& u_deg) {
  if (const auto* a = std::get_if<AnchorConstraint>(&constraint))
    return (u_deg - a->anchor_deg).norm();
  if (const auto* fz = std::get_if<FreezeConstraint>(&constraint))
    return ((u_deg - fz->anchor_deg).array() * fz->mask).matrix().norm();
  return 0.0;
}

Eigen::VectorXd constraint_gradient(const CommandConstraint& constraint,
                                    const Eigen::VectorXd& u_deg) {
  if (const auto* a = std::get_if<AnchorConstraint>(&constraint)) {
    const Eigen::VectorXd d = u_deg - a->anchor_deg;
    const double n = d.norm();
    return n > kNormFloor ? Eigen::VectorXd(d / n)
                          : Eigen::VectorXd(Eigen::VectorXd::Zero(u_deg.size()));
  }
  if (const auto* fz = std::get_if<FreezeConstraint>(&constraint)) {
    const Eigen::VectorXd d =
        ((u_deg - fz->anchor_deg).array() * fz->mask).matrix();
    const double n = d.norm();
    if (n <= kNormFloor) return Eigen::VectorXd::Zero(u_deg.size());
    return ((d / n).array() * fz->mask).matrix();
  }
  return Eigen::VectorXd::Zero(u_deg.size());
}

Eigen::VectorXd clamp_candidate(const Eigen::VectorXd& u,
                                const std::optional<JointLimits>& limits) {
  if (!limits) return u;
  return u.cwiseMax(limits->min_deg).cwiseMin(limits->max_deg);
}

}  // namespace

double command_loss(const MlpModel& model, const Eigen::VectorXd& p,
                    const Eigen::VectorXd& u_deg, const Eigen::Vector3d& x_ref,
                    const ControllerConfig& cfg) {
  const double pos = (forward(model, u_deg, p) - x_ref).norm();
  return pos + cfg.alpha * constraint_value(cfg.constraint, u_deg);
}

Eigen::VectorXd command_loss_gradient(const MlpModel& model,
                                      const Eigen::VectorXd& p,
                                      const Eigen::VectorXd& u_deg,
                                      const Eigen::Vector3d& x_ref,
                                      const ControllerConfig& cfg) {
  const Eigen::Vector3d residual = forward(model, u_deg, p) - x_ref;
  const double n = residual.norm();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(u_deg.size());
  if (n > kNormFloor)
    grad = backward(model, u_deg, p, residual / n).wrt_command;
  if (cfg.alpha != 0.0)
    grad += cfg.alpha * constraint_gradient(cfg.constraint, u_deg);
  return grad;
}

SolveResult optimize_command(const MlpModel& model, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& u_cur,
                             const Eigen::Vector3d& x_ref,
                             const ControllerConfig& cfg) {
  cfg.validate();
  require(x_ref.allFinite(), ErrorCode::invalid_argument,
          "target tip is not finite");
  require(u_cur.size() == model.command_dim, ErrorCode::dimension_mismatch,
          "command dimension mismatch");

  SolveResult result;
  result.command_deg = clamp_candidate(u_cur, cfg.limits);
  result.loss = command_loss(model, p, result.command_deg, x_ref, cfg);
  require(std::isfinite(result.loss), ErrorCode::numeric_failure,
          "non-finite loss at epoch 0");

  for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    Eigen::VectorXd grad =
        command_loss_gradient(model, p, result.command_deg, x_ref, cfg);
    if (const auto* fz = std::get_if<FreezeConstraint>(&cfg.constraint)) {
      // frozen joints descend straight onto their anchors; the norm term is
      // non-smooth there and would otherwise veto every candidate
      grad = (grad.array() * (1.0 - fz->mask) +
              (result.command_deg - fz->anchor_deg).array() * fz->mask)
                 .matrix();
    }

    double best_loss = result.loss;  // gamma = 0 candidate
    Eigen::VectorXd best_u = result.command_deg;
    double best_gamma = 0.0;
    for (int j = 1; j < cfg.n_line; ++j) {
      const double gamma =
          cfg.gamma_max * static_cast<double>(j) / (cfg.n_line - 1);
      for (const double sign : {-1.0, +1.0}) {
        if (sign > 0 && !cfg.include_ascent) continue;
        const Eigen::VectorXd candidate =
            clamp_candidate(result.command_deg + sign * gamma * grad,
                            cfg.limits);
        const double loss = command_loss(model, p, candidate, x_ref, cfg);
        require(std::isfinite(loss), ErrorCode::numeric_failure,
                "non-finite loss at epoch " + std::to_string(epoch));
        if (loss < best_loss) {
          best_loss = loss;
          best_u = candidate;
          best_gamma = sign * gamma;
        }
      }
    }

    result.command_deg = best_u;
    result.loss = best_loss;
    result.log.push_back(
        {epoch, best_gamma, best_loss,
         (forward(model, result.command_deg, p) - x_ref).norm()});
  }
  return result;
}

}  // namespace tbnpb
