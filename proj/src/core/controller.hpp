#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "mlp.hpp"

namespace tbnpb {

// Constraint term on the optimized command: none, stay near an anchor
// command, or hold a masked subset of joints at anchor values.
struct AnchorConstraint {
  Eigen::VectorXd anchor_deg;
};
struct FreezeConstraint {
  Eigen::ArrayXd mask;  // 1 = frozen joint, 0 = free
  Eigen::VectorXd anchor_deg;
};
using CommandConstraint =
    std::variant<std::monostate, AnchorConstraint, FreezeConstraint>;

struct JointLimits {
  Eigen::VectorXd min_deg;
  Eigen::VectorXd max_deg;
};

struct ControllerConfig {
  double gamma_max = 0.5;
  int n_line = 30;   // candidate step sizes, uniform over [0, gamma_max]
  int n_epochs = 10;
  double alpha = 0.0;
  CommandConstraint constraint{};
  // when set, every candidate is clamped before evaluation
  std::optional<JointLimits> limits;
  // also evaluate candidates along +gradient (off by default; the gamma=0
  // anchor keeps the search monotone either way)
  bool include_ascent = false;

  void validate() const {
    require(gamma_max > 0.0, ErrorCode::invalid_argument,
            "gamma_max must be positive");
    require(n_line >= 2, ErrorCode::invalid_argument, "n_line must be >= 2");
    require(n_epochs >= 0, ErrorCode::invalid_argument,
            "n_epochs must be >= 0");
  }
};

struct SolveStep {
  int epoch;
  double gamma;
  double loss;
  double position_error_mm;
};

struct SolveResult {
  Eigen::VectorXd command_deg;
  double loss = 0.0;
  std::vector<SolveStep> log;
};

// The estimator is the plain model evaluation.
inline Eigen::Vector3d estimate_tip(const MlpModel& model,
                                    const Eigen::VectorXd& u_deg,
                                    const Eigen::VectorXd& p) {
  return forward(model, u_deg, p);
}

// Composite loss |x_est - x_ref|_2 + alpha * L_const and its gradient in
// command space.
double command_loss(const MlpModel& model, const Eigen::VectorXd& p,
                    const Eigen::VectorXd& u_deg, const Eigen::Vector3d& x_ref,
                    const ControllerConfig& cfg);
Eigen::VectorXd command_loss_gradient(const MlpModel& model,
                                      const Eigen::VectorXd& p,
                                      const Eigen::VectorXd& u_deg,
                                      const Eigen::Vector3d& x_ref,
                                      const ControllerConfig& cfg);

// Gradient descent in command space with a per-epoch line search over the
// step size. The gamma=0 candidate guarantees the loss never increases.
SolveResult optimize_command(const MlpModel& model, const Eigen::VectorXd& p,
                             const Eigen::VectorXd& u_cur,
                             const Eigen::Vector3d& x_ref,
                             const ControllerConfig& cfg);

}  // namespace tbnpb
