#include "arm.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <string>

#include "rng.hpp"

namespace tbnpb {

void ArmModel::validate() const {
  require(!joints.empty(), ErrorCode::invalid_argument, "arm has no joints");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    require(std::abs(joints[i].axis.norm() - 1.0) <= 1e-12,
            ErrorCode::invalid_argument,
            "joint " + std::to_string(i + 1) + " axis is not unit length");
    require(joints[i].min_deg < joints[i].max_deg, ErrorCode::invalid_argument,
            "joint " + std::to_string(i + 1) + " has empty limit range");
  }
  require(home_deg.size() == dof(), ErrorCode::dimension_mismatch,
          "home posture dimension mismatch");
}

Eigen::VectorXd ArmModel::clamp_to_limits(const Eigen::VectorXd& u_deg) const {
  require(u_deg.size() == dof(), ErrorCode::dimension_mismatch,
          "command dimension mismatch");
  Eigen::VectorXd out = u_deg;
  for (int i = 0; i < dof(); ++i)
    out[i] = std::clamp(out[i], joints[i].min_deg, joints[i].max_deg);
  return out;
}

bool ArmModel::within_limits(const Eigen::VectorXd& u_deg, double tol_deg) const {
  if (u_deg.size() != dof()) return false;
  for (int i = 0; i < dof(); ++i)
    if (u_deg[i] < joints[i].min_deg - tol_deg ||
        u_deg[i] > joints[i].max_deg + tol_deg)
      return false;
  return true;
}

Eigen::Matrix3d rotation_about(const Eigen::Vector3d& axis, double angle_rad) {
  return Eigen::AngleAxisd(angle_rad, axis).toRotationMatrix();
}

Eigen::Vector3d rotation_error(const Eigen::Matrix3d& from,
                               const Eigen::Matrix3d& to) {
  const Eigen::AngleAxisd aa(to * from.transpose());
  return aa.angle() * aa.axis();
}

ArmModel pr2_like_arm() {
  ArmModel arm;
  arm.base_mm = Eigen::Vector3d(0, 0, 800);
  const Eigen::Vector3d x(1, 0, 0), y(0, 1, 0), z(0, 0, 1);
  arm.joints = {
      {z, {100, 0, 200}, -70, 70},   // shoulder pan
      {y, {0, 0, 0}, -30, 80},       // shoulder lift
      {x, {400, 0, 0}, -45, 45},     // shoulder roll
      {y, {0, 0, 0}, -130, -30},     // elbow
      {x, {400, 0, 0}, -60, 60},     // forearm roll
      {y, {0, 0, 0}, -20, 80},       // wrist pitch
      {z, {150, 0, 0}, -70, 70},     // wrist yaw
  };
  arm.home_deg.resize(7);
  arm.home_deg << 0, 0, 0, -60, 0, 20, 0;
  arm.validate();
  return arm;
}

ArmModel musashi_like_arm() {
  ArmModel arm;
  arm.base_mm = Eigen::Vector3d(0, 0, 800);
  const Eigen::Vector3d x(1, 0, 0), y(0, 1, 0), z(0, 0, 1);
  arm.joints = {
      {z, {80, 0, 150}, -70, 70},    // shoulder pan
      {y, {0, 0, 0}, -30, 80},       // shoulder lift
      {x, {350, 0, 0}, -45, 45},     // shoulder roll
      {y, {0, 0, 0}, -130, -30},     // elbow
      {x, {350, 0, 0}, -60, 60},     // forearm roll
  };
  arm.home_deg.resize(5);
  arm.home_deg << 0, 0, 0, -60, 0;
  arm.validate();
  return arm;
}

Pose fk_hand(const ArmModel& arm, const Eigen::VectorXd& u_deg) {
  require(u_deg.size() == arm.dof(), ErrorCode::dimension_mismatch,
          "command has " + std::to_string(u_deg.size()) + " joints, arm has " +
              std::to_string(arm.dof()));
  Pose pose;
  pose.position = arm.base_mm;
  for (int i = 0; i < arm.dof(); ++i) {
    pose.rotation *= rotation_about(arm.joints[i].axis, u_deg[i] * kDegToRad);
    pose.position += pose.rotation * arm.joints[i].link_mm;
  }
  return pose;
}

std::vector<Eigen::VectorXd> sample_commands(const ArmModel& arm, int n,
                                             std::uint64_t seed) {
  require(n >= 1, ErrorCode::invalid_argument, "sample count must be >= 1");
  Rng rng(seed);
  std::vector<Eigen::VectorXd> commands;
  commands.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd u(arm.dof());
    for (int i = 0; i < arm.dof(); ++i)
      u[i] = rng.uniform(arm.joints[i].min_deg, arm.joints[i].max_deg);
    commands.push_back(std::move(u));
  }
  return commands;
}

namespace {

// Pose residual in SI units: position error in m, rotation error scaled by
// the orientation weight (converted to m/rad).
Eigen::VectorXd pose_residual(const Pose& current, const Pose& target,
                              double orientation_weight_mm) {
  Eigen::VectorXd r(6);
  r.head<3>() = (target.position - current.position) * 1e-3;
  r.tail<3>() = rotation_error(current.rotation, target.rotation) *
                (orientation_weight_mm * 1e-3);
  return r;
}

}  // namespace

IkResult ik_hand(const ArmModel& arm, const Pose& target,
                 const Eigen::VectorXd& u_init_deg, const IkOptions& opt) {
  require(u_init_deg.size() == arm.dof(), ErrorCode::dimension_mismatch,
          "IK seed dimension mismatch");
  const int n = arm.dof();
  const double fd_step_deg = opt.fd_step_rad * kRadToDeg;

  IkResult best;
  best.command_deg = arm.clamp_to_limits(u_init_deg);
  best.residual_mm =
      (target.position - fk_hand(arm, best.command_deg).position).norm();

  // The orientation constraint is soft: when the weighted compromise stops
  // improving the position residual, the weight is annealed away so the
  // primary position goal still converges.
  double ori_weight = opt.orientation_weight;
  int stalled = 0;

  Eigen::VectorXd u = best.command_deg;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    const Pose current = fk_hand(arm, u);
    const double pos_err_mm = (target.position - current.position).norm();
    if (pos_err_mm < best.residual_mm - 1e-9) {
      best.residual_mm = pos_err_mm;
      best.command_deg = u;
      stalled = 0;
    } else {
      ++stalled;
    }
    if ((stalled >= 20 || iter >= opt.max_iters / 2) && ori_weight > 0.0) {
      ori_weight *= 0.25;
      if (ori_weight < 1e-3 * opt.orientation_weight) ori_weight = 0.0;
      stalled = 0;
    }
    if (pos_err_mm < opt.tol_mm) {
      best.converged = true;
      best.iterations = iter;
      return best;
    }

    const Eigen::VectorXd r = pose_residual(current, target, ori_weight);
    Eigen::MatrixXd jac(6, n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd up = u, dn = u;
      up[j] += fd_step_deg;
      dn[j] -= fd_step_deg;
      const Eigen::VectorXd rp =
          pose_residual(fk_hand(arm, up), target, ori_weight);
      const Eigen::VectorXd rn =
          pose_residual(fk_hand(arm, dn), target, ori_weight);
      // residual decreases along the Jacobian: J = -d(residual)/d(theta)
      jac.col(j) = -(rp - rn) / (2.0 * opt.fd_step_rad);
    }

    Eigen::MatrixXd lhs = jac.transpose() * jac;
    lhs.diagonal().array() += opt.damping * opt.damping;
    Eigen::VectorXd step_rad = lhs.ldlt().solve(jac.transpose() * r);
    const double step_norm = step_rad.norm();
    if (step_norm > opt.max_step_rad)
      step_rad *= opt.max_step_rad / step_norm;

    u = arm.clamp_to_limits(u + step_rad * kRadToDeg);
  }

  const double final_err_mm =
      (target.position - fk_hand(arm, u).position).norm();
  if (final_err_mm < best.residual_mm) {
    best.residual_mm = final_err_mm;
    best.command_deg = u;
  }
  best.iterations = opt.max_iters;
  best.converged = best.residual_mm < opt.tol_mm;
  return best;
}

}  // namespace tbnpb
