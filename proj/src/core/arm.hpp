#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "error.hpp"

namespace tbnpb {

inline constexpr double kDegToRad = 0.017453292519943295;
inline constexpr double kRadToDeg = 57.29577951308232;

struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // mm
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
};

// Revolute joint: rotation about `axis`, then a fixed translation to the
// next joint expressed in the rotated frame.
struct Joint {
  Eigen::Vector3d axis;
  Eigen::Vector3d link_mm;
  double min_deg = -180.0;
  double max_deg = 180.0;
};

struct ArmModel {
  Eigen::Vector3d base_mm = Eigen::Vector3d::Zero();  // world origin -> joint 1
  std::vector<Joint> joints;
  Eigen::VectorXd home_deg;  // ready posture used to seed IK

  int dof() const { return static_cast<int>(joints.size()); }
  void validate() const;
  Eigen::VectorXd clamp_to_limits(const Eigen::VectorXd& u_deg) const;
  bool within_limits(const Eigen::VectorXd& u_deg, double tol_deg = 1e-9) const;
};

// 7-joint anthropomorphic preset: shoulder pan/lift/roll, elbow, forearm
// roll, wrist pitch/yaw, torso mounted 800 mm above the wheeled-base origin.
ArmModel pr2_like_arm();

// 5-joint preset without the two wrist joints.
ArmModel musashi_like_arm();

Pose fk_hand(const ArmModel& arm, const Eigen::VectorXd& u_deg);

// Uniform joint-angle samples within limits; same seed, same sequence.
std::vector<Eigen::VectorXd> sample_commands(const ArmModel& arm, int n,
                                             std::uint64_t seed);

struct IkOptions {
  double tol_mm = 1.0;
  int max_iters = 200;
  double damping = 0.01;            // DLS lambda, SI units internally
  double fd_step_rad = 1e-4;        // central-difference Jacobian step
  double orientation_weight = 0.0;  // mm of residual per rad of rotation error
  double max_step_rad = 0.2;        // per-iteration joint-step cap
};

struct IkResult {
  Eigen::VectorXd command_deg;
  double residual_mm = 0.0;  // best position residual reached
  int iterations = 0;
  bool converged = false;
};

// Damped-least-squares IK on a numerically differentiated pose Jacobian.
// Always returns the best command found; converged=false carries the best
// residual when tol_mm was not reached within max_iters.
IkResult ik_hand(const ArmModel& arm, const Pose& target,
                 const Eigen::VectorXd& u_init_deg, const IkOptions& opt = {});

Eigen::Matrix3d rotation_about(const Eigen::Vector3d& axis, double angle_rad);

// Minimal rotation vector (angle*axis) taking `from` to `to`.
Eigen::Vector3d rotation_error(const Eigen::Matrix3d& from,
                               const Eigen::Matrix3d& to);

}  // namespace tbnpb
