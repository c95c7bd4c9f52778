#include "trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tbnpb {

double resolved_hand_pitch(const TrajectoryOptions& opt) {
  if (!opt.auto_hand_pitch) return opt.hand_pitch_deg;
  // point the nominal stick 30 degrees below horizontal
  return std::clamp(-30.0 - opt.nominal_grasp.phi_tool_deg, -85.0, 0.0);
}

Eigen::Matrix3d nominal_hand_rotation(const TrajectoryOptions& opt) {
  return rotation_about(Eigen::Vector3d(0, 0, 1), opt.hand_yaw_deg * kDegToRad) *
         rotation_about(Eigen::Vector3d(0, 1, 0),
                        resolved_hand_pitch(opt) * kDegToRad);
}

Eigen::Vector3d resolved_reference(const TrajectoryOptions& opt) {
  if (!opt.auto_reference) return opt.reference_mm;
  Pose anchor_hand;
  anchor_hand.position = opt.hand_anchor_mm;
  anchor_hand.rotation = nominal_hand_rotation(opt);
  return tool_tip_from_hand(anchor_hand, opt.nominal_grasp, opt.tool);
}

std::vector<TrajectoryStep> duster_trajectory(const ArmModel& arm,
                                              const TrajectoryOptions& opt) {
  require(opt.n_cycles >= 1, ErrorCode::invalid_argument,
          "trajectory needs at least one cycle");
  const Eigen::Matrix3d hand_rot = nominal_hand_rotation(opt);
  // Fixed hand orientation makes the tip a pure translation of the hand.
  Pose origin_hand;
  origin_hand.rotation = hand_rot;
  const Eigen::Vector3d tip_offset =
      tool_tip_from_hand(origin_hand, opt.nominal_grasp, opt.tool);
  const Eigen::Vector3d reference = resolved_reference(opt);

  // tip targets: base, dip, base per cycle; triangle wave in y
  std::vector<Eigen::Vector3d> targets;
  double y = 0.0, dir = 1.0;
  for (int c = 0; c < opt.n_cycles; ++c) {
    const Eigen::Vector3d base = reference + Eigen::Vector3d(0, y, 0);
    targets.push_back(base);
    targets.push_back(base + Eigen::Vector3d(opt.dip_xz_mm.x(), 0, opt.dip_xz_mm.y()));
    targets.push_back(base);
    if (std::abs(y + dir * opt.y_step_mm) > opt.y_span_mm) dir = -dir;
    y += dir * opt.y_step_mm;
  }

  IkOptions ik = opt.ik;
  ik.orientation_weight = opt.orientation_weight;

  std::vector<TrajectoryStep> steps;
  steps.reserve(targets.size());
  Eigen::VectorXd seed = arm.home_deg;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    TrajectoryStep step;
    step.time_s = static_cast<double>(i) / opt.rate_hz;
    step.tip_target_mm = targets[i];
    step.hand_target.position = targets[i] - tip_offset;
    step.hand_target.rotation = hand_rot;
    const IkResult res = ik_hand(arm, step.hand_target, seed, ik);
    if (!res.converged)
      fail(ErrorCode::no_convergence,
           "IK failed at trajectory step " + std::to_string(i) +
               " (best residual " + std::to_string(res.residual_mm) + " mm)");
    step.command_deg = res.command_deg;
    seed = res.command_deg;
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace tbnpb
