#pragma once

#include <vector>

#include "arm.hpp"
#include "tool.hpp"

namespace tbnpb {

// Scripted duster-shaking motion: from a reference tip point, step 100 mm in
// y, dip (+200, -200) mm in (x, z) and return, repeat; the y direction
// reverses once the cumulative offset from the reference exceeds y_span_mm.
// Tip targets are mapped to hand targets through a nominal grasp and a fixed
// nominal hand orientation, then realized as joint commands by IK.
struct TrajectoryOptions {
  Eigen::Vector3d reference_mm{800, -100, 1600};
  // with auto_reference the reference is derived from a fixed comfortable
  // hand anchor, so any nominal grasp yields the same reachable hand motion;
  // the default anchor maps the (500, 30) grasp to reference (800,-100,1600)
  bool auto_reference = true;
  Eigen::Vector3d hand_anchor_mm{800.0 - 250.0 * 1.7320508075688772, -100, 1450};
  int n_cycles = 30;  // one cycle = base point, dip, return
  double y_step_mm = 100.0;
  double y_span_mm = 500.0;
  Eigen::Vector2d dip_xz_mm{200, -200};
  GraspTruth nominal_grasp{500, 30, 0};
  ToolModel tool{};
  double hand_pitch_deg = -60.0;  // nominal hand orientation, pitch about world y
  // auto pitch keeps the grasped stick pointing 30 degrees below horizontal
  bool auto_hand_pitch = true;
  double hand_yaw_deg = 0.0;      // then yaw about world z
  double orientation_weight = 200.0;  // IK rotational constraint, mm per rad
  double rate_hz = 5.0;
  IkOptions ik{};
};

struct TrajectoryStep {
  double time_s = 0.0;
  Eigen::Vector3d tip_target_mm;
  Pose hand_target;
  Eigen::VectorXd command_deg;
};

double resolved_hand_pitch(const TrajectoryOptions& opt);
Eigen::Matrix3d nominal_hand_rotation(const TrajectoryOptions& opt);
Eigen::Vector3d resolved_reference(const TrajectoryOptions& opt);

// Throws no_convergence naming the step index if IK fails along the way.
std::vector<TrajectoryStep> duster_trajectory(const ArmModel& arm,
                                              const TrajectoryOptions& opt);

}  // namespace tbnpb
