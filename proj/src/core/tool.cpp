#include "tool.hpp"

#include <cmath>

namespace tbnpb {

ToolModel normal_duster() { return ToolModel{}; }

ToolModel connected_duster() {
  ToolModel t;
  t.compliance = 0.3;
  t.extension_mm = 250.0;
  return t;
}

Eigen::Vector3d stick_direction_hand(const GraspTruth& grasp) {
  const Eigen::Vector3d grasp_axis(1, 0, 0);
  return rotation_about(Eigen::Vector3d(0, 0, 1), grasp.psi_tool_deg * kDegToRad) *
         rotation_about(Eigen::Vector3d(0, 1, 0), grasp.phi_tool_deg * kDegToRad) *
         grasp_axis;
}

Eigen::Vector3d tool_tip_from_hand(const Pose& hand, const GraspTruth& grasp,
                                   const ToolModel& tool) {
  grasp.validate();
  tool.validate();
  Eigen::Vector3d dir = hand.rotation * stick_direction_hand(grasp);
  if (tool.compliance > 0.0) {
    // elevation above the world horizontal plane; sin(elevation) = dir.z
    const double horiz = std::hypot(dir.x(), dir.y());
    const double elevation = std::atan2(dir.z(), horiz);
    const double bent = elevation - tool.compliance * dir.z();
    // degenerate vertical stick: bend azimuth is undefined, use world +x
    const Eigen::Vector3d h_dir =
        horiz > 1e-12 ? Eigen::Vector3d(dir.x() / horiz, dir.y() / horiz, 0)
                      : Eigen::Vector3d(1, 0, 0);
    dir = std::cos(bent) * h_dir + std::sin(bent) * Eigen::Vector3d(0, 0, 1);
  }
  return hand.position + grasp.l_tool_mm * dir + tool.droop_mm;
}

Eigen::Vector3d tool_tip(const ArmModel& arm, const Eigen::VectorXd& u_deg,
                         const GraspTruth& grasp, const ToolModel& tool) {
  return tool_tip_from_hand(fk_hand(arm, u_deg), grasp, tool);
}

}  // namespace tbnpb
