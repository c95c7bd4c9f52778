#pragma once

#include <Eigen/Dense>

#include "arm.hpp"

namespace tbnpb {

// Simulator-only ground truth of how the tool sits in the hand: distance
// from the hand to the stick tip along the grasp axis, and the two grasp
// angles. The learned model never sees these.
struct GraspTruth {
  double l_tool_mm = 500.0;
  double phi_tool_deg = 0.0;  // rotation about the hand y-axis, applied first
  double psi_tool_deg = 0.0;  // rotation about the hand z-axis, applied second

  void validate() const {
    require(l_tool_mm >= 0.0, ErrorCode::invalid_argument,
            "l_tool must be non-negative");
    require(std::abs(phi_tool_deg) <= 90.0 && std::abs(psi_tool_deg) <= 90.0,
            ErrorCode::invalid_argument, "grasp angles must be within +-90 deg");
  }
};

struct ToolModel {
  Eigen::Vector3d droop_mm{0, 0, -100};  // cloth hanging from the stick tip
  double compliance = 0.0;               // kappa; 0 reproduces a rigid stick
  // preset geometry, informational
  double stick_mm = 500.0;
  double cloth_mm = 200.0;
  double extension_mm = 0.0;

  void validate() const {
    require(compliance >= 0.0, ErrorCode::invalid_argument,
            "compliance must be non-negative");
  }
};

ToolModel normal_duster();
ToolModel connected_duster();

// Unit stick direction in the hand frame: grasp axis +x rotated by phi about
// y, then by psi about z.
Eigen::Vector3d stick_direction_hand(const GraspTruth& grasp);

// Tip for a given hand pose: the stick extends l_tool along the (possibly
// bent) direction, then the cloth droop offset is added in the world frame.
// Compliance pitches the stick down by kappa*sin(elevation) radians.
Eigen::Vector3d tool_tip_from_hand(const Pose& hand, const GraspTruth& grasp,
                                   const ToolModel& tool);

Eigen::Vector3d tool_tip(const ArmModel& arm, const Eigen::VectorXd& u_deg,
                         const GraspTruth& grasp, const ToolModel& tool);

}  // namespace tbnpb
