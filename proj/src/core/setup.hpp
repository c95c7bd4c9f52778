#pragma once

#include "adapt.hpp"
#include "config.hpp"
#include "controller.hpp"
#include "trainer.hpp"
#include "trajectory.hpp"

namespace tbnpb {

// Builders turning a parsed config into experiment objects. Every key has a
// default matching the PR2-style simulation study, so an empty config runs
// the standard pipeline.

// [arm] preset = pr2 | musashi, or a custom chain given as base_offset,
// joint<i>.axis / .link / .limits plus home.
ArmModel arm_from_config(const Config& cfg);

// [tool] droop, compliance, stick, cloth, extension
ToolModel tool_from_config(const Config& cfg);

// [grid] l_tool, phi_tool, psi_tool lists; the grid enumerates l (outer),
// phi, psi (inner) and grasp ids follow that order.
std::vector<GraspTruth> grid_from_config(const Config& cfg);

// [train] batch_size, epochs, learning_rate, latent_dim, samples_per_grasp,
// refit_norm, hidden widths
TrainOptions train_from_config(const Config& cfg);
int samples_per_grasp(const Config& cfg);

// [adapt] c_collect, n_thre, n_epoch, n_max, learning_rate, w_learning_rate
AdaptParams adapt_from_config(const Config& cfg);

// [controller] gamma_max, n_line, n_epochs, alpha
ControllerConfig controller_from_config(const Config& cfg);

// [trajectory] reference, n_cycles, y_step, y_span, dip, hand_pitch,
// hand_yaw, orientation_weight, rate_hz
TrajectoryOptions trajectory_from_config(const Config& cfg);

Eigen::Vector3d vec3_from_config(const Config& cfg, const std::string& key,
                                 const Eigen::Vector3d& def);

}  // namespace tbnpb
