#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tool.hpp"

namespace tbnpb {

// Training samples for one grasping state. All samples in a group share one
// latent code; the grasp ground truth is only present for simulator-built
// sets and is never serialized.
struct GraspGroup {
  std::uint32_t grasp_id = 0;
  std::optional<GraspTruth> grasp;
  std::vector<Eigen::VectorXd> commands_deg;
  std::vector<Eigen::Vector3d> tips_mm;
  Eigen::VectorXd latent;

  std::size_t size() const { return commands_deg.size(); }
};

struct TrainSet {
  std::vector<GraspGroup> groups;

  int command_dim() const;
  std::size_t total_samples() const;
  void validate() const;  // unique ids, consistent dims, latent shared per group
};

// n_per_grasp uniformly sampled commands per grasping state, with simulated
// tips; latents zero-initialized. Deterministic in the seed.
TrainSet collect_sim(const ArmModel& arm, const ToolModel& tool,
                     const std::vector<GraspTruth>& grasp_grid, int n_per_grasp,
                     std::uint64_t seed, int latent_dim = 2);

// Columns: grasp_id,u_1..u_n,x,y,z with a header row; values printed at 17
// significant digits so the round trip is lossless.
void save_csv(const TrainSet& set, const std::string& path);
TrainSet load_csv(const std::string& path);

}  // namespace tbnpb
