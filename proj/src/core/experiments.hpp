#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "setup.hpp"

namespace tbnpb {

// End-to-end experiment drivers behind the CLI subcommands. Every run is
// deterministic given (config, seed) and emits plain CSV artifacts.

struct GenDataResult {
  std::string csv_path;
  std::size_t n_groups = 0;
  std::size_t n_samples = 0;
};
GenDataResult run_gen_data(const Config& cfg, std::uint64_t seed,
                           const std::string& out_dir);

struct TrainRunResult {
  std::string model_path;
  double initial_mse = 0.0;
  double final_mse = 0.0;
  double train_rmse_mm = 0.0;
  double heldout_rmse_mm = -1.0;  // -1 when no held-out set could be built
  double wall_time_s = 0.0;
};
TrainRunResult run_train(const Config& cfg, std::uint64_t seed,
                         const std::string& data_csv,
                         const std::string& out_dir);
TrainRunResult run_finetune(const Config& cfg, std::uint64_t seed,
                            const std::string& model_in,
                            const std::string& data_csv,
                            const std::string& out_dir);

// Online-estimation scenario: stream the duster-shaking trajectory, switch
// the simulator's true grasp at switch_step, adapt the latent from the
// observations. Named scenarios "1" and "2" reproduce the published grasp
// changes; "config" reads scenario.from / scenario.to.
struct AdaptRunSummary {
  std::string log_path;
  int n_steps = 0;
  int switch_step = 0;
  // estimation error right after the switch, before adaptation catches up
  double pre_adapt_mean_mm = 0.0;
  // estimation error once >= 20 post-switch samples are buffered
  double post_adapt_mean_mm = 0.0;
  bool post_window_reached = false;
  // distance from the latent to the new grasp's trained code, recorded after
  // each post-switch update
  std::vector<double> dist_to_new_code;
};
AdaptRunSummary run_adapt(const Config& cfg, std::uint64_t seed,
                          const std::string& model_path,
                          const std::string& scenario,
                          const std::string& out_dir);

// Closed-loop control along the shaking trajectory with a mid-run grasp
// mismatch, followed by a replay of the same tip trajectory under a
// different rotational constraint with the online updater stopped.
struct ControlRunSummary {
  std::string log_path;
  std::string mode;
  int n_steps = 0;
  double initial_mean_mm = 0.0;   // before updates engage
  double adapted_mean_mm = 0.0;   // >= 20 samples buffered
  bool adapted_window_reached = false;
  double replay_mean_mm = 0.0;    // generalization phase
};
ControlRunSummary run_control(const Config& cfg, std::uint64_t seed,
                              const std::string& model_path,
                              const std::string& mode,
                              const std::string& out_dir);

struct PbMapRow {
  std::uint32_t grasp_id;
  double pc1, pc2;
  bool labeled = false;
  GraspTruth label;
};
struct PbMapResult {
  std::string csv_path;
  std::vector<PbMapRow> rows;
  Pca2d pca;
};
PbMapResult run_pb_map(const Config& cfg, const std::string& model_path,
                       const std::string& out_dir);

// Grid index of a grasp state, matched on (l, phi, psi).
int grid_index_of(const std::vector<GraspTruth>& grid, const GraspTruth& g);

}  // namespace tbnpb
