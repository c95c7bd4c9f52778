#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace tbnpb {
namespace {

namespace fs = std::filesystem;

std::string out_file(const std::string& out_dir, const std::string& name) {
  fs::create_directories(out_dir);
  return (fs::path(out_dir) / name).string();
}

void write_num(std::ofstream& f, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  f << buf;
}

GraspTruth grasp_from_vec(const std::vector<double>& v, const std::string& key) {
  require(v.size() == 3, ErrorCode::parse_failure,
          "config key '" + key + "' must be 'l,phi,psi'");
  GraspTruth g{v[0], v[1], v[2]};
  g.validate();
  return g;
}

double tip_noise_sigma(const Config& cfg) {
  return cfg.get_num("noise.tip_sigma", 0.0);
}

Eigen::Vector3d noisy(const Eigen::Vector3d& tip, double sigma, Rng& rng) {
  if (sigma <= 0.0) return tip;
  return tip + sigma * Eigen::Vector3d(rng.gauss(), rng.gauss(), rng.gauss());
}

void write_loss_csv(const std::string& path,
                    const std::vector<EpochLoss>& history) {
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), ErrorCode::io_failure, "cannot open " + path);
  f << "epoch,mse\n";
  for (const auto& e : history) {
    f << e.epoch << ',';
    write_num(f, e.mse);
    f << '\n';
  }
}

void write_solve_log(const std::string& path, const SolveResult& solved) {
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), ErrorCode::io_failure, "cannot open " + path);
  f << "epoch,chosen_gamma,loss,position_error_mm\n";
  for (const auto& s : solved.log) {
    f << s.epoch << ',';
    write_num(f, s.gamma);
    f << ',';
    write_num(f, s.loss);
    f << ',';
    write_num(f, s.position_error_mm);
    f << '\n';
  }
}

void write_latents_csv(const std::string& path,
                       const std::vector<LatentEntry>& latents) {
  std::ofstream f(path, std::ios::trunc);
  require(f.good(), ErrorCode::io_failure, "cannot open " + path);
  const auto dim = latents.empty() ? 0 : latents.front().code.size();
  f << "grasp_id";
  for (Eigen::Index i = 1; i <= dim; ++i) f << ",p_" << i;
  f << '\n';
  for (const auto& e : latents) {
    f << e.grasp_id;
    for (Eigen::Index i = 0; i < e.code.size(); ++i) {
      f << ',';
      write_num(f, e.code[i]);
    }
    f << '\n';
  }
}

TrainRunResult finish_training(const Config& cfg, const TrainSet& data,
                               TrainResult&& trained, double wall_time_s,
                               std::uint64_t seed, const std::string& out_dir,
                               const std::string& model_name,
                               const std::string& suffix) {
  TrainRunResult out;
  out.wall_time_s = wall_time_s;
  out.initial_mse = trained.loss_history.front().mse;
  out.final_mse = trained.loss_history.back().mse;
  out.train_rmse_mm = dataset_rmse_mm(trained.model, data, trained.latents);

  out.model_path = out_file(out_dir, model_name);
  save_model(out.model_path, trained.model, trained.latents);
  write_loss_csv(out_file(out_dir, "loss" + suffix + ".csv"),
                 trained.loss_history);
  write_latents_csv(out_file(out_dir, "latents" + suffix + ".csv"),
                    trained.latents);

  // Held-out estimation error on freshly sampled commands, when the grid in
  // the config matches the grouping of the training data.
  const auto grid = grid_from_config(cfg);
  if (grid.size() == data.groups.size()) {
    const ArmModel arm = arm_from_config(cfg);
    if (arm.dof() == trained.model.command_dim) {
      const ToolModel tool = tool_from_config(cfg);
      const int n_held =
          static_cast<int>(cfg.get_int("train.heldout_per_grasp", 200));
      const TrainSet held = collect_sim(arm, tool, grid, n_held,
                                        mix_seed(seed, 0xeeee),
                                        trained.model.latent_dim);
      out.heldout_rmse_mm = dataset_rmse_mm(trained.model, held, trained.latents);
    }
  }

  std::ofstream f(out_file(out_dir, "train_summary" + suffix + ".csv"),
                  std::ios::trunc);
  f << "initial_mse,final_mse,train_rmse_mm,heldout_rmse_mm,wall_time_s\n";
  write_num(f, out.initial_mse);
  f << ',';
  write_num(f, out.final_mse);
  f << ',';
  write_num(f, out.train_rmse_mm);
  f << ',';
  write_num(f, out.heldout_rmse_mm);
  f << ',';
  write_num(f, out.wall_time_s);
  f << '\n';
  return out;
}

}  // namespace

int grid_index_of(const std::vector<GraspTruth>& grid, const GraspTruth& g) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i].l_tool_mm - g.l_tool_mm) < 1e-9 &&
        std::abs(grid[i].phi_tool_deg - g.phi_tool_deg) < 1e-9 &&
        std::abs(grid[i].psi_tool_deg - g.psi_tool_deg) < 1e-9)
      return static_cast<int>(i);
  }
  return -1;
}

GenDataResult run_gen_data(const Config& cfg, std::uint64_t seed,
                           const std::string& out_dir) {
  const ArmModel arm = arm_from_config(cfg);
  const ToolModel tool = tool_from_config(cfg);
  const auto grid = grid_from_config(cfg);
  TrainSet set = collect_sim(arm, tool, grid, samples_per_grasp(cfg), seed,
                             static_cast<int>(cfg.get_int("train.latent_dim", 2)));

  const double sigma = tip_noise_sigma(cfg);
  if (sigma > 0.0) {
    Rng rng(mix_seed(seed, 0x707));
    for (auto& g : set.groups)
      for (auto& tip : g.tips_mm) tip = noisy(tip, sigma, rng);
  }

  GenDataResult out;
  out.csv_path = out_file(out_dir, "dataset.csv");
  save_csv(set, out.csv_path);
  out.n_groups = set.groups.size();
  out.n_samples = set.total_samples();
  return out;
}

TrainRunResult run_train(const Config& cfg, std::uint64_t seed,
                         const std::string& data_csv,
                         const std::string& out_dir) {
  const TrainSet data = load_csv(data_csv);
  TrainOptions opt = train_from_config(cfg);
  opt.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult trained = train_offline(data, opt);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return finish_training(cfg, data, std::move(trained), wall, seed, out_dir,
                         "model.tbnpb", "");
}

TrainRunResult run_finetune(const Config& cfg, std::uint64_t seed,
                            const std::string& model_in,
                            const std::string& data_csv,
                            const std::string& out_dir) {
  const ModelFile base = load_model(model_in);
  const TrainSet data = load_csv(data_csv);
  TrainOptions opt = train_from_config(cfg);
  opt.batch_size = static_cast<int>(cfg.get_int("finetune.batch_size", 30));
  opt.epochs = static_cast<int>(cfg.get_int("finetune.epochs", 100));
  opt.refit_normalization = cfg.get_bool("finetune.refit_norm", false);
  opt.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  TrainResult trained = finetune(base.model, data, opt);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return finish_training(cfg, data, std::move(trained), wall, seed, out_dir,
                         "model_finetuned.tbnpb", "_finetune");
}

AdaptRunSummary run_adapt(const Config& cfg, std::uint64_t seed,
                          const std::string& model_path,
                          const std::string& scenario,
                          const std::string& out_dir) {
  GraspTruth from, to;
  if (scenario == "1") {
    from = {500, 60, 0};
    to = {500, 0, 0};
  } else if (scenario == "2") {
    from = {700, 30, 0};
    to = {300, 30, 0};
  } else if (scenario == "config") {
    from = grasp_from_vec(cfg.get_vec("scenario.from"), "scenario.from");
    to = grasp_from_vec(cfg.get_vec("scenario.to"), "scenario.to");
  } else {
    fail(ErrorCode::invalid_argument,
         "unknown scenario '" + scenario + "' (expected 1, 2 or config)");
  }

  const ModelFile mf = load_model(model_path);
  const ArmModel arm = arm_from_config(cfg);
  require(arm.dof() == mf.model.command_dim, ErrorCode::dimension_mismatch,
          "arm and model command dimensions differ");
  const ToolModel tool = tool_from_config(cfg);
  const auto grid = grid_from_config(cfg);

  const int from_idx = grid_index_of(grid, from);
  const int to_idx = grid_index_of(grid, to);
  require(from_idx >= 0 && to_idx >= 0, ErrorCode::invalid_argument,
          "scenario grasp states must be part of the training grid");
  const Eigen::VectorXd* from_code =
      find_latent(mf.latents, static_cast<std::uint32_t>(from_idx));
  const Eigen::VectorXd* to_code =
      find_latent(mf.latents, static_cast<std::uint32_t>(to_idx));
  require(from_code && to_code, ErrorCode::invalid_argument,
          "model file lacks latent codes for the scenario grasp states");

  TrajectoryOptions topt = trajectory_from_config(cfg);
  topt.nominal_grasp = from;
  const auto steps = duster_trajectory(arm, topt);
  const int n_steps = static_cast<int>(steps.size());
  const int switch_step = static_cast<int>(
      cfg.get_int("adapt_run.switch_step", n_steps / 2));
  require(switch_step >= 0 && switch_step < n_steps,
          ErrorCode::invalid_argument, "switch_step outside the trajectory");

  const AdaptParams params = adapt_from_config(cfg);
  OnlineBuffer buffer(params.n_max, params.c_collect_deg);
  LatentUpdater updater(params, mf.model.latent_dim);

  Eigen::VectorXd p = *from_code;
  if (cfg.get_str("adapt_run.p_init", "trained") == "zero")
    p = Eigen::VectorXd::Zero(mf.model.latent_dim);

  const double sigma = tip_noise_sigma(cfg);
  Rng noise_rng(mix_seed(seed, 0x404));

  AdaptRunSummary summary;
  summary.n_steps = n_steps;
  summary.switch_step = switch_step;
  summary.log_path = out_file(out_dir, "adapt_" + scenario + ".csv");

  std::ofstream log(summary.log_path, std::ios::trunc);
  require(log.good(), ErrorCode::io_failure, "cannot open " + summary.log_path);
  log << "step,time_s,switched,stored,buffer_size";
  for (int i = 1; i <= mf.model.latent_dim; ++i) log << ",p_" << i;
  log << ",buffer_rmse_mm,est_err_mm,dist_to_from,dist_to_to\n";

  std::vector<double> est_errors;
  int stored_post_switch = 0;
  int post_window_start = -1;

  for (int t = 0; t < n_steps; ++t) {
    const bool switched = t >= switch_step;
    const GraspTruth& truth = switched ? to : from;
    const Eigen::VectorXd& u = steps[static_cast<std::size_t>(t)].command_deg;

    const Eigen::Vector3d tip_true = tool_tip(arm, u, truth, tool);
    const Eigen::Vector3d tip_obs = noisy(tip_true, sigma, noise_rng);
    const Eigen::Vector3d tip_est = forward(mf.model, u, p);
    const double est_err = (tip_est - tip_true).norm();
    est_errors.push_back(est_err);

    const bool stored = buffer.observe(u, tip_obs);
    if (stored) {
      p = updater.update(mf.model, buffer, p);
      if (switched) {
        ++stored_post_switch;
        summary.dist_to_new_code.push_back((p - *to_code).norm());
        // the window covers every step whose post-switch sample count has
        // reached the buffer capacity, this one included
        if (stored_post_switch >= buffer.capacity() && post_window_start < 0)
          post_window_start = t;
      }
    }

    log << t << ',';
    write_num(log, steps[static_cast<std::size_t>(t)].time_s);
    log << ',' << (switched ? 1 : 0) << ',' << (stored ? 1 : 0) << ','
        << buffer.size();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      log << ',';
      write_num(log, p[i]);
    }
    log << ',';
    write_num(log, buffer.empty() ? -1.0 : buffer_rmse_mm(mf.model, buffer, p));
    log << ',';
    write_num(log, est_err);
    log << ',';
    write_num(log, (p - *from_code).norm());
    log << ',';
    write_num(log, (p - *to_code).norm());
    log << '\n';
  }

  const int pre_end = std::min(switch_step + params.n_thre, n_steps);
  summary.pre_adapt_mean_mm = windowed_mean(
      est_errors, static_cast<std::size_t>(switch_step),
      static_cast<std::size_t>(pre_end));
  if (post_window_start >= 0 && post_window_start < n_steps) {
    summary.post_window_reached = true;
    summary.post_adapt_mean_mm = windowed_mean(
        est_errors, static_cast<std::size_t>(post_window_start));
  }
  return summary;
}

ControlRunSummary run_control(const Config& cfg, std::uint64_t seed,
                              const std::string& model_path,
                              const std::string& mode,
                              const std::string& out_dir) {
  require(mode == "update_p" || mode == "update_w" || mode == "frozen",
          ErrorCode::invalid_argument,
          "unknown mode '" + mode + "' (expected update_p, update_w or frozen)");

  const ModelFile mf = load_model(model_path);
  MlpModel model = mf.model;  // update_w mutates this copy
  const ArmModel arm = arm_from_config(cfg);
  require(arm.dof() == model.command_dim, ErrorCode::dimension_mismatch,
          "arm and model command dimensions differ");
  const ToolModel tool = tool_from_config(cfg);
  const auto grid = grid_from_config(cfg);

  const GraspTruth nominal = grasp_from_vec(
      cfg.get_vec("control.nominal", {500, 30, 0}), "control.nominal");
  const GraspTruth true_grasp = grasp_from_vec(
      cfg.get_vec("control.true_grasp", {500, 60, 0}), "control.true_grasp");
  const int nominal_idx = grid_index_of(grid, nominal);
  require(nominal_idx >= 0, ErrorCode::invalid_argument,
          "control.nominal grasp must be part of the training grid");
  const Eigen::VectorXd* nominal_code =
      find_latent(mf.latents, static_cast<std::uint32_t>(nominal_idx));
  require(nominal_code != nullptr, ErrorCode::invalid_argument,
          "model file lacks a latent code for the nominal grasp");

  TrajectoryOptions topt = trajectory_from_config(cfg);
  topt.nominal_grasp = nominal;
  const auto steps = duster_trajectory(arm, topt);

  // Same tip trajectory under a different rotational constraint, so the
  // replay visits a completely different joint-command sequence.
  TrajectoryOptions replay_opt = topt;
  replay_opt.auto_reference = false;
  replay_opt.reference_mm = resolved_reference(topt);
  replay_opt.auto_hand_pitch = false;
  replay_opt.hand_pitch_deg = resolved_hand_pitch(topt) +
                              cfg.get_num("control.replay_pitch_offset", 15.0);
  replay_opt.hand_yaw_deg = cfg.get_num("control.replay_hand_yaw", -15.0);
  const auto replay_steps = duster_trajectory(arm, replay_opt);

  const AdaptParams params = adapt_from_config(cfg);
  OnlineBuffer buffer(params.n_max, params.c_collect_deg);
  LatentUpdater latent_updater(params, model.latent_dim);
  WeightUpdater weight_updater(params, model);

  ControllerConfig ctrl = controller_from_config(cfg);
  JointLimits limits;
  limits.min_deg.resize(arm.dof());
  limits.max_deg.resize(arm.dof());
  for (int i = 0; i < arm.dof(); ++i) {
    limits.min_deg[i] = arm.joints[i].min_deg;
    limits.max_deg[i] = arm.joints[i].max_deg;
  }
  ctrl.limits = limits;

  const double sigma = tip_noise_sigma(cfg);
  Rng noise_rng(mix_seed(seed, 0x505));

  ControlRunSummary summary;
  summary.mode = mode;
  summary.n_steps = static_cast<int>(steps.size());
  summary.log_path = out_file(out_dir, "control_" + mode + ".csv");

  std::ofstream log(summary.log_path, std::ios::trunc);
  require(log.good(), ErrorCode::io_failure, "cannot open " + summary.log_path);
  log << "phase,step,time_s,err_mm,loss,stored,buffer_size";
  for (int i = 1; i <= model.latent_dim; ++i) log << ",p_" << i;
  log << '\n';

  Eigen::VectorXd p = *nominal_code;
  std::vector<double> phase1_errors;
  int stored_count = 0;
  int adapted_window_start = -1;

  const auto solve_log_step = static_cast<std::size_t>(
      cfg.get_int("control.solve_log_step", 0));

  Eigen::VectorXd u_cur = steps.front().command_deg;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    ctrl.constraint =
        AnchorConstraint{steps[t].command_deg};  // stay near u_orig
    const SolveResult solved =
        optimize_command(model, p, u_cur, steps[t].tip_target_mm, ctrl);
    if (t == solve_log_step)
      write_solve_log(out_file(out_dir, "solve_log_" + mode + ".csv"), solved);
    const Eigen::VectorXd& u_opt = solved.command_deg;

    const Eigen::Vector3d tip_true = tool_tip(arm, u_opt, true_grasp, tool);
    const Eigen::Vector3d tip_obs = noisy(tip_true, sigma, noise_rng);
    const double err = (tip_true - steps[t].tip_target_mm).norm();
    phase1_errors.push_back(err);

    const bool stored = buffer.observe(u_opt, tip_obs);
    if (stored) {
      ++stored_count;
      if (mode == "update_p") p = latent_updater.update(model, buffer, p);
      else if (mode == "update_w")
        weight_updater.update(model, buffer, p);
      if (stored_count >= buffer.capacity() && adapted_window_start < 0)
        adapted_window_start = static_cast<int>(t) + 1;
    }

    log << "1," << t << ',';
    write_num(log, steps[t].time_s);
    log << ',';
    write_num(log, err);
    log << ',';
    write_num(log, solved.loss);
    log << ',' << (stored ? 1 : 0) << ',' << buffer.size();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      log << ',';
      write_num(log, p[i]);
    }
    log << '\n';
    u_cur = u_opt;
  }

  // Generalization phase: updaters stopped, different u_orig sequence.
  std::vector<double> replay_errors;
  u_cur = replay_steps.front().command_deg;
  for (std::size_t t = 0; t < replay_steps.size(); ++t) {
    ctrl.constraint = AnchorConstraint{replay_steps[t].command_deg};
    const SolveResult solved = optimize_command(
        model, p, u_cur, replay_steps[t].tip_target_mm, ctrl);
    const Eigen::Vector3d tip_true =
        tool_tip(arm, solved.command_deg, true_grasp, tool);
    const double err = (tip_true - replay_steps[t].tip_target_mm).norm();
    replay_errors.push_back(err);

    log << "2," << t << ',';
    write_num(log, replay_steps[t].time_s);
    log << ',';
    write_num(log, err);
    log << ',';
    write_num(log, solved.loss);
    log << ",0," << buffer.size();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      log << ',';
      write_num(log, p[i]);
    }
    log << '\n';
    u_cur = solved.command_deg;
  }

  summary.initial_mean_mm = windowed_mean(
      phase1_errors, 0, static_cast<std::size_t>(params.n_thre));
  if (adapted_window_start >= 0 &&
      adapted_window_start < static_cast<int>(phase1_errors.size())) {
    summary.adapted_window_reached = true;
    summary.adapted_mean_mm = windowed_mean(
        phase1_errors, static_cast<std::size_t>(adapted_window_start));
  }
  summary.replay_mean_mm = windowed_mean(replay_errors, 0);
  return summary;
}

PbMapResult run_pb_map(const Config& cfg, const std::string& model_path,
                       const std::string& out_dir) {
  const ModelFile mf = load_model(model_path);
  require(mf.latents.size() >= 2, ErrorCode::invalid_argument,
          "model file holds fewer than 2 latent codes");

  std::vector<LatentEntry> latents = mf.latents;
  std::sort(latents.begin(), latents.end(),
            [](const LatentEntry& a, const LatentEntry& b) {
              return a.grasp_id < b.grasp_id;
            });
  std::vector<Eigen::VectorXd> points;
  points.reserve(latents.size());
  for (const auto& e : latents) points.push_back(e.code);

  PbMapResult out;
  out.pca = pca_2d(points);

  const auto grid = grid_from_config(cfg);
  out.csv_path = out_file(out_dir, "pb_map.csv");
  std::ofstream f(out.csv_path, std::ios::trunc);
  require(f.good(), ErrorCode::io_failure, "cannot open " + out.csv_path);
  f << "grasp_id,pc1,pc2,l_tool,phi_tool,psi_tool\n";
  for (std::size_t i = 0; i < latents.size(); ++i) {
    PbMapRow row;
    row.grasp_id = latents[i].grasp_id;
    row.pc1 = out.pca.projections(static_cast<Eigen::Index>(i), 0);
    row.pc2 = out.pca.projections(static_cast<Eigen::Index>(i), 1);
    f << row.grasp_id << ',';
    write_num(f, row.pc1);
    f << ',';
    write_num(f, row.pc2);
    if (row.grasp_id < grid.size()) {
      row.labeled = true;
      row.label = grid[row.grasp_id];
      f << ',';
      write_num(f, row.label.l_tool_mm);
      f << ',';
      write_num(f, row.label.phi_tool_deg);
      f << ',';
      write_num(f, row.label.psi_tool_deg);
    } else {
      f << ",,,";
    }
    f << '\n';
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace tbnpb
