#include "setup.hpp"

namespace tbnpb {

Eigen::Vector3d vec3_from_config(const Config& cfg, const std::string& key,
                                 const Eigen::Vector3d& def) {
  if (!cfg.has(key)) return def;
  const auto v = cfg.get_vec(key);
  require(v.size() == 3, ErrorCode::parse_failure,
          "config key '" + key + "' must have 3 components");
  return Eigen::Vector3d(v[0], v[1], v[2]);
}

ArmModel arm_from_config(const Config& cfg) {
  const std::string preset = cfg.get_str("arm.preset", "pr2");
  if (preset == "pr2") return pr2_like_arm();
  if (preset == "musashi") return musashi_like_arm();
  require(preset == "custom", ErrorCode::invalid_argument,
          "unknown arm preset '" + preset + "'");

  ArmModel arm;
  arm.base_mm = vec3_from_config(cfg, "arm.base_offset", Eigen::Vector3d::Zero());
  for (int i = 1;; ++i) {
    const std::string prefix = "arm.joint" + std::to_string(i);
    if (!cfg.has(prefix + ".axis")) break;
    Joint j;
    j.axis = vec3_from_config(cfg, prefix + ".axis", Eigen::Vector3d::UnitZ());
    j.link_mm = vec3_from_config(cfg, prefix + ".link", Eigen::Vector3d::Zero());
    const auto limits = cfg.get_vec(prefix + ".limits");
    require(limits.size() == 2, ErrorCode::parse_failure,
            prefix + ".limits must be 'min,max'");
    j.min_deg = limits[0];
    j.max_deg = limits[1];
    const double n = j.axis.norm();
    require(n > 0, ErrorCode::invalid_argument, prefix + ".axis is zero");
    j.axis /= n;
    arm.joints.push_back(j);
  }
  require(!arm.joints.empty(), ErrorCode::invalid_argument,
          "custom arm defines no joints");
  if (cfg.has("arm.home")) {
    const auto home = cfg.get_vec("arm.home");
    require(home.size() == arm.joints.size(), ErrorCode::dimension_mismatch,
            "arm.home dimension mismatch");
    arm.home_deg = Eigen::Map<const Eigen::VectorXd>(
        home.data(), static_cast<Eigen::Index>(home.size()));
  } else {
    arm.home_deg.resize(arm.dof());
    for (int i = 0; i < arm.dof(); ++i)
      arm.home_deg[i] = 0.5 * (arm.joints[i].min_deg + arm.joints[i].max_deg);
  }
  arm.validate();
  return arm;
}

ToolModel tool_from_config(const Config& cfg) {
  const std::string preset = cfg.get_str("tool.preset", "normal");
  ToolModel tool;
  if (preset == "connected") tool = connected_duster();
  else
    require(preset == "normal", ErrorCode::invalid_argument,
            "unknown tool preset '" + preset + "'");
  tool.droop_mm = vec3_from_config(cfg, "tool.droop", tool.droop_mm);
  tool.compliance = cfg.get_num("tool.compliance", tool.compliance);
  tool.stick_mm = cfg.get_num("tool.stick", tool.stick_mm);
  tool.cloth_mm = cfg.get_num("tool.cloth", tool.cloth_mm);
  tool.extension_mm = cfg.get_num("tool.extension", tool.extension_mm);
  tool.validate();
  return tool;
}

std::vector<GraspTruth> grid_from_config(const Config& cfg) {
  const auto ls = cfg.get_vec("grid.l_tool", {300, 500, 700});
  const auto phis = cfg.get_vec("grid.phi_tool", {0, 30, 60});
  const auto psis = cfg.get_vec("grid.psi_tool", {0});
  require(!ls.empty() && !phis.empty() && !psis.empty(),
          ErrorCode::invalid_argument, "grasp grid is empty");
  std::vector<GraspTruth> grid;
  for (double l : ls)
    for (double phi : phis)
      for (double psi : psis) {
        GraspTruth g{l, phi, psi};
        g.validate();
        grid.push_back(g);
      }
  return grid;
}

TrainOptions train_from_config(const Config& cfg) {
  TrainOptions opt;
  opt.batch_size = static_cast<int>(cfg.get_int("train.batch_size", 300));
  opt.epochs = static_cast<int>(cfg.get_int("train.epochs", 300));
  opt.learning_rate = cfg.get_num("train.learning_rate", 1e-3);
  opt.cosine_lr_decay = cfg.get_bool("train.cosine_lr_decay", true);
  opt.latent_lr_scale = cfg.get_num("train.latent_lr_scale", 3.0);
  opt.latent_dim = static_cast<int>(cfg.get_int("train.latent_dim", 2));
  opt.refit_normalization = cfg.get_bool("train.refit_norm", false);
  if (cfg.has("train.hidden")) {
    opt.hidden_dims.clear();
    for (double h : cfg.get_vec("train.hidden"))
      opt.hidden_dims.push_back(static_cast<int>(h));
  }
  return opt;
}

int samples_per_grasp(const Config& cfg) {
  return static_cast<int>(cfg.get_int("train.samples_per_grasp", 1000));
}

AdaptParams adapt_from_config(const Config& cfg) {
  AdaptParams p;
  p.c_collect_deg = cfg.get_num("adapt.c_collect", 10.0);
  p.n_thre = static_cast<int>(cfg.get_int("adapt.n_thre", 10));
  p.n_epoch = static_cast<int>(cfg.get_int("adapt.n_epoch", 3));
  p.n_max = static_cast<int>(cfg.get_int("adapt.n_max", 20));
  p.latent_lr = cfg.get_num("adapt.learning_rate", 0.1);
  p.weight_lr = cfg.get_num("adapt.w_learning_rate", 0.01);
  p.momentum = cfg.get_num("adapt.momentum", 0.9);
  return p;
}

ControllerConfig controller_from_config(const Config& cfg) {
  ControllerConfig c;
  c.gamma_max = cfg.get_num("controller.gamma_max", 0.5);
  c.n_line = static_cast<int>(cfg.get_int("controller.n_line", 30));
  c.n_epochs = static_cast<int>(cfg.get_int("controller.n_epochs", 10));
  c.alpha = cfg.get_num("controller.alpha", 0.3);
  c.validate();
  return c;
}

TrajectoryOptions trajectory_from_config(const Config& cfg) {
  TrajectoryOptions opt;
  if (cfg.has("trajectory.reference")) {
    opt.auto_reference = false;
    opt.reference_mm = vec3_from_config(cfg, "trajectory.reference",
                                        opt.reference_mm);
  }
  opt.hand_anchor_mm =
      vec3_from_config(cfg, "trajectory.hand_anchor", opt.hand_anchor_mm);
  opt.n_cycles = static_cast<int>(cfg.get_int("trajectory.n_cycles", 30));
  opt.y_step_mm = cfg.get_num("trajectory.y_step", 100.0);
  opt.y_span_mm = cfg.get_num("trajectory.y_span", 500.0);
  if (cfg.has("trajectory.dip")) {
    const auto dip = cfg.get_vec("trajectory.dip");
    require(dip.size() == 2, ErrorCode::parse_failure,
            "trajectory.dip must be 'dx,dz'");
    opt.dip_xz_mm = Eigen::Vector2d(dip[0], dip[1]);
  }
  if (cfg.has("trajectory.hand_pitch")) {
    opt.auto_hand_pitch = false;
    opt.hand_pitch_deg = cfg.get_num("trajectory.hand_pitch", -60.0);
  }
  opt.hand_yaw_deg = cfg.get_num("trajectory.hand_yaw", 0.0);
  opt.orientation_weight = cfg.get_num("trajectory.orientation_weight", 200.0);
  opt.rate_hz = cfg.get_num("trajectory.rate_hz", 5.0);
  opt.tool = tool_from_config(cfg);
  return opt;
}

}  // namespace tbnpb
