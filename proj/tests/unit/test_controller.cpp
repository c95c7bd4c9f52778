#include <doctest.h>

#include "core/controller.hpp"

using namespace tbnpb;

namespace {

MlpModel random_model(std::uint64_t seed) {
  MlpModel m = make_model(5, 2, {16, 16});
  Rng rng(seed);
  init_weights(m, rng);
  m.in_norm.mean = Eigen::VectorXd::Zero(5);
  m.in_norm.std = Eigen::VectorXd::Constant(5, 40.0);
  m.out_norm.mean << 700, 0, 1200;
  m.out_norm.std << 300, 300, 300;
  return m;
}

Eigen::VectorXd random_command(Rng& rng, int dim = 5) {
  Eigen::VectorXd u(dim);
  for (int i = 0; i < dim; ++i) u[i] = rng.uniform(-50, 50);
  return u;
}

}  // namespace

TEST_CASE("estimate_tip is the model forward pass") {
  const MlpModel m = random_model(1);
  Rng rng(2);
  const Eigen::VectorXd u = random_command(rng);
  const Eigen::VectorXd p = Eigen::Vector2d(0.3, -0.2);
  CHECK(estimate_tip(m, u, p) == forward(m, u, p));
}

TEST_CASE("an already-optimal command is returned unchanged with zero loss") {
  const MlpModel m = random_model(3);
  Rng rng(4);
  const Eigen::VectorXd u = random_command(rng);
  const Eigen::VectorXd p = Eigen::Vector2d(0.1, 0.5);
  const Eigen::Vector3d x_ref = estimate_tip(m, u, p);
  ControllerConfig cfg;
  cfg.alpha = 0.0;
  const SolveResult res = optimize_command(m, p, u, x_ref, cfg);
  CHECK(res.loss == 0.0);
  CHECK(res.command_deg == u);
}

TEST_CASE("loss is non-increasing across line-search epochs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MlpModel m = random_model(100 + seed);
    Rng rng(seed);
    const Eigen::VectorXd u = random_command(rng);
    const Eigen::VectorXd p = Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Eigen::Vector3d x_ref(rng.uniform(400, 1000), rng.uniform(-300, 300),
                                rng.uniform(900, 1500));
    ControllerConfig cfg;
    cfg.alpha = 0.3;
    cfg.constraint = AnchorConstraint{u};
    const SolveResult res = optimize_command(m, p, u, x_ref, cfg);
    REQUIRE(res.log.size() == 10);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& step : res.log) {
      CHECK(step.loss <= prev);
      prev = step.loss;
    }
  }
}

TEST_CASE("descent makes substantial progress on reachable targets") {
  // targets one tracking step away, as in the closed loop where the solve
  // starts from the previously executed command
  int wins = 0;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const MlpModel m = random_model(500 + trial);
    Rng rng(900 + trial);
    const Eigen::VectorXd u_start = random_command(rng);
    Eigen::VectorXd u_tgt = u_start;
    for (int i = 0; i < u_tgt.size(); ++i) u_tgt[i] += rng.uniform(-8, 8);
    const Eigen::VectorXd p = Eigen::Vector2d(0.2, -0.4);
    // target on the model manifold, so it is reachable by some command
    const Eigen::Vector3d x_ref = estimate_tip(m, u_tgt, p);
    ControllerConfig cfg;
    cfg.alpha = 0.0;
    const double initial = (estimate_tip(m, u_start, p) - x_ref).norm();
    const SolveResult res = optimize_command(m, p, u_start, x_ref, cfg);
    if (res.loss < 0.5 * initial) ++wins;
  }
  CHECK(wins == 20);
}

TEST_CASE("the command-space gradient matches finite differences of the loss") {
  const MlpModel m = random_model(7);
  Rng rng(8);
  const Eigen::VectorXd u = random_command(rng);
  const Eigen::VectorXd p = Eigen::Vector2d(0.6, -0.1);
  const Eigen::Vector3d x_ref(800, -100, 1300);
  ControllerConfig cfg;
  cfg.alpha = 0.3;
  cfg.constraint = AnchorConstraint{random_command(rng)};

  const Eigen::VectorXd grad = command_loss_gradient(m, p, u, x_ref, cfg);
  const double h = 1e-5;
  for (int i = 0; i < u.size(); ++i) {
    Eigen::VectorXd up = u, dn = u;
    up[i] += h;
    dn[i] -= h;
    const double fd = (command_loss(m, p, up, x_ref, cfg) -
                       command_loss(m, p, dn, x_ref, cfg)) /
                      (2 * h);
    CHECK(std::abs(grad[i] - fd) /
              std::max({std::abs(fd), std::abs(grad[i]), 1e-3}) <
          1e-5);
  }
}

TEST_CASE("a heavily weighted freeze constraint pins the masked joints") {
  const MlpModel m = random_model(9);
  Rng rng(10);
  const Eigen::VectorXd u0 = random_command(rng);
  const Eigen::VectorXd p = Eigen::Vector2d(0.0, 0.0);
  const Eigen::Vector3d x_ref(900, 100, 1100);

  FreezeConstraint freeze;
  freeze.mask = Eigen::ArrayXd::Zero(5);
  freeze.mask[1] = 1;
  freeze.mask[3] = 1;
  freeze.anchor_deg = u0;

  ControllerConfig cfg;
  cfg.alpha = 1e6;
  cfg.constraint = freeze;
  const SolveResult res = optimize_command(m, p, u0, x_ref, cfg);
  CHECK(std::abs(res.command_deg[1] - u0[1]) < 1e-6);
  CHECK(std::abs(res.command_deg[3] - u0[3]) < 1e-6);
  // the free joints actually moved toward the target
  CHECK((res.command_deg - u0).norm() > 1e-3);
}

TEST_CASE("frozen joints that start away from their anchors are pulled back") {
  const MlpModel m = random_model(21);
  Rng rng(22);
  const Eigen::VectorXd anchor = random_command(rng);
  Eigen::VectorXd u0 = anchor;
  u0[2] += 20.0;  // frozen joint displaced from its anchor

  FreezeConstraint freeze;
  freeze.mask = Eigen::ArrayXd::Zero(5);
  freeze.mask[2] = 1;
  freeze.anchor_deg = anchor;

  ControllerConfig cfg;
  cfg.alpha = 10.0;
  cfg.constraint = freeze;
  const SolveResult res =
      optimize_command(m, Eigen::Vector2d(0.1, -0.1), u0,
                       Eigen::Vector3d(800, 0, 1200), cfg);
  CHECK(std::abs(res.command_deg[2] - anchor[2]) <
        std::abs(u0[2] - anchor[2]));
}

TEST_CASE("ascent candidates stay monotone thanks to the gamma=0 anchor") {
  const MlpModel m = random_model(23);
  Rng rng(24);
  const Eigen::VectorXd u = random_command(rng);
  ControllerConfig cfg;
  cfg.include_ascent = true;
  const SolveResult res = optimize_command(
      m, Eigen::Vector2d(0.3, 0.2), u, Eigen::Vector3d(600, -100, 1300), cfg);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& step : res.log) {
    CHECK(step.loss <= prev);
    prev = step.loss;
  }
}

TEST_CASE("a stronger anchor keeps the solution closer to the original") {
  double mean_dist_weak = 0, mean_dist_strong = 0;
  const int trials = 10;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const MlpModel m = random_model(50 + t);
    Rng rng(60 + t);
    const Eigen::VectorXd u0 = random_command(rng);
    const Eigen::VectorXd p = Eigen::Vector2d(0.1, 0.1);
    const Eigen::Vector3d x_ref(700, 50, 1000);
    for (double alpha : {0.03, 3.0}) {
      ControllerConfig cfg;
      cfg.alpha = alpha;
      cfg.constraint = AnchorConstraint{u0};
      const SolveResult res = optimize_command(m, p, u0, x_ref, cfg);
      const double d = (res.command_deg - u0).norm();
      (alpha < 1 ? mean_dist_weak : mean_dist_strong) += d / trials;
    }
  }
  CHECK(mean_dist_strong < mean_dist_weak);
}

TEST_CASE("candidates are clamped to joint limits when provided") {
  const MlpModel m = random_model(11);
  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(5);
  const Eigen::VectorXd p = Eigen::Vector2d(0.0, 0.0);
  ControllerConfig cfg;
  JointLimits limits;
  limits.min_deg = Eigen::VectorXd::Constant(5, -5.0);
  limits.max_deg = Eigen::VectorXd::Constant(5, 5.0);
  cfg.limits = limits;
  const SolveResult res =
      optimize_command(m, p, u0, Eigen::Vector3d(2000, 0, 0), cfg);
  for (int i = 0; i < 5; ++i) {
    CHECK(res.command_deg[i] >= -5.0);
    CHECK(res.command_deg[i] <= 5.0);
  }
}

TEST_CASE("bad arguments are rejected") {
  const MlpModel m = random_model(12);
  const Eigen::VectorXd p = Eigen::Vector2d(0, 0);
  ControllerConfig cfg;
  CHECK_THROWS_AS(optimize_command(m, p, Eigen::VectorXd::Zero(3),
                                   Eigen::Vector3d::Zero(), cfg),
                  Error);
  cfg.n_line = 1;
  CHECK_THROWS_AS(optimize_command(m, p, Eigen::VectorXd::Zero(5),
                                   Eigen::Vector3d::Zero(), cfg),
                  Error);
}
