#include <doctest.h>

#include "core/trainer.hpp"

using namespace tbnpb;

namespace {

// Small synthetic problem: data generated by a frozen random network, so the
// trainer has an exactly representable target.
TrainSet teacher_dataset(int n_groups, int per_group, std::uint64_t seed,
                         MlpModel* teacher_out = nullptr,
                         std::vector<Eigen::VectorXd>* codes_out = nullptr) {
  MlpModel teacher = make_model(3, 2, {16, 16});
  Rng rng(seed);
  init_weights(teacher, rng);
  teacher.out_norm.mean << 800, 0, 1200;
  teacher.out_norm.std << 250, 250, 250;
  teacher.in_norm.mean = Eigen::Vector3d(0, 0, 0);
  teacher.in_norm.std = Eigen::Vector3d(40, 40, 40);

  TrainSet set;
  for (int k = 0; k < n_groups; ++k) {
    GraspGroup group;
    group.grasp_id = static_cast<std::uint32_t>(k);
    group.latent = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd code(2);
    code << 0.8 * k - 0.5, 0.3 - 0.4 * k;
    if (codes_out) codes_out->push_back(code);
    for (int s = 0; s < per_group; ++s) {
      Eigen::VectorXd u(3);
      for (int i = 0; i < 3; ++i) u[i] = rng.uniform(-60, 60);
      group.commands_deg.push_back(u);
      group.tips_mm.push_back(forward(teacher, u, code));
    }
    set.groups.push_back(std::move(group));
  }
  if (teacher_out) *teacher_out = teacher;
  return set;
}

TrainOptions small_options(int epochs, std::uint64_t seed = 0) {
  TrainOptions opt;
  opt.batch_size = 50;
  opt.epochs = epochs;
  opt.seed = seed;
  opt.latent_dim = 2;
  opt.hidden_dims = {24, 24, 24};
  return opt;
}

}  // namespace

TEST_CASE("training a teacher-generated single group reaches near-zero loss") {
  MlpModel teacher;
  const TrainSet data = teacher_dataset(1, 400, 11, &teacher);
  TrainOptions opt = small_options(300, 5);
  const TrainResult res = train_offline(data, opt);
  CHECK(res.loss_history.back().mse < 1e-3);
  CHECK(res.loss_history.back().mse < res.loss_history.front().mse);
}

TEST_CASE("zero epochs returns the seeded initialization and zero latents") {
  const TrainSet data = teacher_dataset(3, 30, 12);
  TrainOptions opt = small_options(0, 9);
  const TrainResult res = train_offline(data, opt);
  REQUIRE(res.loss_history.size() == 1);
  for (const auto& entry : res.latents) CHECK(entry.code.isZero(0));

  // identical to building the model by hand with the same seed
  MlpModel expect = make_model(3, 2, opt.hidden_dims);
  Rng rng(mix_seed(9, 0x11));
  init_weights(expect, rng);
  for (std::size_t l = 0; l < expect.weights.size(); ++l)
    CHECK(res.model.weights[l] == expect.weights[l]);
}

TEST_CASE("full-set loss decreases from start to finish") {
  const TrainSet data = teacher_dataset(3, 120, 13);
  const TrainResult res = train_offline(data, small_options(40, 3));
  CHECK(res.loss_history.front().epoch == 0);
  CHECK(res.loss_history.back().epoch == 40);
  CHECK(res.loss_history.back().mse < res.loss_history.front().mse);
}

TEST_CASE("training is bit-reproducible for a fixed seed") {
  const TrainSet data = teacher_dataset(2, 60, 14);
  const TrainResult a = train_offline(data, small_options(15, 21));
  const TrainResult b = train_offline(data, small_options(15, 21));
  CHECK(serialize_params(a.model) == serialize_params(b.model));
  for (std::size_t i = 0; i < a.latents.size(); ++i)
    CHECK(a.latents[i].code == b.latents[i].code);
  const TrainResult c = train_offline(data, small_options(15, 22));
  CHECK(serialize_params(a.model) != serialize_params(c.model));
}

TEST_CASE("permuting group order changes nothing but latent labeling") {
  TrainSet data = teacher_dataset(3, 50, 15);
  TrainSet permuted;
  permuted.groups = {data.groups[2], data.groups[0], data.groups[1]};

  const TrainResult a = train_offline(data, small_options(10, 33));
  const TrainResult b = train_offline(permuted, small_options(10, 33));
  CHECK(serialize_params(a.model) == serialize_params(b.model));
  REQUIRE(a.latents.size() == b.latents.size());
  for (std::size_t i = 0; i < a.latents.size(); ++i) {
    CHECK(a.latents[i].grasp_id == b.latents[i].grasp_id);
    CHECK(a.latents[i].code == b.latents[i].code);
  }
}

TEST_CASE("distinct grasp groups learn distinct latent codes") {
  const TrainSet data = teacher_dataset(3, 200, 16);
  const TrainResult res = train_offline(data, small_options(120, 2));
  for (std::size_t i = 0; i < res.latents.size(); ++i)
    for (std::size_t j = i + 1; j < res.latents.size(); ++j)
      CHECK((res.latents[i].code - res.latents[j].code).norm() > 1e-2);
}

TEST_CASE("fine-tuning resets latents, keeps stats, and stays calibrated") {
  const TrainSet data = teacher_dataset(2, 150, 17);
  const TrainResult pre = train_offline(data, small_options(150, 4));

  TrainOptions ft_opt = small_options(60, 5);
  const TrainResult ft = finetune(pre.model, data, ft_opt);
  CHECK(ft.model.in_norm.mean == pre.model.in_norm.mean);
  CHECK(ft.model.out_norm.std == pre.model.out_norm.std);
  // same data, warm-started weights: no catastrophic reset
  CHECK(ft.loss_history.back().mse <= pre.loss_history.back().mse * 1.5);
}

TEST_CASE("fine-tuning with zero epochs keeps W and zeroes latents") {
  const TrainSet data = teacher_dataset(2, 40, 18);
  const TrainResult pre = train_offline(data, small_options(5, 6));
  const TrainResult ft = finetune(pre.model, data, small_options(0, 7));
  CHECK(serialize_params(ft.model) == serialize_params(pre.model));
  for (const auto& entry : ft.latents) CHECK(entry.code.isZero(0));
}

TEST_CASE("fine-tuning rejects mismatched command dimensions") {
  const TrainSet data3 = teacher_dataset(1, 30, 19);
  const TrainResult pre = train_offline(data3, small_options(1, 8));
  TrainSet data2;
  GraspGroup g;
  g.grasp_id = 0;
  g.commands_deg = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  g.tips_mm = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones()};
  data2.groups.push_back(g);
  CHECK_THROWS_AS(finetune(pre.model, data2, small_options(1, 8)), Error);
}

TEST_CASE("non-finite data aborts with the epoch and batch") {
  TrainSet data = teacher_dataset(1, 30, 20);
  data.groups[0].tips_mm[5] =
      Eigen::Vector3d(std::numeric_limits<double>::quiet_NaN(), 0, 0);
  try {
    // normalization of a NaN column poisons the loss immediately
    train_offline(data, small_options(2, 1));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::numeric_failure);
  }
}
