#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tbnpb {
namespace {

// Sample table flattened in (grasp_id, in-group index) order so shuffles are
// keyed to sample identity rather than to the order groups appear in.
struct FlatData {
  Eigen::MatrixXd commands;       // dim_u x N
  Eigen::MatrixXd tips;           // 3 x N
  std::vector<int> group_of;      // N, index into sorted group order
  std::vector<std::uint32_t> group_ids;  // sorted
};

FlatData flatten_sorted(const TrainSet& data) {
  std::vector<std::size_t> order(data.groups.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.groups[a].grasp_id < data.groups[b].grasp_id;
  });

  FlatData flat;
  const int dim = data.command_dim();
  const auto total = static_cast<Eigen::Index>(data.total_samples());
  flat.commands.resize(dim, total);
  flat.tips.resize(3, total);
  flat.group_of.reserve(static_cast<std::size_t>(total));
  Eigen::Index col = 0;
  for (std::size_t gi = 0; gi < order.size(); ++gi) {
    const GraspGroup& g = data.groups[order[gi]];
    flat.group_ids.push_back(g.grasp_id);
    for (std::size_t s = 0; s < g.size(); ++s, ++col) {
      flat.commands.col(col) = g.commands_deg[s];
      flat.tips.col(col) = g.tips_mm[s];
      flat.group_of.push_back(static_cast<int>(gi));
    }
  }
  return flat;
}

double full_set_mse(const MlpModel& model, const Eigen::MatrixXd& inputs,
                    const Eigen::MatrixXd& targets_norm) {
  const Eigen::MatrixXd out = net_forward(model, inputs);
  return (out - targets_norm).squaredNorm() /
         (3.0 * static_cast<double>(targets_norm.cols()));
}

Eigen::MatrixXd assemble_flat_input(const MlpModel& model, const FlatData& flat,
                                    const std::vector<Eigen::VectorXd>& latents) {
  Eigen::MatrixXd lat(model.latent_dim, flat.commands.cols());
  for (Eigen::Index i = 0; i < flat.commands.cols(); ++i)
    lat.col(i) = latents[static_cast<std::size_t>(
        flat.group_of[static_cast<std::size_t>(i)])];
  return assemble_input(model, flat.commands, lat);
}

TrainResult run_training(MlpModel model, const TrainSet& data,
                         const TrainOptions& opt) {
  data.validate();
  require(opt.batch_size >= 1 && opt.epochs >= 0, ErrorCode::invalid_argument,
          "bad batch size or epoch count");

  const FlatData flat = flatten_sorted(data);
  const auto n_samples = flat.commands.cols();
  const auto n_groups = flat.group_ids.size();

  // Latents start at zero for every group.
  std::vector<Eigen::VectorXd> latents(
      n_groups, Eigen::VectorXd::Zero(model.latent_dim));

  Eigen::MatrixXd targets_norm =
      (flat.tips.colwise() - model.out_norm.mean).array().colwise() /
      model.out_norm.std.array();

  // Weights and latents update simultaneously, the latents at their own rate.
  auto net_views = param_views(model);
  std::vector<ParamView> latent_views;
  for (auto& p : latents) latent_views.emplace_back(p.data(), p.size());
  Optimizer net_optimizer(adam_config(opt.learning_rate), view_sizes(net_views));
  Optimizer latent_optimizer(
      adam_config(opt.learning_rate * opt.latent_lr_scale),
      view_sizes(latent_views));

  TrainResult result;
  result.loss_history.push_back(
      {0, full_set_mse(model, assemble_flat_input(model, flat, latents),
                       targets_norm)});

  std::vector<Eigen::Index> indices(static_cast<std::size_t>(n_samples));
  std::iota(indices.begin(), indices.end(), 0);
  Rng shuffle_rng(mix_seed(opt.seed, 0x51));

  ParamGrads param_grads = ParamGrads::zeros_like(model);
  std::vector<Eigen::VectorXd> latent_grads(
      n_groups, Eigen::VectorXd::Zero(model.latent_dim));

  constexpr double pi = 3.14159265358979323846;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    if (opt.cosine_lr_decay) {
      const double progress =
          static_cast<double>(epoch - 1) / std::max(1, opt.epochs);
      const double factor = 0.01 + 0.99 * 0.5 * (1.0 + std::cos(pi * progress));
      net_optimizer.set_learning_rate(opt.learning_rate * factor);
      latent_optimizer.set_learning_rate(opt.learning_rate *
                                         opt.latent_lr_scale * factor);
    }
    shuffle_rng.shuffle(indices);
    int batch_index = 0;
    for (Eigen::Index start = 0; start < n_samples;
         start += opt.batch_size, ++batch_index) {
      const auto b =
          std::min<Eigen::Index>(opt.batch_size, n_samples - start);
      Eigen::MatrixXd in(model.input_dim(), b);
      Eigen::MatrixXd target(3, b);
      for (Eigen::Index i = 0; i < b; ++i) {
        const Eigen::Index s = indices[static_cast<std::size_t>(start + i)];
        in.col(i).head(model.command_dim) = flat.commands.col(s);
        in.col(i).tail(model.latent_dim) =
            latents[static_cast<std::size_t>(
                flat.group_of[static_cast<std::size_t>(s)])];
        target.col(i) = targets_norm.col(s);
      }
      in.topRows(model.command_dim) =
          (in.topRows(model.command_dim).colwise() - model.in_norm.mean)
              .array()
              .colwise() /
          model.in_norm.std.array();

      ForwardCache cache;
      const Eigen::MatrixXd out = net_forward(model, in, &cache);
      const Eigen::MatrixXd err = out - target;
      const double batch_mse =
          err.squaredNorm() / (3.0 * static_cast<double>(b));
      require(std::isfinite(batch_mse), ErrorCode::numeric_failure,
              "non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                  std::to_string(batch_index));

      const Eigen::MatrixXd upstream =
          (2.0 / (3.0 * static_cast<double>(b))) * err;
      const Eigen::MatrixXd grad_in =
          net_backward(model, cache, upstream, &param_grads);

      for (auto& g : latent_grads) g.setZero();
      for (Eigen::Index i = 0; i < b; ++i) {
        const Eigen::Index s = indices[static_cast<std::size_t>(start + i)];
        latent_grads[static_cast<std::size_t>(
            flat.group_of[static_cast<std::size_t>(s)])] +=
            grad_in.col(i).tail(model.latent_dim);
      }

      auto net_gviews = grad_views(param_grads);
      net_optimizer.step(net_views, net_gviews);
      std::vector<ConstParamView> latent_gviews;
      for (const auto& g : latent_grads)
        latent_gviews.emplace_back(g.data(), g.size());
      latent_optimizer.step(latent_views, latent_gviews);
    }
    result.loss_history.push_back(
        {epoch, full_set_mse(model, assemble_flat_input(model, flat, latents),
                             targets_norm)});
  }

  result.model = std::move(model);
  for (std::size_t g = 0; g < n_groups; ++g)
    result.latents.push_back({flat.group_ids[g], latents[g]});
  return result;
}

}  // namespace

TrainResult train_offline(const TrainSet& data, const TrainOptions& opt) {
  data.validate();
  require(opt.latent_dim >= 1, ErrorCode::invalid_argument,
          "latent_dim must be >= 1");
  MlpModel model = make_model(data.command_dim(), opt.latent_dim, opt.hidden_dims);
  Rng init_rng(mix_seed(opt.seed, 0x11));
  init_weights(model, init_rng);

  const FlatData flat = flatten_sorted(data);
  const IoNormStats stats = fit_normalization(flat.commands, flat.tips);
  model.in_norm = stats.in_norm;
  model.out_norm = stats.out_norm;

  return run_training(std::move(model), data, opt);
}

TrainResult finetune(const MlpModel& base, const TrainSet& data,
                     const TrainOptions& opt) {
  data.validate();
  require(data.command_dim() == base.command_dim, ErrorCode::dimension_mismatch,
          "fine-tuning data command dimension does not match the model");
  MlpModel model = base;
  if (opt.refit_normalization) {
    const FlatData flat = flatten_sorted(data);
    const IoNormStats stats = fit_normalization(flat.commands, flat.tips);
    model.in_norm = stats.in_norm;
    model.out_norm = stats.out_norm;
  }
  return run_training(std::move(model), data, opt);
}

double dataset_mse(const MlpModel& model, const TrainSet& data,
                   const std::vector<LatentEntry>& latents) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : data.groups) {
    const Eigen::VectorXd* code = find_latent(latents, g.grasp_id);
    require(code != nullptr, ErrorCode::invalid_argument,
            "no latent for grasp_id " + std::to_string(g.grasp_id));
    for (std::size_t s = 0; s < g.size(); ++s) {
      const Eigen::Vector3d out_norm_space = model.out_norm.normalize(
          forward(model, g.commands_deg[s], *code));
      const Eigen::Vector3d tgt = model.out_norm.normalize(g.tips_mm[s]);
      total += (out_norm_space - tgt).squaredNorm() / 3.0;
      ++n;
    }
  }
  require(n > 0, ErrorCode::invalid_argument, "empty dataset");
  return total / static_cast<double>(n);
}

double dataset_rmse_mm(const MlpModel& model, const TrainSet& data,
                       const std::vector<LatentEntry>& latents) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& g : data.groups) {
    const Eigen::VectorXd* code = find_latent(latents, g.grasp_id);
    require(code != nullptr, ErrorCode::invalid_argument,
            "no latent for grasp_id " + std::to_string(g.grasp_id));
    for (std::size_t s = 0; s < g.size(); ++s) {
      total += (forward(model, g.commands_deg[s], *code) - g.tips_mm[s])
                   .squaredNorm();
      ++n;
    }
  }
  require(n > 0, ErrorCode::invalid_argument, "empty dataset");
  return std::sqrt(total / static_cast<double>(n));
}

}  // namespace tbnpb
