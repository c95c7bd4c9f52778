#pragma once

#include <cstdint>
#include <vector>

#include "dataset.hpp"
#include "model_io.hpp"
#include "optim.hpp"

namespace tbnpb {

struct TrainOptions {
  int batch_size = 300;
  int epochs = 300;
  std::uint64_t seed = 0;
  double learning_rate = 1e-3;  // Adam, weights and latents together
  // cosine decay of the learning rate to lr/100 over the run; a flat rate
  // plateaus well short of the accuracy this net can reach
  bool cosine_lr_decay = true;
  // the handful of latent parameters train at a higher rate, spreading the
  // codes over a wider range; the online updater then approaches a changed
  // grasp smoothly instead of snapping to each buffer's optimum
  double latent_lr_scale = 3.0;
  int latent_dim = 2;
  std::vector<int> hidden_dims = {300, 300, 300, 300, 300};
  // fine-tuning keeps the base model's normalization unless told otherwise
  bool refit_normalization = false;
};

struct EpochLoss {
  int epoch;   // 0 = before any update
  double mse;  // full-set per-element MSE in normalized output space
};

struct TrainResult {
  MlpModel model;
  std::vector<LatentEntry> latents;
  std::vector<EpochLoss> loss_history;
};

// Joint minimization of the normalized-space MSE over shuffled mini-batches;
// Adam updates the weights and every group's latent code simultaneously.
// Batch order is keyed to sample identity (grasp_id, index), so permuting
// the group order in the dataset does not change the result.
TrainResult train_offline(const TrainSet& data, const TrainOptions& opt);

// Warm-starts the weights from `base`, resets every latent to zero, then
// runs the same joint optimization on the new data.
TrainResult finetune(const MlpModel& base, const TrainSet& data,
                     const TrainOptions& opt);

// Full-set per-element MSE in normalized output space with the given latents.
double dataset_mse(const MlpModel& model, const TrainSet& data,
                   const std::vector<LatentEntry>& latents);

// Root-mean-square Euclidean tip error in mm over the dataset.
double dataset_rmse_mm(const MlpModel& model, const TrainSet& data,
                       const std::vector<LatentEntry>& latents);

}  // namespace tbnpb
