#pragma once

#include <deque>

#include "model_io.hpp"
#include "optim.hpp"

namespace tbnpb {

struct AdaptParams {
  double c_collect_deg = 10.0;  // minimum command distance between stored samples
  int n_thre = 10;              // updates start at this buffer size
  int n_epoch = 3;              // gradient steps per update call
  int n_max = 20;               // buffer capacity, oldest evicted first
  double latent_lr = 0.1;       // momentum SGD on the latent code
  double weight_lr = 0.01;      // momentum SGD for the update-W baseline
  double momentum = 0.9;
};

// Gated FIFO of (command, observed tip) pairs. A sample is stored only when
// the command moved more than c_collect away (L2, degrees) from the last
// stored one; the first observation always stores.
class OnlineBuffer {
 public:
  struct Entry {
    Eigen::VectorXd command_deg;
    Eigen::Vector3d tip_mm;
  };

  OnlineBuffer(int capacity, double c_collect_deg);

  bool observe(const Eigen::VectorXd& u_deg, const Eigen::Vector3d& tip_mm);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::deque<Entry>& entries() const { return entries_; }
  const Eigen::VectorXd& last_stored_command() const;
  int capacity() const { return capacity_; }
  void clear();

 private:
  int capacity_;
  double c_collect_deg_;
  std::deque<Entry> entries_;
};

// Latent-only gradient descent on the full-buffer loss; the network weights
// are read-only. Momentum persists across update calls and resets with the
// session via reset().
class LatentUpdater {
 public:
  LatentUpdater(const AdaptParams& params, int latent_dim);

  // Returns p unchanged while the buffer holds fewer than n_thre samples;
  // otherwise n_epoch momentum-SGD steps on the buffer MSE.
  Eigen::VectorXd update(const MlpModel& model, const OnlineBuffer& buffer,
                         const Eigen::VectorXd& p);

  void reset() { optimizer_.reset(); }
  const AdaptParams& params() const { return params_; }

 private:
  AdaptParams params_;
  Optimizer optimizer_;
};

// The comparison baseline: the same update loop, but the weights move while
// the latent stays fixed.
class WeightUpdater {
 public:
  WeightUpdater(const AdaptParams& params, const MlpModel& shape);

  void update(MlpModel& model, const OnlineBuffer& buffer,
              const Eigen::VectorXd& p_fixed);

  void reset() { optimizer_.reset(); }

 private:
  AdaptParams params_;
  Optimizer optimizer_;
};

// Buffer loss with latent p: per-element MSE in normalized output space,
// and the RMS tip error in mm.
double buffer_mse(const MlpModel& model, const OnlineBuffer& buffer,
                  const Eigen::VectorXd& p);
double buffer_rmse_mm(const MlpModel& model, const OnlineBuffer& buffer,
                      const Eigen::VectorXd& p);

}  // namespace tbnpb
