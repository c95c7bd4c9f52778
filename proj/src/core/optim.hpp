#pragma once

#include <Eigen/Dense>
#include <vector>

#include "error.hpp"
#include "mlp.hpp"

namespace tbnpb {

enum class OptimizerKind { adam, momentum_sgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  // momentum SGD: v <- mu*v - lr*g, param += v
  double momentum = 0.9;
  // Adam
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

inline OptimizerConfig adam_config(double lr = 1e-3) {
  return OptimizerConfig{OptimizerKind::adam, lr};
}

inline OptimizerConfig momentum_sgd_config(double lr, double mu = 0.9) {
  OptimizerConfig c;
  c.kind = OptimizerKind::momentum_sgd;
  c.learning_rate = lr;
  c.momentum = mu;
  return c;
}

// First/second-moment buffers are allocated per parameter slot at
// construction and must match the slots passed to every step() call.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& cfg, const std::vector<Eigen::Index>& slot_sizes);

  void step(std::vector<ParamView>& params,
            const std::vector<ConstParamView>& grads);

  void reset();

  void set_learning_rate(double lr) { cfg_.learning_rate = lr; }
  const OptimizerConfig& config() const { return cfg_; }
  long step_count() const { return t_; }

 private:
  OptimizerConfig cfg_;
  std::vector<Eigen::Index> sizes_;
  std::vector<Eigen::ArrayXd> m_;  // momentum / first moment
  std::vector<Eigen::ArrayXd> v_;  // second moment (Adam only)
  long t_ = 0;
};

inline std::vector<Eigen::Index> view_sizes(const std::vector<ParamView>& views) {
  std::vector<Eigen::Index> sizes;
  sizes.reserve(views.size());
  for (const auto& v : views) sizes.push_back(v.size());
  return sizes;
}

}  // namespace tbnpb
