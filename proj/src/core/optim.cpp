#include "optim.hpp"

#include <cmath>
#include <string>

namespace tbnpb {

Optimizer::Optimizer(const OptimizerConfig& cfg,
                     const std::vector<Eigen::Index>& slot_sizes)
    : cfg_(cfg), sizes_(slot_sizes) {
  require(cfg.learning_rate > 0.0, ErrorCode::invalid_argument,
          "learning rate must be positive");
  m_.reserve(sizes_.size());
  v_.reserve(sizes_.size());
  for (Eigen::Index n : sizes_) {
    m_.emplace_back(Eigen::ArrayXd::Zero(n));
    if (cfg_.kind == OptimizerKind::adam)
      v_.emplace_back(Eigen::ArrayXd::Zero(n));
  }
}

void Optimizer::reset() {
  for (auto& m : m_) m.setZero();
  for (auto& v : v_) v.setZero();
  t_ = 0;
}

void Optimizer::step(std::vector<ParamView>& params,
                     const std::vector<ConstParamView>& grads) {
  require(params.size() == sizes_.size() && grads.size() == sizes_.size(),
          ErrorCode::dimension_mismatch, "optimizer slot count mismatch");
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    require(params[i].size() == sizes_[i] && grads[i].size() == sizes_[i],
            ErrorCode::dimension_mismatch,
            "optimizer slot " + std::to_string(i) + " shape mismatch");
  }
  ++t_;
  if (cfg_.kind == OptimizerKind::momentum_sgd) {
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      m_[i] = cfg_.momentum * m_[i] - cfg_.learning_rate * grads[i];
      params[i] += m_[i];
    }
    return;
  }
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i].square();
    params[i] -= cfg_.learning_rate * (m_[i] / bc1) /
                 ((v_[i] / bc2).sqrt() + cfg_.epsilon);
  }
}

}  // namespace tbnpb
