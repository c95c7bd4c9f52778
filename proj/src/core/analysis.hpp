#pragma once

#include <Eigen/Dense>
#include <vector>

#include "error.hpp"

namespace tbnpb {

struct Pca2d {
  Eigen::MatrixXd projections;         // n_points x 2
  Eigen::MatrixXd components;          // 2 x dim, orthonormal rows
  Eigen::Vector2d explained_variance;  // descending, non-negative
  Eigen::VectorXd mean;
};

// Top-2 principal components of the mean-centered covariance. Component
// signs are fixed so each one's largest-magnitude entry is positive,
// which keeps the projection deterministic.
Pca2d pca_2d(const std::vector<Eigen::VectorXd>& points);

// Per-step Euclidean errors between two aligned series, in mm.
std::vector<double> step_errors(const std::vector<Eigen::Vector3d>& estimated,
                                const std::vector<Eigen::Vector3d>& truth);

// Mean over errors[start..end); the evaluation window typically starts once
// enough online data has been collected.
double windowed_mean(const std::vector<double>& errors, std::size_t start,
                     std::size_t end = static_cast<std::size_t>(-1));

}  // namespace tbnpb
