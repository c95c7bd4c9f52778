#include "analysis.hpp"

#include <algorithm>
#include <string>

namespace tbnpb {

Pca2d pca_2d(const std::vector<Eigen::VectorXd>& points) {
  require(points.size() >= 2, ErrorCode::invalid_argument,
          "PCA needs at least 2 points");
  const auto n = static_cast<Eigen::Index>(points.size());
  const Eigen::Index dim = points.front().size();
  for (const auto& p : points)
    require(p.size() == dim, ErrorCode::dimension_mismatch,
            "inconsistent point dimensions");

  Eigen::MatrixXd data(dim, n);
  for (Eigen::Index i = 0; i < n; ++i) data.col(i) = points[static_cast<std::size_t>(i)];

  Pca2d out;
  out.mean = data.rowwise().mean();
  const Eigen::MatrixXd centered = data.colwise() - out.mean;
  const Eigen::MatrixXd cov =
      centered * centered.transpose() / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  require(eig.info() == Eigen::Success, ErrorCode::numeric_failure,
          "eigendecomposition failed");

  out.components = Eigen::MatrixXd::Zero(2, dim);
  out.explained_variance.setZero();
  const Eigen::Index available = std::min<Eigen::Index>(2, dim);
  for (Eigen::Index c = 0; c < available; ++c) {
    // eigenvalues ascend; take from the top
    const Eigen::Index src = dim - 1 - c;
    Eigen::VectorXd comp = eig.eigenvectors().col(src);
    Eigen::Index max_idx = 0;
    comp.cwiseAbs().maxCoeff(&max_idx);
    if (comp[max_idx] < 0) comp = -comp;
    out.components.row(c) = comp.transpose();
    out.explained_variance[c] = std::max(0.0, eig.eigenvalues()[src]);
  }
  out.projections = (out.components * centered).transpose();
  return out;
}

std::vector<double> step_errors(const std::vector<Eigen::Vector3d>& estimated,
                                const std::vector<Eigen::Vector3d>& truth) {
  require(!estimated.empty(), ErrorCode::invalid_argument, "empty series");
  require(estimated.size() == truth.size(), ErrorCode::dimension_mismatch,
          "series lengths differ");
  std::vector<double> errors;
  errors.reserve(estimated.size());
  for (std::size_t i = 0; i < estimated.size(); ++i)
    errors.push_back((estimated[i] - truth[i]).norm());
  return errors;
}

double windowed_mean(const std::vector<double>& errors, std::size_t start,
                     std::size_t end) {
  end = std::min(end, errors.size());
  require(start < end, ErrorCode::invalid_argument,
          "empty error window [" + std::to_string(start) + ", " +
              std::to_string(end) + ")");
  double total = 0.0;
  for (std::size_t i = start; i < end; ++i) total += errors[i];
  return total / static_cast<double>(end - start);
}

}  // namespace tbnpb
