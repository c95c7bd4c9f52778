#include <doctest.h>

#include "core/analysis.hpp"
#include "core/rng.hpp"

using namespace tbnpb;

TEST_CASE("identical points give zero variance and zero projections") {
  const std::vector<Eigen::VectorXd> points(5, Eigen::Vector2d(3.0, -1.0));
  const Pca2d pca = pca_2d(points);
  CHECK(pca.explained_variance[0] == 0.0);
  CHECK(pca.explained_variance[1] == 0.0);
  CHECK(pca.projections.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("collinear points are explained entirely by the first component") {
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 6; ++i)
    points.push_back(Eigen::Vector2d(1.0 * i, 2.0 * i));
  const Pca2d pca = pca_2d(points);
  CHECK(pca.explained_variance[0] > 0.0);
  CHECK(pca.explained_variance[1] < 1e-12);
  const double total = pca.explained_variance.sum();
  CHECK(pca.explained_variance[0] / total == doctest::Approx(1.0));
}

TEST_CASE("two components reconstruct centered 2-d data") {
  Rng rng(17);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 40; ++i)
    points.push_back(
        Eigen::Vector2d(rng.uniform(-2, 2), 0.3 * rng.uniform(-2, 2) + 1.0));
  const Pca2d pca = pca_2d(points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector2d centered = points[i] - pca.mean;
    const Eigen::Vector2d rebuilt =
        pca.components.transpose() *
        pca.projections.row(static_cast<Eigen::Index>(i)).transpose();
    CHECK((rebuilt - centered).norm() < 1e-10);
  }
}

TEST_CASE("components are orthonormal and variances sorted") {
  Rng rng(18);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 30; ++i) {
    Eigen::VectorXd v(4);
    for (int k = 0; k < 4; ++k) v[k] = rng.uniform(-1, 1) * (k + 1);
    points.push_back(v);
  }
  const Pca2d pca = pca_2d(points);
  CHECK(std::abs(pca.components.row(0).norm() - 1.0) < 1e-12);
  CHECK(std::abs(pca.components.row(1).norm() - 1.0) < 1e-12);
  CHECK(std::abs(pca.components.row(0).dot(pca.components.row(1))) < 1e-12);
  CHECK(pca.explained_variance[0] >= pca.explained_variance[1]);
  CHECK(pca.explained_variance[1] >= 0.0);
}

TEST_CASE("the component sign convention fixes reruns") {
  Rng rng(19);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 10; ++i)
    points.push_back(Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)));
  const Pca2d a = pca_2d(points);
  const Pca2d b = pca_2d(points);
  CHECK(a.components == b.components);
  Eigen::Index max_idx = 0;
  a.components.row(0).cwiseAbs().maxCoeff(&max_idx);
  CHECK(a.components(0, max_idx) > 0.0);
}

TEST_CASE("PCA rejects fewer than two points") {
  CHECK_THROWS_AS(pca_2d({}), Error);
  CHECK_THROWS_AS(pca_2d({Eigen::Vector2d(1, 2)}), Error);
}

TEST_CASE("identical series have zero tracking error") {
  std::vector<Eigen::Vector3d> series{{1, 2, 3}, {4, 5, 6}};
  const auto errors = step_errors(series, series);
  for (double e : errors) CHECK(e == 0.0);
}

TEST_CASE("a constant (3,4,0) offset is a 5 mm error at every step") {
  std::vector<Eigen::Vector3d> truth, est;
  for (int i = 0; i < 7; ++i) {
    truth.push_back(Eigen::Vector3d(i, 2.0 * i, -i));
    est.push_back(truth.back() + Eigen::Vector3d(3, 4, 0));
  }
  const auto errors = step_errors(est, truth);
  for (double e : errors) CHECK(e == doctest::Approx(5.0));
  CHECK(windowed_mean(errors, 2) == doctest::Approx(5.0));
}

TEST_CASE("empty series and empty windows are rejected") {
  CHECK_THROWS_AS(step_errors({}, {}), Error);
  std::vector<double> errors{1.0, 2.0};
  CHECK_THROWS_AS(windowed_mean(errors, 2), Error);
  CHECK(windowed_mean(errors, 1) == doctest::Approx(2.0));
}
