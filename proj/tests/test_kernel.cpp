#include <doctest.h>

#include <cmath>
#include <random>

#include "musvm/kernel.hpp"

using namespace musvm;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = normal(rng);
  return X;
}

}  // namespace

TEST_CASE("linear kernel is the dot product") {
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  CHECK(eval_kernel(KernelSpec::linear(), x, x) == 5.0);
}

TEST_CASE("rbf kernel at identical points is exactly one") {
  Eigen::VectorXd x(3);
  x << 0.25, -1.5, 3.0;
  for (const double gamma : {1e-3, 1.0, 50.0}) {
    CHECK(eval_kernel(KernelSpec::rbf(gamma), x, x) == 1.0);
  }
}

TEST_CASE("rbf kernel with gamma 2^-7 at squared distance 128 is 1/e") {
  const double gamma = std::pow(2.0, -7.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd z(2);
  z << 8.0 * std::sqrt(2.0), 0.0;  // ||x-z||^2 = 128
  CHECK(eval_kernel(KernelSpec::rbf(gamma), x, z) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("eval_kernel rejects mismatched dimensions") {
  Eigen::VectorXd x(2), z(3);
  x.setZero();
  z.setZero();
  CHECK_THROWS_AS(eval_kernel(KernelSpec::linear(), x, z), InputError);
}

TEST_CASE("rbf spec requires positive gamma") {
  Eigen::VectorXd x(1), z(1);
  x << 1.0;
  z << 2.0;
  CHECK_THROWS_AS(eval_kernel(KernelSpec::rbf(0.0), x, z), InputError);
  CHECK_THROWS_AS(eval_kernel(KernelSpec::rbf(-1.0), x, z), InputError);
}

TEST_CASE("gram of orthonormal rows under linear kernel is the identity") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(2, 2);
  const GramMatrix G = gram(KernelSpec::linear(), X);
  CHECK(G.isApprox(Eigen::MatrixXd::Identity(2, 2), 0.0));
}

TEST_CASE("gram of [[1],[2]] under linear kernel") {
  Eigen::MatrixXd X(2, 1);
  X << 1.0, 2.0;
  const GramMatrix G = gram(KernelSpec::linear(), X);
  CHECK(G(0, 0) == 1.0);
  CHECK(G(0, 1) == 2.0);
  CHECK(G(1, 0) == 2.0);
  CHECK(G(1, 1) == 4.0);
}

TEST_CASE("rbf gram entries lie in (0,1] with unit diagonal") {
  const Eigen::MatrixXd X = random_matrix(7, 4, 11);
  const GramMatrix G = gram(KernelSpec::rbf(0.3), X);
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    CHECK(G(i, i) == 1.0);
    for (Eigen::Index j = 0; j < G.cols(); ++j) {
      CHECK(G(i, j) > 0.0);
      CHECK(G(i, j) <= 1.0);
    }
  }
}

TEST_CASE("gram matches pairwise eval_kernel calls bit for bit") {
  const Eigen::MatrixXd X = random_matrix(9, 5, 23);
  for (const KernelSpec spec : {KernelSpec::linear(), KernelSpec::rbf(0.7)}) {
    const GramMatrix G = gram(spec, X);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      for (Eigen::Index j = 0; j < X.rows(); ++j) {
        const double direct =
            eval_kernel(spec, X.row(i).transpose(), X.row(j).transpose());
        CHECK(G(i, j) == direct);
      }
    }
  }
}

TEST_CASE("gram is symmetric and positive semidefinite in spot checks") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd X = random_matrix(6, 3, 100 + trial);
    const KernelSpec spec =
        trial % 2 == 0 ? KernelSpec::linear() : KernelSpec::rbf(0.4);
    const GramMatrix G = gram(spec, X);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    for (int probe = 0; probe < 5; ++probe) {
      Eigen::VectorXd v(G.rows());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
      CHECK(v.dot(G * v) >= -1e-8 * v.squaredNorm());
    }
  }
}

TEST_CASE("gram rejects empty input") {
  Eigen::MatrixXd X(0, 3);
  CHECK_THROWS_AS(gram(KernelSpec::linear(), X), InputError);
}
