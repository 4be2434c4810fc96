#pragma once

// Seeded synthetic data: L Gaussian class centers in d dimensions, training
// and test samples around the centers, universum drawn near the centers'
// mean (in-between universum).

#include <Eigen/Dense>
#include <random>
#include <string>

#include "musvm/dataset.hpp"

namespace musvm::testing {

struct SyntheticSpec {
  int L = 3;
  int d = 50;
  Eigen::Index n_per_class = 8;
  Eigen::Index m = 10;
  Eigen::Index test_per_class = 0;
  double center_scale = 3.0;
  /// Anisotropy of the center Gaussian: the first coordinate is drawn with
  /// scale center_scale * center_stretch. Values > 1 order the classes along
  /// a dominant direction so each sample has one clear rival class.
  double center_stretch = 1.0;
  double class_noise = 1.0;
  /// Coordinates carrying full class noise; the rest get 1% of it. Small
  /// ranks concentrate the margin support on a few extreme samples.
  int noise_rank = -1;  // -1 = all coordinates
  double universum_noise = 0.5;
  std::uint64_t seed = 0;
};

struct Synthetic {
  Dataset ds;
  LabeledData test;
};

inline Synthetic make_synthetic(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw_row = [&](Eigen::Index dim, double scale) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index c = 0; c < dim; ++c) v[c] = scale * normal(rng);
    return v;
  };

  Eigen::MatrixXd centers(spec.L, spec.d);
  for (int k = 0; k < spec.L; ++k) {
    centers.row(k) = draw_row(spec.d, spec.center_scale).transpose();
    centers(k, 0) *= spec.center_stretch;
  }
  const Eigen::VectorXd center_mean =
      centers.colwise().mean().transpose();

  const auto draw_noise = [&]() {
    Eigen::VectorXd v = draw_row(spec.d, spec.class_noise);
    if (spec.noise_rank >= 0 && spec.noise_rank < spec.d) {
      v.tail(spec.d - spec.noise_rank) *= 0.01;
    }
    return v;
  };

  Synthetic out;
  const Eigen::Index n = spec.n_per_class * spec.L;
  out.ds.train_X.resize(n, spec.d);
  out.ds.train_y.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < spec.L; ++k) {
    out.ds.label_names.push_back(std::to_string(k + 1));
    for (Eigen::Index s = 0; s < spec.n_per_class; ++s) {
      const Eigen::Index row = k * spec.n_per_class + s;
      out.ds.train_X.row(row) =
          (centers.row(k).transpose() + draw_noise()).transpose();
      out.ds.train_y.push_back(k);
    }
  }

  out.ds.universum_X.resize(spec.m, spec.d);
  for (Eigen::Index j = 0; j < spec.m; ++j) {
    out.ds.universum_X.row(j) =
        (center_mean + draw_row(spec.d, spec.universum_noise)).transpose();
  }

  const Eigen::Index n_test = spec.test_per_class * spec.L;
  out.test.X.resize(n_test, spec.d);
  out.test.y.reserve(static_cast<std::size_t>(n_test));
  for (int k = 0; k < spec.L; ++k) {
    for (Eigen::Index s = 0; s < spec.test_per_class; ++s) {
      const Eigen::Index row = k * spec.test_per_class + s;
      out.test.X.row(row) =
          (centers.row(k).transpose() + draw_row(spec.d, spec.class_noise))
              .transpose();
      out.test.y.push_back(k);
    }
  }
  return out;
}

}  // namespace musvm::testing
