#pragma once

#include <Eigen/Dense>
#include <vector>

#include "musvm/model.hpp"

namespace musvm {

/// Margin coordinate of a sample against class k: f_k(x) - max_{l != k} f_l(x).
/// Positive iff the sample is classified as k (away from ties).
double margin_projection(const Eigen::Ref<const Eigen::VectorXd>& decision,
                         int k);

/// Per-class lists: the value for (x, y=k) goes into list k.
std::vector<std::vector<double>> project_training(
    const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
    const std::vector<int>& y);

/// L lists: every universum point is projected on every class coordinate.
std::vector<std::vector<double>> project_universum(
    const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& U);

/// Counts of predicted labels over the universum; sums to |U|.
std::vector<Eigen::Index> universum_label_frequencies(
    const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& U);

struct Histogram {
  std::vector<double> edges;        // bin_count + 1, strictly increasing
  std::vector<Eigen::Index> counts; // bin_count, sums to the input size
};

/// Uniform bins over [min, max + 1e-9]; counts are exhaustive.
Histogram histogram(const std::vector<double>& values, int bin_count);

/// Explicit edges variant.
Histogram histogram(const std::vector<double>& values,
                    const std::vector<double>& edges);

}  // namespace musvm
