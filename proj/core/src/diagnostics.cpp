#include "musvm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace musvm {

double margin_projection(const Eigen::Ref<const Eigen::VectorXd>& decision,
                         int k) {
  double best_other = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < decision.size(); ++l) {
    if (l != k) best_other = std::max(best_other, decision[l]);
  }
  return decision[k] - best_other;
}

std::vector<std::vector<double>> project_training(
    const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& X,
    const std::vector<int>& y) {
  if (X.rows() == 0) throw InputError("project_training: empty sample set");
  if (static_cast<Eigen::Index>(y.size()) != X.rows()) {
    throw InputError("project_training: label count mismatch");
  }
  std::vector<std::vector<double>> lists(
      static_cast<std::size_t>(model.n_classes));
  const Eigen::MatrixXd F = decision_matrix(model, X);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    const int k = y[static_cast<std::size_t>(r)];
    if (k < 0 || k >= model.n_classes) {
      throw InputError("project_training: label out of range at row " +
                       std::to_string(r));
    }
    lists[static_cast<std::size_t>(k)].push_back(
        margin_projection(F.row(r).transpose(), k));
  }
  return lists;
}

std::vector<std::vector<double>> project_universum(
    const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& U) {
  if (U.rows() == 0) throw InputError("project_universum: empty universum");
  std::vector<std::vector<double>> lists(
      static_cast<std::size_t>(model.n_classes));
  const Eigen::MatrixXd F = decision_matrix(model, U);
  for (Eigen::Index r = 0; r < U.rows(); ++r) {
    for (int k = 0; k < model.n_classes; ++k) {
      lists[static_cast<std::size_t>(k)].push_back(
          margin_projection(F.row(r).transpose(), k));
    }
  }
  return lists;
}

std::vector<Eigen::Index> universum_label_frequencies(
    const Model& model, const Eigen::Ref<const Eigen::MatrixXd>& U) {
  if (U.rows() == 0) {
    throw InputError("universum_label_frequencies: empty universum");
  }
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(model.n_classes), 0);
  const Eigen::MatrixXd F = decision_matrix(model, U);
  for (Eigen::Index r = 0; r < U.rows(); ++r) {
    int best = 0;
    for (int l = 1; l < model.n_classes; ++l) {
      if (F(r, l) > F(r, best)) best = l;
    }
    ++counts[static_cast<std::size_t>(best)];
  }
  return counts;
}

Histogram histogram(const std::vector<double>& values, int bin_count) {
  if (values.empty()) throw InputError("histogram: empty value list");
  if (bin_count < 1) throw InputError("histogram: need at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it + 1e-9;  // widen so the max lands inside
  std::vector<double> edges(static_cast<std::size_t>(bin_count) + 1);
  const double width = (hi - lo) / bin_count;
  for (int b = 0; b <= bin_count; ++b) {
    edges[static_cast<std::size_t>(b)] = lo + width * b;
  }
  edges.back() = hi;
  return histogram(values, edges);
}

Histogram histogram(const std::vector<double>& values,
                    const std::vector<double>& edges) {
  if (values.empty()) throw InputError("histogram: empty value list");
  if (edges.size() < 2) throw InputError("histogram: need at least two edges");
  for (std::size_t b = 1; b < edges.size(); ++b) {
    if (!(edges[b] > edges[b - 1])) {
      throw InputError("histogram: edges must be strictly increasing");
    }
  }
  Histogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0);
  const std::size_t bins = h.counts.size();
  for (const double v : values) {
    // Clamp into the edge range so counts stay exhaustive.
    std::size_t b = std::upper_bound(edges.begin(), edges.end(), v) -
                    edges.begin();
    b = b == 0 ? 0 : b - 1;
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

}  // namespace musvm
