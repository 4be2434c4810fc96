#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "musvm/errors.hpp"

namespace musvm {

/// Labeled training data plus unlabeled universum samples.
///
/// Labels are stored 0-based internally; `label_names[l]` is the external
/// token for internal class l, in first-appearance order of the training file.
struct Dataset {
  Eigen::MatrixXd train_X;              // n x d
  std::vector<int> train_y;             // internal labels in [0, L)
  Eigen::MatrixXd universum_X;          // m x d (m may be 0)
  std::vector<std::string> label_names; // size L

  Eigen::Index n() const { return train_X.rows(); }
  Eigen::Index m() const { return universum_X.rows(); }
  Eigen::Index dim() const { return train_X.cols(); }
  int n_classes() const { return static_cast<int>(label_names.size()); }

  void validate() const;
};

struct LabeledData {
  Eigen::MatrixXd X;
  std::vector<int> y;  // internal labels
};

/// Training rows are `label,f1,...,fd`; universum rows are `f1,...,fd`.
/// Lines starting with '#' are skipped. An empty `universum_path` means no
/// universum file; an empty universum file yields m = 0.
Dataset load_csv(const std::string& train_path,
                 const std::string& universum_path = "");

/// Parse a labeled CSV against an existing label map. Unknown labels are an
/// input error naming the row.
LabeledData load_labeled_csv(const std::string& path,
                             const std::vector<std::string>& label_names);

/// Unlabeled CSV (`f1,...,fd` per row).
Eigen::MatrixXd load_unlabeled_csv(const std::string& path);

/// The training + universum problem rewritten as one multiclass SVM over
/// n + m*L rows. Universum replicas are sample-major, label-minor:
/// row n + j*L + l is universum point j assigned label l.
struct AugmentedProblem {
  Eigen::MatrixXd X;       // (n+mL) x d
  std::vector<int> y;      // assigned labels, in [0, L)
  Eigen::MatrixXd e;       // (n+mL) x L margin offsets
  Eigen::VectorXd cost;    // C for training rows, C* for universum rows
  Eigen::Index n_train = 0;
  Eigen::Index m_universum = 0;
  int n_classes = 0;
  double delta = 0.0;

  Eigen::Index rows() const { return X.rows(); }
  bool is_training_row(Eigen::Index i) const { return i < n_train; }
};

/// Build the augmented problem. Universum rows are emitted even when
/// cstar = 0 (their box then forces alpha = 0), so the alpha shape does not
/// depend on cstar.
AugmentedProblem augment(const Dataset& ds, double delta, double C,
                         double cstar);

/// The fixed-ratio default C*/C = n/(mL).
double default_cstar_ratio(Eigen::Index n, Eigen::Index m, int L);

/// Order-sensitive hash of the raw sample values and labels; used to detect
/// model/data mismatches.
std::uint64_t data_hash(const Dataset& ds);

}  // namespace musvm
