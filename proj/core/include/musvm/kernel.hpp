#pragma once

#include <Eigen/Dense>
#include <string>

#include "musvm/errors.hpp"

namespace musvm {

enum class KernelKind { linear, rbf };

/// Kernel description. gamma is only meaningful for rbf, where
/// K(x,z) = exp(-gamma * ||x-z||^2).
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double gamma = 0.0;

  static KernelSpec linear() { return {KernelKind::linear, 0.0}; }
  static KernelSpec rbf(double gamma) { return {KernelKind::rbf, gamma}; }

  void validate() const;
};

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Dense symmetric kernel matrix over one sample set.
using GramMatrix = Eigen::MatrixXd;

double eval_kernel(const KernelSpec& spec,
                   const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& z);

/// values(i,j) = eval_kernel(spec, X.row(i), X.row(j)), bit-identical to the
/// pairwise scalar calls. Diagonal is exactly 1 for rbf.
GramMatrix gram(const KernelSpec& spec,
                const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Cross-kernel block: values(i,j) = eval_kernel(spec, A.row(i), B.row(j)).
Eigen::MatrixXd gram_cross(const KernelSpec& spec,
                           const Eigen::Ref<const Eigen::MatrixXd>& A,
                           const Eigen::Ref<const Eigen::MatrixXd>& B);

}  // namespace musvm
