#include "musvm/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace musvm {

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(gamma > 0.0)) {
    throw InputError("rbf kernel requires gamma > 0, got " +
                     std::to_string(gamma));
  }
}

std::string to_string(KernelKind kind) {
  return kind == KernelKind::linear ? "linear" : "rbf";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  throw InputError("unknown kernel kind '" + name + "' (expected linear|rbf)");
}

namespace {

// Squared distance as ||x||^2 + ||z||^2 - 2 x.z, clamped at 0 so round-off
// never produces a negative value under the exponent.
double rbf_value(double gamma, double sq_x, double sq_z, double dot_xz) {
  const double sq_dist = std::max(0.0, sq_x + sq_z - 2.0 * dot_xz);
  return std::exp(-gamma * sq_dist);
}

}  // namespace

double eval_kernel(const KernelSpec& spec,
                   const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& z) {
  spec.validate();
  if (x.size() != z.size()) {
    throw InputError("eval_kernel: dimension mismatch (" +
                     std::to_string(x.size()) + " vs " +
                     std::to_string(z.size()) + ")");
  }
  if (x.size() == 0) throw InputError("eval_kernel: empty feature vectors");
  if (spec.kind == KernelKind::linear) return x.dot(z);
  return rbf_value(spec.gamma, x.dot(x), z.dot(z), x.dot(z));
}

GramMatrix gram(const KernelSpec& spec,
                const Eigen::Ref<const Eigen::MatrixXd>& X) {
  spec.validate();
  const Eigen::Index n = X.rows();
  if (n == 0 || X.cols() == 0) throw InputError("gram: empty sample matrix");

  // Contiguous row copies keep the dot-product floating path identical to
  // eval_kernel, so the matrix matches the pairwise calls bit for bit.
  std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)] = X.row(i).transpose();
  }

  GramMatrix values(n, n);
  if (spec.kind == KernelKind::linear) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const double v = rows[static_cast<std::size_t>(i)].dot(
            rows[static_cast<std::size_t>(j)]);
        values(i, j) = v;
        values(j, i) = v;
      }
    }
    return values;
  }

  // Cache x.dot(x) so the diagonal distance cancels to exactly 0.
  Eigen::VectorXd sq(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sq[i] = rows[static_cast<std::size_t>(i)].dot(rows[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = rbf_value(spec.gamma, sq[i], sq[j],
                                 rows[static_cast<std::size_t>(i)].dot(
                                     rows[static_cast<std::size_t>(j)]));
      values(i, j) = v;
      values(j, i) = v;
    }
    values(i, i) = 1.0;
  }
  return values;
}

Eigen::MatrixXd gram_cross(const KernelSpec& spec,
                           const Eigen::Ref<const Eigen::MatrixXd>& A,
                           const Eigen::Ref<const Eigen::MatrixXd>& B) {
  spec.validate();
  if (A.cols() != B.cols()) {
    throw InputError("gram_cross: dimension mismatch (" +
                     std::to_string(A.cols()) + " vs " +
                     std::to_string(B.cols()) + ")");
  }
  if (A.rows() == 0 || B.rows() == 0 || A.cols() == 0) {
    throw InputError("gram_cross: empty sample matrix");
  }
  std::vector<Eigen::VectorXd> rows_a(static_cast<std::size_t>(A.rows()));
  std::vector<Eigen::VectorXd> rows_b(static_cast<std::size_t>(B.rows()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    rows_a[static_cast<std::size_t>(i)] = A.row(i).transpose();
  }
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    rows_b[static_cast<std::size_t>(j)] = B.row(j).transpose();
  }
  Eigen::MatrixXd values(A.rows(), B.rows());
  if (spec.kind == KernelKind::linear) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < B.rows(); ++j)
        values(i, j) = rows_a[static_cast<std::size_t>(i)].dot(
            rows_b[static_cast<std::size_t>(j)]);
    return values;
  }
  Eigen::VectorXd sq_a(A.rows()), sq_b(B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    sq_a[i] = rows_a[static_cast<std::size_t>(i)].dot(rows_a[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    sq_b[j] = rows_b[static_cast<std::size_t>(j)].dot(rows_b[static_cast<std::size_t>(j)]);
  }
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.rows(); ++j)
      values(i, j) = rbf_value(spec.gamma, sq_a[i], sq_b[j],
                               rows_a[static_cast<std::size_t>(i)].dot(
                                   rows_b[static_cast<std::size_t>(j)]));
  return values;
}

}  // namespace musvm
