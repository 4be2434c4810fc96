#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "musvm/dataset.hpp"
#include "musvm/kernel.hpp"
#include "musvm/model.hpp"
#include "musvm/qp_solver.hpp"

namespace musvm {

/// Leave-one-out bound report. Per-t arrays are aligned with `sv1_train`
/// (training rows that are Type-1 support vectors, original row indices).
struct SpanReport {
  std::vector<Eigen::Index> sv1_train;
  Eigen::Index sv2_train_count = 0;
  std::vector<double> span_values;
  std::vector<double> rhs_values;
  std::vector<bool> flagged;
  double bound = 0.0;
  double assumption2_fraction = 1.0;
  Eigen::Index n_train = 0;
  bool factorization_failed = false;
  Eigen::Index span_failures = 0;
};

std::string span_report_to_json_string(const SpanReport& report);

/// H = [[K_sv1 (x) I_L, A^T], [A, 0]] with A = I_{|SV1|} (x) 1_L^T;
/// square of size |SV1|*(L+1).
Eigen::MatrixXd build_H(const GramMatrix& K_sv1, int L);

/// Factors the regularized H once and serves per-t span values
///   S_t^2 = a_t^T pinv((H^-1)_tt) a_t
/// with the pseudo-inverse taken on the zero-sum subspace.
class SpanEngine {
 public:
  SpanEngine(const Eigen::MatrixXd& H, int L);

  /// t is the position of the support vector within the SV1 ordering.
  double span(const Eigen::Ref<const Eigen::VectorXd>& alpha_t,
              Eigen::Index t) const;

  Eigen::Index sv1_count() const { return count_; }
  double rcond() const { return rcond_; }

 private:
  Eigen::MatrixXd h_inv_;
  Eigen::MatrixXd zero_sum_basis_;  // L x (L-1), orthonormal, perpendicular to 1
  int L_ = 0;
  Eigen::Index count_ = 0;
  double rcond_ = 0.0;
};

/// One-shot convenience around SpanEngine.
double span_formula(const Eigen::MatrixXd& H, int L,
                    const Eigen::Ref<const Eigen::VectorXd>& alpha_t,
                    Eigen::Index t);

/// Independent route: the constrained least-norm problem
///   min_beta sum_{i,j in SV1} (sum_l beta_il beta_jl) K_ij
///   s.t. beta_t = alpha_t, sum_l beta_il = 0,
/// solved as one exact KKT linear system. Arbitrates span_formula.
double span_qp_oracle(const GramMatrix& K_sv1,
                      const Eigen::MatrixXd& alphas_sv1, Eigen::Index t);

/// The leave-one-out upper bound: count of flagged Type-1 training SVs
/// (span >= decision alignment) plus all Type-2 training SVs, over n.
/// Failed span computations are flagged conservatively.
SpanReport loo_bound(const DualSolution& solution, const SVPartition& partition,
                     const GramMatrix& gram, const AugmentedProblem& problem);

struct LooResult {
  double error_rate = 0.0;
  std::vector<int> predicted;  // per training row, internal labels
  std::vector<bool> errored;
  bool all_converged = true;
  /// Fraction of folds whose SV1/SV2 sets (minus the held-out row) match the
  /// full solve; 1.0 means the leave-one-out procedure kept SV sets intact.
  double assumption1_fraction = 0.0;
};

/// Exact leave-one-out: retrains with each training row's box collapsed to
/// {0} and predicts the held-out sample from the remaining rows.
LooResult exact_loo(const AugmentedProblem& problem, const GramMatrix& gram,
                    const SolverConfig& cfg);

/// Fraction of Type-1 support vectors whose alpha row has exactly two entries
/// above sv_eps in magnitude; 1.0 when SV1 is empty.
double check_assumption2(const DualSolution& solution,
                         const SVPartition& partition, double sv_eps);

}  // namespace musvm
