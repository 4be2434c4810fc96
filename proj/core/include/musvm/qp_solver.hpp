#pragma once

#include <Eigen/Dense>

#include "musvm/dataset.hpp"
#include "musvm/kernel.hpp"

namespace musvm {

struct SolverConfig {
  double tol = 1e-3;            // KKT stopping threshold
  long max_outer_iters = 1000000;
  bool shrink = true;           // temporarily skip rows that look settled

  void validate() const;
};

enum class SolveStatus { converged, iteration_limit };

/// Solution of the dual: alpha is (n+mL) x L with zero row sums,
/// alpha(i, y_i) in [0, cost_i] and alpha(i, l) <= 0 for l != y_i.
struct DualSolution {
  Eigen::MatrixXd alpha;
  double objective = 0.0;
  double kkt_residual = 0.0;
  long iterations = 0;
  SolveStatus status = SolveStatus::converged;

  bool converged() const { return status == SolveStatus::converged; }
};

/// W(alpha) = -1/2 sum_{i,j,l} a_il a_jl K_ij - sum_{i,l} a_il e_il.
double dual_objective(const Eigen::MatrixXd& alpha, const GramMatrix& gram,
                      const Eigen::MatrixXd& e);

/// G_il = sum_j alpha_jl K_ij + e_il; dW/da_il = -G_il.
Eigen::VectorXd row_gradient(const Eigen::MatrixXd& alpha,
                             const GramMatrix& gram, const Eigen::MatrixXd& e,
                             Eigen::Index i);

/// Exact minimizer of the one-row quadratic with the other rows frozen:
///   min_v  1/2 k_ii ||v||^2 + v . (g - k_ii alpha_i)
///   s.t.   sum_l v_l = 0,  v_{y_i} <= cost_i,  v_l <= 0 for l != y_i,
/// where g is the current row gradient. Solved by a sorted breakpoint sweep
/// on the equality multiplier; exact in the active set.
Eigen::VectorXd solve_subproblem(const Eigen::VectorXd& g, double k_ii,
                                 int y_i, double cost_i,
                                 const Eigen::VectorXd& alpha_i);

/// Row-decomposition solve of the dual over the augmented problem: repeatedly
/// pick the row with the largest KKT violation and solve its subproblem.
DualSolution solve_dual(const AugmentedProblem& problem, const GramMatrix& gram,
                        const SolverConfig& cfg);

/// KKT violation of one row given its gradient: max_l G_l minus the smallest
/// G_l over coordinates strictly below their bound; 0 when the row is at its
/// unique feasible point.
double row_kkt_violation(const Eigen::VectorXd& g, const Eigen::VectorXd& alpha_i,
                         int y_i, double cost_i);

}  // namespace musvm
