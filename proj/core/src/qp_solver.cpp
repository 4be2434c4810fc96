#include "musvm/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace musvm {

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw InputError("solver tol must be positive");
  if (max_outer_iters < 1) throw InputError("max_outer_iters must be >= 1");
}

double dual_objective(const Eigen::MatrixXd& alpha, const GramMatrix& gram,
                      const Eigen::MatrixXd& e) {
  if (alpha.rows() != gram.rows() || gram.rows() != gram.cols() ||
      alpha.rows() != e.rows() || alpha.cols() != e.cols()) {
    throw InputError("dual_objective: shape mismatch");
  }
  const double quad = (gram * alpha).cwiseProduct(alpha).sum();
  const double lin = alpha.cwiseProduct(e).sum();
  return -0.5 * quad - lin;
}

Eigen::VectorXd row_gradient(const Eigen::MatrixXd& alpha,
                             const GramMatrix& gram, const Eigen::MatrixXd& e,
                             Eigen::Index i) {
  if (alpha.rows() != gram.rows() || gram.rows() != gram.cols() ||
      alpha.rows() != e.rows() || alpha.cols() != e.cols()) {
    throw InputError("row_gradient: shape mismatch");
  }
  if (i < 0 || i >= alpha.rows()) throw InputError("row_gradient: bad row index");
  return (gram.row(i) * alpha).transpose() + e.row(i).transpose();
}

Eigen::VectorXd solve_subproblem(const Eigen::VectorXd& g, double k_ii,
                                 int y_i, double cost_i,
                                 const Eigen::VectorXd& alpha_i) {
  const Eigen::Index L = g.size();
  if (alpha_i.size() != L) throw InputError("solve_subproblem: shape mismatch");
  if (y_i < 0 || y_i >= L) throw InputError("solve_subproblem: bad label");
  if (cost_i < 0.0) throw InputError("solve_subproblem: negative cost");

  if (cost_i == 0.0) return Eigen::VectorXd::Zero(L);

  // Guard zero-norm rows; healthy k_ii passes through untouched so the
  // closed form stays exact.
  const double k = std::max(k_ii, 1e-12 * (1.0 + std::abs(k_ii)));
  if (!(k > 0.0)) {
    throw NumericError("solve_subproblem: non-positive diagonal " +
                       std::to_string(k_ii));
  }

  // min_v 1/2 k ||v||^2 + b.v  s.t.  sum v = 0, v <= u.
  Eigen::VectorXd b = g - k_ii * alpha_i;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(L);
  u[y_i] = cost_i;

  // v_l(nu) = min(u_l, -(b_l + nu)/k); component l unclamps at
  // nu_l = -b_l - k u_l. Sweep intervals of the sorted breakpoints for the
  // nu with sum_l v_l(nu) = 0.
  Eigen::VectorXd breakpoints = -b - k * u;
  std::vector<int> order(static_cast<std::size_t>(L));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int c) { return breakpoints[a] < breakpoints[c]; });

  double sum_u_clamped = u.sum();  // = cost_i
  double sum_b_open = 0.0;
  double nu = 0.0;
  for (Eigen::Index r = 0; r < L; ++r) {
    const int l = order[static_cast<std::size_t>(r)];
    sum_u_clamped -= u[l];
    sum_b_open += b[l];
    const double count = static_cast<double>(r + 1);
    nu = (k * sum_u_clamped - sum_b_open) / count;
    const bool last = (r + 1 == L);
    if (last || nu <= breakpoints[order[static_cast<std::size_t>(r + 1)]]) {
      break;
    }
  }

  Eigen::VectorXd v(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    v[l] = std::min(u[l], -(b[l] + nu) / k);
  }
  return v;
}

double row_kkt_violation(const Eigen::VectorXd& g,
                         const Eigen::VectorXd& alpha_i, int y_i,
                         double cost_i) {
  const Eigen::Index L = g.size();
  double max_g = -std::numeric_limits<double>::infinity();
  double min_open = std::numeric_limits<double>::infinity();
  for (Eigen::Index l = 0; l < L; ++l) {
    max_g = std::max(max_g, g[l]);
    const double bound = (l == y_i) ? cost_i : 0.0;
    if (alpha_i[l] < bound) min_open = std::min(min_open, g[l]);
  }
  if (!std::isfinite(min_open)) return 0.0;  // every coordinate at its bound
  return max_g - min_open;
}

namespace {

struct Scan {
  Eigen::Index row = -1;
  double violation = 0.0;
};

Scan scan_rows(const std::vector<Eigen::Index>& rows, const Eigen::MatrixXd& G,
               const Eigen::MatrixXd& alpha, const std::vector<int>& y,
               const Eigen::VectorXd& cost) {
  Scan best;
  for (const Eigen::Index i : rows) {
    const double v = row_kkt_violation(G.row(i), alpha.row(i),
                                       y[static_cast<std::size_t>(i)], cost[i]);
    if (v > best.violation) {
      best.violation = v;
      best.row = i;
    }
  }
  return best;
}

}  // namespace

DualSolution solve_dual(const AugmentedProblem& problem, const GramMatrix& gram,
                        const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index N = problem.rows();
  const int L = problem.n_classes;
  if (gram.rows() != N || gram.cols() != N) {
    throw InputError("solve_dual: gram must cover exactly the augmented rows");
  }

  DualSolution sol;
  sol.alpha = Eigen::MatrixXd::Zero(N, L);
  Eigen::MatrixXd G = problem.e;  // gradient matrix at alpha = 0

  std::vector<Eigen::Index> movable;  // rows whose box is not a single point
  for (Eigen::Index i = 0; i < N; ++i) {
    if (problem.cost[i] > 0.0) movable.push_back(i);
  }

  std::vector<Eigen::Index> active = movable;
  const long shrink_interval = std::max<long>(256, static_cast<long>(N));
  bool gradients_stale = false;  // true while shrunk rows hold stale G rows

  auto rebuild_gradients = [&]() {
    G.noalias() = gram * sol.alpha;
    G += problem.e;
    gradients_stale = false;
  };

  long iter = 0;
  while (true) {
    Scan best = scan_rows(active, G, sol.alpha, problem.y, problem.cost);

    if (best.violation <= cfg.tol) {
      // Apparent convergence on the active set: rescan everything with fresh
      // gradients before accepting.
      rebuild_gradients();
      active = movable;
      best = scan_rows(active, G, sol.alpha, problem.y, problem.cost);
      if (best.violation > cfg.tol) continue;  // resume on the full set
      sol.kkt_residual = best.violation;
      sol.status = SolveStatus::converged;
      break;
    }

    if (iter >= cfg.max_outer_iters) {
      rebuild_gradients();
      const Scan global = scan_rows(movable, G, sol.alpha, problem.y, problem.cost);
      sol.kkt_residual = global.violation;
      sol.status = SolveStatus::iteration_limit;
      break;
    }

    const Eigen::Index i = best.row;
    const Eigen::VectorXd v = solve_subproblem(
        G.row(i), gram(i, i), problem.y[static_cast<std::size_t>(i)],
        problem.cost[i], sol.alpha.row(i));
    const Eigen::VectorXd delta = v - sol.alpha.row(i).transpose();
    if (delta.cwiseAbs().maxCoeff() > 0.0) {
      if (active.size() == movable.size() && !gradients_stale) {
        G.noalias() += gram.col(i) * delta.transpose();
      } else {
        for (const Eigen::Index j : active) {
          G.row(j) += gram(j, i) * delta.transpose();
        }
      }
      sol.alpha.row(i) = v;
    }
    ++iter;

    if (cfg.shrink && iter % shrink_interval == 0 && active.size() > 1) {
      std::vector<Eigen::Index> keep;
      keep.reserve(active.size());
      for (const Eigen::Index r : active) {
        const double viol = row_kkt_violation(
            G.row(r), sol.alpha.row(r), problem.y[static_cast<std::size_t>(r)],
            problem.cost[r]);
        if (viol > cfg.tol) keep.push_back(r);
      }
      if (!keep.empty() && keep.size() < active.size()) {
        active = std::move(keep);
        gradients_stale = true;
      }
    }
  }

  sol.iterations = iter;
  sol.objective = dual_objective(sol.alpha, gram, problem.e);
  return sol;
}

}  // namespace musvm
