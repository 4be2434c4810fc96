#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace musvm::testing {

double brute_objective(const Eigen::MatrixXd& alpha, const Eigen::MatrixXd& K,
                       const Eigen::MatrixXd& e) {
  const Eigen::Index N = alpha.rows();
  const Eigen::Index L = alpha.cols();
  double quad = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      for (Eigen::Index l = 0; l < L; ++l) {
        quad += alpha(i, l) * alpha(j, l) * K(i, j);
      }
    }
  }
  double lin = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index l = 0; l < L; ++l) {
      lin += alpha(i, l) * e(i, l);
    }
  }
  return -0.5 * quad - lin;
}

Eigen::VectorXd bisect_project_row(const Eigen::VectorXd& z, int y_i,
                                   double cost_i) {
  const Eigen::Index L = z.size();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(L);
  u[y_i] = cost_i;

  const auto value_at = [&](double theta) {
    Eigen::VectorXd v(L);
    for (Eigen::Index l = 0; l < L; ++l) v[l] = std::min(u[l], z[l] - theta);
    return v;
  };

  double lo = z.minCoeff() - std::max(1.0, cost_i);  // all clamped: sum >= 0
  double hi = z.maxCoeff();                          // sum <= 0
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (value_at(mid).sum() > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return value_at(0.5 * (lo + hi));
}

Eigen::VectorXd pg_subproblem(const Eigen::VectorXd& g, double k_ii, int y_i,
                              double cost_i, const Eigen::VectorXd& alpha_i,
                              int iters) {
  if (cost_i == 0.0) return Eigen::VectorXd::Zero(g.size());
  const double k = std::max(k_ii, 1e-12 * (1.0 + std::abs(k_ii)));
  const Eigen::VectorXd b = g - k_ii * alpha_i;
  const double step = 0.7 / k;
  Eigen::VectorXd v = bisect_project_row(Eigen::VectorXd::Zero(g.size()), y_i,
                                         cost_i);
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd grad = k * v + b;
    v = bisect_project_row(v - step * grad, y_i, cost_i);
  }
  return v;
}

namespace {

Eigen::MatrixXd project_all(const Eigen::MatrixXd& target,
                            const AugmentedProblem& problem) {
  Eigen::MatrixXd out(target.rows(), target.cols());
  for (Eigen::Index i = 0; i < target.rows(); ++i) {
    out.row(i) = bisect_project_row(target.row(i).transpose(),
                                    problem.y[static_cast<std::size_t>(i)],
                                    problem.cost[i])
                     .transpose();
  }
  return out;
}

}  // namespace

PgSolution pg_full(const AugmentedProblem& problem, const Eigen::MatrixXd& K,
                   int iters) {
  const Eigen::Index N = problem.rows();
  const Eigen::Index L = problem.n_classes;

  // Step from the max absolute row sum, an upper bound on lambda_max(K).
  double row_sum = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    row_sum = std::max(row_sum, K.row(i).cwiseAbs().sum());
  }
  const double step = 1.0 / std::max(row_sum, 1e-10);

  // Accelerated projected gradient with O'Donoghue-Candes restart on the
  // (convex) negated dual, plus a plain-step fixed-point check.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(N, L);
  Eigen::MatrixXd x_prev = x;
  double t = 1.0;
  for (int it = 0; it < iters; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    const Eigen::MatrixXd y = x + momentum * (x - x_prev);
    const Eigen::MatrixXd grad = K * y + problem.e;  // gradient of -W
    const Eigen::MatrixXd x_new = project_all(y - step * grad, problem);

    const double restart_test = ((y - x_new).cwiseProduct(x_new - x)).sum();
    x_prev = x;
    x = x_new;
    if (restart_test > 0.0) {
      t = 1.0;
      x_prev = x;
    } else {
      t = t_next;
    }

    if (it % 100 == 99) {
      const Eigen::MatrixXd plain =
          project_all(x - step * (K * x + problem.e), problem);
      const double scale = 1.0 + x.cwiseAbs().maxCoeff();
      if ((plain - x).cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
    }
  }
  return {x, brute_objective(x, K, problem.e)};
}

}  // namespace musvm::testing
