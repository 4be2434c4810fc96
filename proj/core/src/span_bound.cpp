#include "musvm/span_bound.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <memory>

namespace musvm {

Eigen::MatrixXd build_H(const GramMatrix& K_sv1, int L) {
  const Eigen::Index p = K_sv1.rows();
  if (p == 0) throw InputError("build_H: no Type-1 support vectors");
  if (K_sv1.cols() != p) throw InputError("build_H: kernel block not square");
  if (L < 2) throw InputError("build_H: need at least 2 classes");

  const Eigen::Index dim = p * (L + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      for (int l = 0; l < L; ++l) {
        H(i * L + l, j * L + l) = K_sv1(i, j);
      }
    }
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    for (int l = 0; l < L; ++l) {
      H(p * L + i, i * L + l) = 1.0;
      H(i * L + l, p * L + i) = 1.0;
    }
  }
  return H;
}

namespace {

Eigen::MatrixXd zero_sum_basis(int L) {
  // Orthonormal basis of {v : 1^T v = 0}: trailing columns of the Householder
  // Q that maps the all-ones vector onto e_1.
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(L, 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(L - 1);
}

}  // namespace

SpanEngine::SpanEngine(const Eigen::MatrixXd& H, int L) : L_(L) {
  if (L < 2) throw InputError("SpanEngine: need at least 2 classes");
  if (H.rows() != H.cols() || H.rows() % (L + 1) != 0) {
    throw InputError("SpanEngine: H size does not match class count");
  }
  count_ = H.rows() / (L + 1);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(H);
  rcond_ = lu.rcond();
  if (!(rcond_ > 1e-12)) {
    // K_sv1 can be rank deficient (duplicated universum replicas share
    // kernel rows); nudge the K block diagonal and refactor.
    Eigen::MatrixXd Hreg = H;
    const Eigen::Index kdim = count_ * L_;
    const double mean_diag = H.topLeftCorner(kdim, kdim).diagonal().mean();
    Hreg.diagonal().head(kdim).array() += 1e-10 * (1.0 + mean_diag);
    lu.compute(Hreg);
    rcond_ = lu.rcond();
    if (!(rcond_ > 1e-14)) {
      throw NumericError(
          "span: H numerically singular after regularization",
          rcond_ > 0.0 ? 1.0 / rcond_
                       : std::numeric_limits<double>::infinity());
    }
  }
  h_inv_ = lu.inverse();
  zero_sum_basis_ = zero_sum_basis(L);
}

double SpanEngine::span(const Eigen::Ref<const Eigen::VectorXd>& alpha_t,
                        Eigen::Index t) const {
  if (t < 0 || t >= count_) throw InputError("span: SV1 position out of range");
  if (alpha_t.size() != L_) throw InputError("span: alpha row size mismatch");

  const Eigen::MatrixXd block =
      h_inv_.block(t * L_, t * L_, L_, L_);
  const Eigen::MatrixXd sym = 0.5 * (block + block.transpose());

  // Restrict to the zero-sum subspace: the all-ones direction is structurally
  // null in (H^-1)_tt and alpha_t lives in the complement.
  const Eigen::MatrixXd& Q = zero_sum_basis_;
  const Eigen::MatrixXd M = Q.transpose() * sym * Q;
  const Eigen::VectorXd y = Q.transpose() * alpha_t;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success) {
    throw NumericError("span: eigendecomposition failed", 1.0 / rcond_);
  }
  const Eigen::VectorXd& evals = es.eigenvalues();
  const double max_abs = evals.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) {
    if (y.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    throw NumericError("span: zero block with nonzero alpha", 1.0 / rcond_);
  }
  const double threshold = 1e-11 * max_abs;
  double value = 0.0;
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    if (std::abs(evals[k]) <= threshold) continue;
    const double proj = es.eigenvectors().col(k).dot(y);
    value += proj * proj / evals[k];
  }
  return value;
}

double span_formula(const Eigen::MatrixXd& H, int L,
                    const Eigen::Ref<const Eigen::VectorXd>& alpha_t,
                    Eigen::Index t) {
  return SpanEngine(H, L).span(alpha_t, t);
}

double span_qp_oracle(const GramMatrix& K_sv1,
                      const Eigen::MatrixXd& alphas_sv1, Eigen::Index t) {
  const Eigen::Index p = K_sv1.rows();
  const Eigen::Index L = alphas_sv1.cols();
  if (p == 0) throw InputError("span_qp_oracle: empty SV1 set");
  if (alphas_sv1.rows() != p || K_sv1.cols() != p) {
    throw InputError("span_qp_oracle: shape mismatch");
  }
  if (t < 0 || t >= p) throw InputError("span_qp_oracle: bad SV1 position");

  const Eigen::VectorXd alpha_t = alphas_sv1.row(t).transpose();
  if (p == 1) {
    // beta is fixed entirely by the constraints.
    return K_sv1(0, 0) * alpha_t.squaredNorm();
  }

  // KKT system over the free rows (all SV1 rows except t), one zero-sum
  // multiplier per free row:
  //   sum_j K_ij beta_j + mu_i 1 = -K_it alpha_t      (L rows per i)
  //   1^T beta_i = 0                                  (1 row per i)
  const Eigen::Index q = p - 1;
  const Eigen::Index dim = q * L + q;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

  std::vector<Eigen::Index> free_rows;
  free_rows.reserve(static_cast<std::size_t>(q));
  for (Eigen::Index i = 0; i < p; ++i) {
    if (i != t) free_rows.push_back(i);
  }

  for (Eigen::Index a = 0; a < q; ++a) {
    const Eigen::Index i = free_rows[static_cast<std::size_t>(a)];
    for (Eigen::Index b = 0; b < q; ++b) {
      const Eigen::Index j = free_rows[static_cast<std::size_t>(b)];
      for (Eigen::Index l = 0; l < L; ++l) {
        M(a * L + l, b * L + l) = K_sv1(i, j);
      }
    }
    for (Eigen::Index l = 0; l < L; ++l) {
      M(a * L + l, q * L + a) = 1.0;
      M(q * L + a, a * L + l) = 1.0;
      rhs[a * L + l] = -K_sv1(i, t) * alpha_t[l];
    }
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
  const Eigen::VectorXd z = cod.solve(rhs);
  const double residual = (M * z - rhs).norm();
  const double scale = std::max(1.0, rhs.norm());
  if (!(residual <= 1e-8 * scale)) {
    throw NumericError("span_qp_oracle: inconsistent KKT system (residual " +
                       std::to_string(residual) + ")");
  }

  // Evaluate the objective at the minimizer.
  double value = K_sv1(t, t) * alpha_t.squaredNorm();
  for (Eigen::Index a = 0; a < q; ++a) {
    const Eigen::Index i = free_rows[static_cast<std::size_t>(a)];
    const Eigen::VectorXd beta_i = z.segment(a * L, L);
    value += 2.0 * K_sv1(i, t) * beta_i.dot(alpha_t);
    for (Eigen::Index b = 0; b < q; ++b) {
      const Eigen::Index j = free_rows[static_cast<std::size_t>(b)];
      value += K_sv1(i, j) * beta_i.dot(z.segment(b * L, L));
    }
  }
  return value;
}

SpanReport loo_bound(const DualSolution& solution, const SVPartition& partition,
                     const GramMatrix& gram, const AugmentedProblem& problem) {
  const Eigen::Index n = problem.n_train;
  if (n <= 0) throw InputError("loo_bound: no training rows");

  SpanReport report;
  report.n_train = n;
  report.assumption2_fraction =
      check_assumption2(solution, partition, partition.sv_eps);
  for (const Eigen::Index i : partition.sv2) {
    if (i < n) ++report.sv2_train_count;
  }
  for (const Eigen::Index i : partition.sv1) {
    if (i < n) report.sv1_train.push_back(i);
  }
  if (report.sv1_train.empty()) {
    report.bound = static_cast<double>(report.sv2_train_count) /
                   static_cast<double>(n);
    return report;
  }

  const auto& sv1 = partition.sv1;
  const Eigen::Index p = static_cast<Eigen::Index>(sv1.size());
  GramMatrix K_sv1(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = 0; b < p; ++b) {
      K_sv1(a, b) = gram(sv1[static_cast<std::size_t>(a)],
                         sv1[static_cast<std::size_t>(b)]);
    }
  }

  // rhs_t = sum_l alpha_tl f_l(x_t), decision values from every support row
  // (universum support rows included).
  const Eigen::MatrixXd F = gram * solution.alpha;

  std::unique_ptr<SpanEngine> engine;
  try {
    engine = std::make_unique<SpanEngine>(build_H(K_sv1, problem.n_classes),
                                          problem.n_classes);
  } catch (const NumericError&) {
    report.factorization_failed = true;
  }

  Eigen::Index flagged_count = 0;
  for (const Eigen::Index t : report.sv1_train) {
    const auto pos_it = std::find(sv1.begin(), sv1.end(), t);
    const Eigen::Index pos = pos_it - sv1.begin();
    const double rhs = solution.alpha.row(t).dot(F.row(t));
    double span_value = std::numeric_limits<double>::quiet_NaN();
    bool flag;
    if (engine) {
      try {
        span_value = engine->span(solution.alpha.row(t).transpose(), pos);
        flag = span_value >= rhs;
      } catch (const NumericError&) {
        flag = true;  // conservative: a failed span counts toward the bound
        ++report.span_failures;
      }
    } else {
      flag = true;
      ++report.span_failures;
    }
    report.span_values.push_back(span_value);
    report.rhs_values.push_back(rhs);
    report.flagged.push_back(flag);
    if (flag) ++flagged_count;
  }

  report.bound = static_cast<double>(flagged_count + report.sv2_train_count) /
                 static_cast<double>(n);
  return report;
}

LooResult exact_loo(const AugmentedProblem& problem, const GramMatrix& gram,
                    const SolverConfig& cfg) {
  const Eigen::Index n = problem.n_train;
  if (n <= 0) throw InputError("exact_loo: no training rows");

  const double sv_eps = 1e-8 * problem.cost.maxCoeff();
  const DualSolution base = solve_dual(problem, gram, cfg);
  const SVPartition base_part =
      categorize_svs(base, problem.cost, problem.y, sv_eps);

  auto sets_without = [](const std::vector<Eigen::Index>& v, Eigen::Index t) {
    std::vector<Eigen::Index> out;
    out.reserve(v.size());
    for (const Eigen::Index i : v) {
      if (i != t) out.push_back(i);
    }
    return out;
  };

  LooResult result;
  result.all_converged = base.converged();
  result.predicted.resize(static_cast<std::size_t>(n));
  result.errored.resize(static_cast<std::size_t>(n));

  AugmentedProblem fold = problem;
  Eigen::Index wrong = 0;
  Eigen::Index preserved = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double saved_cost = fold.cost[t];
    fold.cost[t] = 0.0;  // collapses row t's box to alpha_t = 0
    const DualSolution sol = solve_dual(fold, gram, cfg);
    fold.cost[t] = saved_cost;
    if (!sol.converged()) result.all_converged = false;

    const Eigen::VectorXd decision =
        (gram.row(t) * sol.alpha).transpose();
    int pred = 0;
    for (int l = 1; l < problem.n_classes; ++l) {
      if (decision[l] > decision[pred]) pred = l;
    }
    result.predicted[static_cast<std::size_t>(t)] = pred;
    const bool err = pred != problem.y[static_cast<std::size_t>(t)];
    result.errored[static_cast<std::size_t>(t)] = err;
    if (err) ++wrong;

    const SVPartition fold_part =
        categorize_svs(sol, fold.cost, fold.y, sv_eps);
    if (sets_without(fold_part.sv1, t) == sets_without(base_part.sv1, t) &&
        sets_without(fold_part.sv2, t) == sets_without(base_part.sv2, t)) {
      ++preserved;
    }
  }

  result.error_rate = static_cast<double>(wrong) / static_cast<double>(n);
  result.assumption1_fraction =
      static_cast<double>(preserved) / static_cast<double>(n);
  return result;
}

double check_assumption2(const DualSolution& solution,
                         const SVPartition& partition, double sv_eps) {
  if (partition.sv1.empty()) return 1.0;
  Eigen::Index two_active = 0;
  for (const Eigen::Index i : partition.sv1) {
    Eigen::Index active = 0;
    for (Eigen::Index l = 0; l < solution.alpha.cols(); ++l) {
      if (std::abs(solution.alpha(i, l)) > sv_eps) ++active;
    }
    if (active == 2) ++two_active;
  }
  return static_cast<double>(two_active) /
         static_cast<double>(partition.sv1.size());
}

std::string span_report_to_json_string(const SpanReport& report) {
  nlohmann::json j;
  j["n_train"] = report.n_train;
  j["sv1_train"] = report.sv1_train;
  j["sv2_train_count"] = report.sv2_train_count;
  j["span_values"] = report.span_values;
  j["rhs_values"] = report.rhs_values;
  j["flagged"] = report.flagged;
  j["bound"] = report.bound;
  j["assumption2_fraction"] = report.assumption2_fraction;
  j["factorization_failed"] = report.factorization_failed;
  j["span_failures"] = report.span_failures;
  return j.dump(2) + "\n";
}

}  // namespace musvm
