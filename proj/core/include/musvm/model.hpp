#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "musvm/dataset.hpp"
#include "musvm/kernel.hpp"
#include "musvm/qp_solver.hpp"

namespace musvm {

struct TrainMeta {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  double delta = 0.0;
  double C = 1.0;
  double cstar = 0.0;
  double tol = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t data_hash = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  long iterations = 0;
  bool converged = true;
};

/// Trained model: kernel plus the rows whose alpha is not identically zero.
/// Dropping the zero rows leaves every decision value bit-identical.
struct Model {
  KernelSpec kernel;
  int n_classes = 0;
  Eigen::Index dim = 0;
  std::vector<std::string> label_names;
  Eigen::MatrixXd support_X;               // s x d
  Eigen::MatrixXd support_alpha;           // s x L
  std::vector<Eigen::Index> support_rows;  // original augmented-row indices
  std::vector<int> support_y;
  TrainMeta meta;
};

/// Definition-1 partition: sv1 holds rows with alpha_{i,y_i} strictly inside
/// (sv_eps, cost_i - sv_eps), sv2 rows at the upper box bound, non_sv the rest.
struct SVPartition {
  std::vector<Eigen::Index> sv1;
  std::vector<Eigen::Index> sv2;
  std::vector<Eigen::Index> non_sv;
  double sv_eps = 0.0;
};

double default_sv_eps(double C, double cstar);

SVPartition categorize_svs(const DualSolution& solution,
                           const Eigen::VectorXd& costs,
                           const std::vector<int>& labels, double sv_eps);

/// Keep rows whose alpha has at least one entry with |a| > sv_eps
/// (default: only exact zero rows are dropped).
Model make_model(const KernelSpec& kernel, const AugmentedProblem& problem,
                 const DualSolution& solution,
                 const std::vector<std::string>& label_names,
                 const TrainMeta& meta, double sv_eps = 0.0);

/// f_l(x) = sum_i alpha_il K(x_i, x) over the support rows.
Eigen::VectorXd decision_values(const Model& model,
                                const Eigen::Ref<const Eigen::VectorXd>& x);

/// Batch form: row r of the result is decision_values(model, X.row(r)).
Eigen::MatrixXd decision_matrix(const Model& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Internal label of argmax_l f_l(x); ties break to the smallest index.
int predict(const Model& model, const Eigen::Ref<const Eigen::VectorXd>& x);

std::string predict_label(const Model& model,
                          const Eigen::Ref<const Eigen::VectorXd>& x);

/// Fraction misclassified on a nonempty labeled set.
double evaluate(const Model& model,
                const Eigen::Ref<const Eigen::MatrixXd>& test_X,
                const std::vector<int>& test_y);

// --- serialization (single JSON document; exact round-trip) ---

std::string model_to_json_string(const Model& model);
Model model_from_json_string(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

// --- one-call training used by the CLI and model selection ---

struct TrainParams {
  KernelSpec kernel;
  double C = 1.0;
  double cstar = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

struct Trained {
  AugmentedProblem problem;
  GramMatrix gram;
  DualSolution solution;
  SVPartition partition;
  Model model;
};

Trained train(const Dataset& ds, const TrainParams& params,
              const SolverConfig& cfg);

}  // namespace musvm
