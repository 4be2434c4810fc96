#include "musvm/model.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace musvm {

double default_sv_eps(double C, double cstar) {
  return 1e-8 * std::max(C, cstar);
}

SVPartition categorize_svs(const DualSolution& solution,
                           const Eigen::VectorXd& costs,
                           const std::vector<int>& labels, double sv_eps) {
  const Eigen::Index N = solution.alpha.rows();
  if (costs.size() != N || static_cast<Eigen::Index>(labels.size()) != N) {
    throw InputError("categorize_svs: shape mismatch");
  }
  SVPartition part;
  part.sv_eps = sv_eps;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double a = solution.alpha(i, labels[static_cast<std::size_t>(i)]);
    const double c = costs[i];
    if (a >= c - sv_eps) {
      part.sv2.push_back(i);
    } else if (a > sv_eps) {
      part.sv1.push_back(i);
    } else {
      part.non_sv.push_back(i);
    }
  }
  return part;
}

Model make_model(const KernelSpec& kernel, const AugmentedProblem& problem,
                 const DualSolution& solution,
                 const std::vector<std::string>& label_names,
                 const TrainMeta& meta, double sv_eps) {
  Model model;
  model.kernel = kernel;
  model.n_classes = problem.n_classes;
  model.dim = problem.X.cols();
  model.label_names = label_names;
  model.meta = meta;

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < solution.alpha.rows(); ++i) {
    if (solution.alpha.row(i).cwiseAbs().maxCoeff() > sv_eps) keep.push_back(i);
  }
  model.support_X.resize(static_cast<Eigen::Index>(keep.size()), model.dim);
  model.support_alpha.resize(static_cast<Eigen::Index>(keep.size()),
                             model.n_classes);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const Eigen::Index i = keep[r];
    model.support_X.row(static_cast<Eigen::Index>(r)) = problem.X.row(i);
    model.support_alpha.row(static_cast<Eigen::Index>(r)) =
        solution.alpha.row(i);
    model.support_rows.push_back(i);
    model.support_y.push_back(problem.y[static_cast<std::size_t>(i)]);
  }
  return model;
}

Eigen::VectorXd decision_values(const Model& model,
                                const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dim) {
    throw InputError("decision_values: expected dimension " +
                     std::to_string(model.dim) + ", got " +
                     std::to_string(x.size()));
  }
  Eigen::VectorXd f = Eigen::VectorXd::Zero(model.n_classes);
  for (Eigen::Index i = 0; i < model.support_X.rows(); ++i) {
    const double k = eval_kernel(model.kernel, model.support_X.row(i), x);
    f += k * model.support_alpha.row(i).transpose();
  }
  return f;
}

Eigen::MatrixXd decision_matrix(const Model& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& X) {
  if (X.cols() != model.dim) {
    throw InputError("decision_matrix: expected dimension " +
                     std::to_string(model.dim) + ", got " +
                     std::to_string(X.cols()));
  }
  Eigen::MatrixXd F(X.rows(), model.n_classes);
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    F.row(r) = decision_values(model, X.row(r).transpose()).transpose();
  }
  return F;
}

namespace {

int argmax_smallest_tie(const Eigen::Ref<const Eigen::VectorXd>& f) {
  int best = 0;
  for (int l = 1; l < f.size(); ++l) {
    if (f[l] > f[best]) best = l;
  }
  return best;
}

}  // namespace

int predict(const Model& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return argmax_smallest_tie(decision_values(model, x));
}

std::string predict_label(const Model& model,
                          const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.label_names[static_cast<std::size_t>(predict(model, x))];
}

double evaluate(const Model& model,
                const Eigen::Ref<const Eigen::MatrixXd>& test_X,
                const std::vector<int>& test_y) {
  if (test_X.rows() == 0) throw InputError("evaluate: empty test set");
  if (static_cast<Eigen::Index>(test_y.size()) != test_X.rows()) {
    throw InputError("evaluate: label count mismatch");
  }
  const Eigen::MatrixXd F = decision_matrix(model, test_X);
  Eigen::Index wrong = 0;
  for (Eigen::Index r = 0; r < test_X.rows(); ++r) {
    if (argmax_smallest_tie(F.row(r)) != test_y[static_cast<std::size_t>(r)]) {
      ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(test_X.rows());
}

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index cols_hint) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  Eigen::Index c = cols_hint;
  if (r > 0) c = static_cast<Eigen::Index>(rows.at(0).size());
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != c) {
      throw InputError("model JSON: ragged matrix");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      M(i, j) = row.at(static_cast<std::size_t>(j)).get<double>();
    }
  }
  return M;
}

}  // namespace

std::string model_to_json_string(const Model& model) {
  json j;
  j["format"] = "musvm-model-v1";
  j["kernel"] = to_string(model.kernel.kind);
  j["gamma"] = model.kernel.gamma;
  j["classes"] = model.n_classes;
  j["dim"] = model.dim;
  j["label_map"] = model.label_names;
  j["train_meta"] = {
      {"n", model.meta.n},
      {"m", model.meta.m},
      {"delta", model.meta.delta},
      {"C", model.meta.C},
      {"cstar", model.meta.cstar},
      {"tol", model.meta.tol},
      {"seed", model.meta.seed},
      {"data_hash", model.meta.data_hash},
      {"objective", model.meta.objective},
      {"kkt_residual", model.meta.kkt_residual},
      {"iterations", model.meta.iterations},
      {"converged", model.meta.converged},
  };
  j["support"] = {
      {"rows", model.support_rows},
      {"y", model.support_y},
      {"X", matrix_to_json(model.support_X)},
      {"alpha", matrix_to_json(model.support_alpha)},
  };
  return j.dump(2) + "\n";
}

Model model_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("model JSON parse error: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "musvm-model-v1") {
      throw InputError("model JSON: unknown format tag");
    }
    Model model;
    model.kernel.kind = kernel_kind_from_string(j.at("kernel").get<std::string>());
    model.kernel.gamma = j.at("gamma").get<double>();
    model.n_classes = j.at("classes").get<int>();
    model.dim = j.at("dim").get<Eigen::Index>();
    model.label_names = j.at("label_map").get<std::vector<std::string>>();
    const auto& meta = j.at("train_meta");
    model.meta.n = meta.at("n").get<Eigen::Index>();
    model.meta.m = meta.at("m").get<Eigen::Index>();
    model.meta.delta = meta.at("delta").get<double>();
    model.meta.C = meta.at("C").get<double>();
    model.meta.cstar = meta.at("cstar").get<double>();
    model.meta.tol = meta.at("tol").get<double>();
    model.meta.seed = meta.at("seed").get<std::uint64_t>();
    model.meta.data_hash = meta.at("data_hash").get<std::uint64_t>();
    model.meta.objective = meta.at("objective").get<double>();
    model.meta.kkt_residual = meta.at("kkt_residual").get<double>();
    model.meta.iterations = meta.at("iterations").get<long>();
    model.meta.converged = meta.at("converged").get<bool>();
    const auto& support = j.at("support");
    model.support_rows = support.at("rows").get<std::vector<Eigen::Index>>();
    model.support_y = support.at("y").get<std::vector<int>>();
    model.support_X = matrix_from_json(support.at("X"), model.dim);
    model.support_alpha = matrix_from_json(support.at("alpha"), model.n_classes);
    if (model.support_X.rows() != model.support_alpha.rows() ||
        model.support_X.rows() !=
            static_cast<Eigen::Index>(model.support_rows.size())) {
      throw InputError("model JSON: inconsistent support block");
    }
    return model;
  } catch (const json::exception& e) {
    throw InputError(std::string("model JSON field error: ") + e.what());
  }
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model file: " + path);
  out << model_to_json_string(model);
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json_string(buf.str());
}

Trained train(const Dataset& ds, const TrainParams& params,
              const SolverConfig& cfg) {
  params.kernel.validate();
  Trained out;
  out.problem = augment(ds, params.delta, params.C, params.cstar);
  out.gram = gram(params.kernel, out.problem.X);
  out.solution = solve_dual(out.problem, out.gram, cfg);
  out.partition =
      categorize_svs(out.solution, out.problem.cost, out.problem.y,
                     default_sv_eps(params.C, params.cstar));

  TrainMeta meta;
  meta.n = ds.n();
  meta.m = ds.m();
  meta.delta = params.delta;
  meta.C = params.C;
  meta.cstar = params.cstar;
  meta.tol = cfg.tol;
  meta.seed = params.seed;
  meta.data_hash = data_hash(ds);
  meta.objective = out.solution.objective;
  meta.kkt_residual = out.solution.kkt_residual;
  meta.iterations = out.solution.iterations;
  meta.converged = out.solution.converged();
  out.model = make_model(params.kernel, out.problem, out.solution,
                         ds.label_names, meta);
  return out;
}

}  // namespace musvm
