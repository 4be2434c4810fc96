#include "musvm/model_select.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "musvm/rng.hpp"
#include "musvm/span_bound.hpp"

namespace musvm {

std::string to_string(Scoring s) { return s == Scoring::bound ? "bound" : "cv"; }

Scoring scoring_from_string(const std::string& name) {
  if (name == "bound") return Scoring::bound;
  if (name == "cv") return Scoring::cv;
  throw InputError("unknown scoring '" + name + "' (expected bound|cv)");
}

Dataset subset_training(const Dataset& ds, const std::vector<Eigen::Index>& idx,
                        bool keep_universum) {
  Dataset out;
  out.train_X.resize(static_cast<Eigen::Index>(idx.size()), ds.dim());
  out.train_y.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.train_X.row(static_cast<Eigen::Index>(r)) = ds.train_X.row(idx[r]);
    out.train_y.push_back(ds.train_y[static_cast<std::size_t>(idx[r])]);
  }
  out.universum_X = keep_universum ? ds.universum_X
                                   : Eigen::MatrixXd(0, ds.dim());
  out.label_names = ds.label_names;
  return out;
}

LabeledData subset_labeled(const Dataset& ds,
                           const std::vector<Eigen::Index>& idx) {
  LabeledData out;
  out.X.resize(static_cast<Eigen::Index>(idx.size()), ds.dim());
  out.y.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.X.row(static_cast<Eigen::Index>(r)) = ds.train_X.row(idx[r]);
    out.y.push_back(ds.train_y[static_cast<std::size_t>(idx[r])]);
  }
  return out;
}

std::vector<FoldSplit> stratified_kfold(const Dataset& ds, int k,
                                        std::uint64_t seed) {
  ds.validate();
  if (k < 2) throw InputError("stratified_kfold: need k >= 2");

  const int L = ds.n_classes();
  std::vector<std::vector<Eigen::Index>> by_class(static_cast<std::size_t>(L));
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    by_class[static_cast<std::size_t>(ds.train_y[static_cast<std::size_t>(i)])]
        .push_back(i);
  }
  for (int c = 0; c < L; ++c) {
    if (by_class[static_cast<std::size_t>(c)].size() <
        static_cast<std::size_t>(k)) {
      throw InputError("stratified_kfold: class '" +
                       ds.label_names[static_cast<std::size_t>(c)] + "' has " +
                       std::to_string(by_class[static_cast<std::size_t>(c)].size()) +
                       " samples, fewer than k=" + std::to_string(k));
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<Eigen::Index>> fold_members(
      static_cast<std::size_t>(k));
  for (int c = 0; c < L; ++c) {
    auto& members = by_class[static_cast<std::size_t>(c)];
    deterministic_shuffle(members, rng);
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      fold_members[pos % static_cast<std::size_t>(k)].push_back(members[pos]);
    }
  }

  std::vector<FoldSplit> folds(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    auto& val = fold_members[static_cast<std::size_t>(f)];
    std::sort(val.begin(), val.end());
    folds[static_cast<std::size_t>(f)].val_idx = val;
    auto& train = folds[static_cast<std::size_t>(f)].train_idx;
    train.reserve(static_cast<std::size_t>(ds.n()) - val.size());
    std::size_t vpos = 0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      if (vpos < val.size() && val[vpos] == i) {
        ++vpos;
      } else {
        train.push_back(i);
      }
    }
  }
  return folds;
}

BoundScore score_bound(const Dataset& ds, const TrainParams& params,
                       const SolverConfig& cfg) {
  const Trained t = train(ds, params, cfg);
  BoundScore score;
  score.converged = t.solution.converged();
  if (!score.converged) {
    score.value = 1.0;  // worst score rather than aborting a sweep
    return score;
  }
  const SpanReport report = loo_bound(t.solution, t.partition, t.gram, t.problem);
  score.value = report.bound;
  return score;
}

namespace {

struct PointScore {
  double value = 1.0;
  bool converged = true;
};

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double mean_cv_error(const Dataset& ds, const std::vector<FoldSplit>& folds,
                     const TrainParams& params, const SolverConfig& cfg,
                     bool use_universum, bool* all_converged) {
  double total = 0.0;
  for (const FoldSplit& fold : folds) {
    const Dataset sub = subset_training(ds, fold.train_idx, use_universum);
    const Trained t = train(sub, params, cfg);
    if (!t.solution.converged()) *all_converged = false;
    const LabeledData val = subset_labeled(ds, fold.val_idx);
    total += evaluate(t.model, val.X, val.y);
  }
  return total / static_cast<double>(folds.size());
}

}  // namespace

SelectionResult select(const Dataset& ds, const SearchGrid& grid,
                       KernelKind kernel_kind, const SolverConfig& cfg,
                       int jobs) {
  ds.validate();
  if (grid.C_values.empty()) throw InputError("select: empty C grid");
  if (grid.delta_values.empty()) throw InputError("select: empty delta grid");
  if (kernel_kind == KernelKind::rbf && grid.gamma_values.empty()) {
    throw InputError("select: rbf kernel needs a gamma grid");
  }
  const bool any_positive_delta = std::any_of(
      grid.delta_values.begin(), grid.delta_values.end(),
      [](double d) { return d > 0.0; });
  if (ds.m() == 0 && any_positive_delta) {
    throw InputError("select: delta grid has positive entries but the dataset "
                     "has no universum samples");
  }

  std::vector<double> c_grid = grid.C_values;
  std::sort(c_grid.begin(), c_grid.end());
  std::vector<double> gamma_grid =
      kernel_kind == KernelKind::rbf ? grid.gamma_values
                                     : std::vector<double>{0.0};
  std::sort(gamma_grid.begin(), gamma_grid.end());
  std::vector<double> delta_grid = grid.delta_values;
  std::sort(delta_grid.begin(), delta_grid.end());

  std::vector<FoldSplit> folds;
  if (grid.scoring == Scoring::cv) {
    folds = stratified_kfold(ds, grid.k_folds, grid.seed);
  }
  // Step a scores the plain SVM, so the bound is computed with no universum
  // rows at all.
  const Dataset plain = subset_training(
      ds,
      [&] {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(ds.n()));
        for (Eigen::Index i = 0; i < ds.n(); ++i)
          all[static_cast<std::size_t>(i)] = i;
        return all;
      }(),
      false);

  SelectionResult result;
  result.cstar_ratio =
      ds.m() > 0 ? (grid.cstar_ratio ? *grid.cstar_ratio
                                     : default_cstar_ratio(ds.n(), ds.m(),
                                                           ds.n_classes()))
                 : 0.0;

  // --- Step a: tune C (and gamma) for the plain multiclass SVM. ---
  struct PointA {
    double C, gamma;
  };
  std::vector<PointA> points_a;
  for (const double C : c_grid) {
    for (const double gamma : gamma_grid) points_a.push_back({C, gamma});
  }
  std::vector<PointScore> scores_a(points_a.size());
  parallel_for(points_a.size(), jobs, [&](std::size_t i) {
    TrainParams params;
    params.kernel = kernel_kind == KernelKind::rbf
                        ? KernelSpec::rbf(points_a[i].gamma)
                        : KernelSpec::linear();
    params.C = points_a[i].C;
    params.cstar = 0.0;
    params.delta = 0.0;
    params.seed = grid.seed;
    PointScore ps;
    if (grid.scoring == Scoring::cv) {
      ps.value = mean_cv_error(ds, folds, params, cfg, false, &ps.converged);
    } else {
      const BoundScore bs = score_bound(plain, params, cfg);
      ps.value = bs.value;
      ps.converged = bs.converged;
    }
    scores_a[i] = ps;
  });

  std::size_t best_a = 0;
  for (std::size_t i = 0; i < points_a.size(); ++i) {
    result.table.push_back({"a", points_a[i].C, points_a[i].gamma, 0.0, 0.0,
                            scores_a[i].value, scores_a[i].converged});
    if (scores_a[i].value < scores_a[best_a].value) best_a = i;
  }
  result.best_C = points_a[best_a].C;
  result.best_gamma = points_a[best_a].gamma;
  result.step_a_score = scores_a[best_a].value;
  result.cstar = result.cstar_ratio * result.best_C;

  const KernelSpec best_kernel = kernel_kind == KernelKind::rbf
                                     ? KernelSpec::rbf(result.best_gamma)
                                     : KernelSpec::linear();

  // --- Step b: tune delta with C, gamma and C*/C fixed. ---
  std::vector<PointScore> scores_b(delta_grid.size());
  parallel_for(delta_grid.size(), jobs, [&](std::size_t i) {
    TrainParams params;
    params.kernel = best_kernel;
    params.C = result.best_C;
    params.cstar = result.cstar;
    params.delta = delta_grid[i];
    params.seed = grid.seed;
    PointScore ps;
    if (grid.scoring == Scoring::cv) {
      ps.value = mean_cv_error(ds, folds, params, cfg, true, &ps.converged);
    } else {
      const BoundScore bs = score_bound(ds, params, cfg);
      ps.value = bs.value;
      ps.converged = bs.converged;
    }
    scores_b[i] = ps;
  });

  std::size_t best_b = 0;
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    result.table.push_back({"b", result.best_C, result.best_gamma,
                            delta_grid[i], result.cstar, scores_b[i].value,
                            scores_b[i].converged});
    if (scores_b[i].value < scores_b[best_b].value) best_b = i;
  }
  result.best_delta = delta_grid[best_b];
  result.step_b_score = scores_b[best_b].value;

  TrainParams final_params;
  final_params.kernel = best_kernel;
  final_params.C = result.best_C;
  final_params.cstar = result.cstar;
  final_params.delta = result.best_delta;
  final_params.seed = grid.seed;
  result.final_model = train(ds, final_params, cfg).model;
  return result;
}

std::string selection_result_to_json_string(const SelectionResult& result) {
  nlohmann::json j;
  j["step_a"] = {{"C", result.best_C},
                 {"gamma", result.best_gamma},
                 {"score", result.step_a_score}};
  j["step_b"] = {{"delta", result.best_delta}, {"score", result.step_b_score}};
  j["cstar_ratio"] = result.cstar_ratio;
  j["cstar"] = result.cstar;
  nlohmann::json table = nlohmann::json::array();
  for (const GridPointScore& row : result.table) {
    table.push_back({{"step", row.step},
                     {"C", row.C},
                     {"gamma", row.gamma},
                     {"delta", row.delta},
                     {"cstar", row.cstar},
                     {"score", row.score},
                     {"converged", row.converged}});
  }
  j["table"] = table;
  return j.dump(2) + "\n";
}

std::vector<SweepRow> universum_size_sweep(
    const Dataset& ds, const std::vector<Eigen::Index>& sizes,
    const TrainParams& params, const SolverConfig& cfg,
    const std::vector<std::uint64_t>& seeds, const LabeledData* test) {
  ds.validate();
  if (sizes.empty()) throw InputError("universum_size_sweep: no sizes");
  if (seeds.empty()) throw InputError("universum_size_sweep: no seeds");
  for (const Eigen::Index s : sizes) {
    if (s < 0 || s > ds.m()) {
      throw InputError("universum_size_sweep: size " + std::to_string(s) +
                       " exceeds universum count " + std::to_string(ds.m()));
    }
  }

  std::vector<SweepRow> rows;
  for (const Eigen::Index size : sizes) {
    SweepRow row;
    row.size = size;
    std::vector<double> errors;
    for (const std::uint64_t seed : seeds) {
      // Holdout split first with its own stream so it is identical across
      // sizes for one seed; universum subsets are nested across sizes.
      Dataset train_ds;
      LabeledData heldout;
      if (test == nullptr) {
        std::mt19937_64 split_rng(seed);
        std::vector<Eigen::Index> train_idx, val_idx;
        std::vector<std::vector<Eigen::Index>> by_class(
            static_cast<std::size_t>(ds.n_classes()));
        for (Eigen::Index i = 0; i < ds.n(); ++i) {
          by_class[static_cast<std::size_t>(
                       ds.train_y[static_cast<std::size_t>(i)])]
              .push_back(i);
        }
        for (auto& members : by_class) {
          deterministic_shuffle(members, split_rng);
          const std::size_t val_count = std::max<std::size_t>(
              1, members.size() / 3);
          for (std::size_t pos = 0; pos < members.size(); ++pos) {
            (pos < val_count ? val_idx : train_idx).push_back(members[pos]);
          }
        }
        std::sort(train_idx.begin(), train_idx.end());
        std::sort(val_idx.begin(), val_idx.end());
        train_ds = subset_training(ds, train_idx, true);
        heldout = subset_labeled(ds, val_idx);
      } else {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(ds.n()));
        for (Eigen::Index i = 0; i < ds.n(); ++i)
          all[static_cast<std::size_t>(i)] = i;
        train_ds = subset_training(ds, all, true);
        heldout = *test;
      }

      std::mt19937_64 sub_rng(seed ^ 0x9E3779B97F4A7C15ULL);
      std::vector<std::size_t> pick = sample_without_replacement(
          static_cast<std::size_t>(ds.m()), static_cast<std::size_t>(size),
          sub_rng);
      std::sort(pick.begin(), pick.end());
      Eigen::MatrixXd uni(static_cast<Eigen::Index>(pick.size()), ds.dim());
      for (std::size_t r = 0; r < pick.size(); ++r) {
        uni.row(static_cast<Eigen::Index>(r)) =
            ds.universum_X.row(static_cast<Eigen::Index>(pick[r]));
      }
      train_ds.universum_X = uni;

      const Trained t = train(train_ds, params, cfg);
      if (!t.solution.converged()) row.all_converged = false;
      errors.push_back(evaluate(t.model, heldout.X, heldout.y));
    }

    double mean = 0.0;
    for (const double e : errors) mean += e;
    mean /= static_cast<double>(errors.size());
    double var = 0.0;
    for (const double e : errors) var += (e - mean) * (e - mean);
    row.mean_error = mean;
    row.std_error = errors.size() > 1
                        ? std::sqrt(var / static_cast<double>(errors.size() - 1))
                        : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace musvm
