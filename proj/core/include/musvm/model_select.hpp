#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "musvm/dataset.hpp"
#include "musvm/model.hpp"

namespace musvm {

enum class Scoring { bound, cv };

std::string to_string(Scoring s);
Scoring scoring_from_string(const std::string& name);

struct SearchGrid {
  std::vector<double> C_values;
  std::vector<double> gamma_values;  // rbf only
  std::vector<double> delta_values;
  std::optional<double> cstar_ratio;  // nullopt = n/(mL)
  int k_folds = 5;
  Scoring scoring = Scoring::cv;
  std::uint64_t seed = 0;
};

struct GridPointScore {
  std::string step;  // "a" or "b"
  double C = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double cstar = 0.0;
  double score = 0.0;
  bool converged = true;
};

struct SelectionResult {
  double best_C = 0.0;
  double best_gamma = 0.0;
  double step_a_score = 0.0;
  double best_delta = 0.0;
  double step_b_score = 0.0;
  double cstar_ratio = 0.0;
  double cstar = 0.0;
  std::vector<GridPointScore> table;
  Model final_model;
};

struct FoldSplit {
  std::vector<Eigen::Index> train_idx;
  std::vector<Eigen::Index> val_idx;
};

/// Seeded stratified folds over the training rows. Per-class counts across
/// folds differ by at most one; universum rows are attached to every training
/// split by the scorers and never to validation.
std::vector<FoldSplit> stratified_kfold(const Dataset& ds, int k,
                                        std::uint64_t seed);

struct BoundScore {
  double value = 1.0;
  bool converged = false;
};

/// Trains once on all rows and returns the leave-one-out bound value;
/// a non-converged solve scores worst (1.0) with the flag cleared.
BoundScore score_bound(const Dataset& ds, const TrainParams& params,
                       const SolverConfig& cfg);

/// Two-step selection: step (a) tunes C (and gamma for rbf) on the plain SVM,
/// step (b) tunes delta with those parameters fixed and C* = ratio * C.
/// Ties break toward smaller C, then gamma, then delta.
SelectionResult select(const Dataset& ds, const SearchGrid& grid,
                       KernelKind kernel_kind, const SolverConfig& cfg,
                       int jobs = 1);

std::string selection_result_to_json_string(const SelectionResult& result);

struct SweepRow {
  Eigen::Index size = 0;
  double mean_error = 0.0;
  double std_error = 0.0;
  bool all_converged = true;
};

/// Universum-size sweep: per (size, seed), subsample the universum, train,
/// and evaluate on `test` (or on a seeded stratified holdout of the training
/// data when `test` is null). Subsets are nested across sizes for one seed.
std::vector<SweepRow> universum_size_sweep(
    const Dataset& ds, const std::vector<Eigen::Index>& sizes,
    const TrainParams& params, const SolverConfig& cfg,
    const std::vector<std::uint64_t>& seeds, const LabeledData* test = nullptr);

// Shared helpers (also used by the CLI and tests).
Dataset subset_training(const Dataset& ds, const std::vector<Eigen::Index>& idx,
                        bool keep_universum);
LabeledData subset_labeled(const Dataset& ds,
                           const std::vector<Eigen::Index>& idx);

}  // namespace musvm
