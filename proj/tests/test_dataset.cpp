#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "musvm/dataset.hpp"

using namespace musvm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::path("tmp_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }

  std::string write(const std::string& file, const std::string& content) const {
    const fs::path p = path / file;
    std::ofstream out(p);
    out << content;
    return p.string();
  }
};

}  // namespace

TEST_CASE("labels remap to contiguous ids in first-appearance order") {
  TempDir dir("dataset_labels");
  const std::string train = dir.write("train.csv",
                                      "30,1.0,0.0\n"
                                      "70,0.0,1.0\n"
                                      "80,1.0,1.0\n"
                                      "30,0.5,0.5\n");
  const Dataset ds = load_csv(train);
  CHECK(ds.n_classes() == 3);
  CHECK(ds.label_names == std::vector<std::string>{"30", "70", "80"});
  CHECK(ds.train_y == std::vector<int>{0, 1, 2, 0});
  CHECK(ds.n() == 4);
  CHECK(ds.dim() == 2);
}

TEST_CASE("empty universum file gives m = 0") {
  TempDir dir("dataset_empty_universum");
  const std::string train = dir.write("train.csv", "a,1\nb,2\n");
  const std::string uni = dir.write("universum.csv", "# nothing here\n");
  const Dataset ds = load_csv(train, uni);
  CHECK(ds.m() == 0);
  CHECK_NOTHROW(augment(ds, 0.0, 1.0, 0.0));
}

TEST_CASE("ragged rows are rejected with the row number") {
  TempDir dir("dataset_ragged");
  const std::string train = dir.write("train.csv",
                                      "# header comment\n"
                                      "a,1.0,2.0\n"
                                      "b,1.0\n");
  CHECK_THROWS_WITH_AS(load_csv(train),
                       doctest::Contains("row 3"), InputError);
}

TEST_CASE("non-numeric fields are rejected with the row number") {
  TempDir dir("dataset_nonnumeric");
  const std::string train = dir.write("train.csv", "a,1.0\nb,oops\n");
  CHECK_THROWS_WITH_AS(load_csv(train), doctest::Contains("row 2"), InputError);
}

TEST_CASE("unknown labels in a test file are rejected with the row number") {
  TempDir dir("dataset_unknown_label");
  const std::string test = dir.write("test.csv", "a,1.0\nz,2.0\n");
  CHECK_THROWS_WITH_AS(load_labeled_csv(test, {"a", "b"}),
                       doctest::Contains("row 2"), InputError);
}

TEST_CASE("single-class training data is rejected") {
  TempDir dir("dataset_single_class");
  const std::string train = dir.write("train.csv", "a,1\na,2\n");
  CHECK_THROWS_AS(load_csv(train), InputError);
}

namespace {

Dataset tiny_dataset(Eigen::Index n, Eigen::Index m, int L) {
  Dataset ds;
  ds.train_X.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.train_X.row(i) << static_cast<double>(i), 1.0;
    ds.train_y.push_back(static_cast<int>(i % L));
  }
  ds.universum_X.resize(m, 2);
  for (Eigen::Index j = 0; j < m; ++j) {
    ds.universum_X.row(j) << 0.5, static_cast<double>(j);
  }
  for (int l = 0; l < L; ++l) ds.label_names.push_back(std::to_string(l + 1));
  return ds;
}

}  // namespace

TEST_CASE("augment produces n + mL rows in sample-major replica order") {
  const Dataset ds = tiny_dataset(2, 1, 3);
  const AugmentedProblem p = augment(ds, 0.1, 1.0, 0.5);
  CHECK(p.rows() == 5);
  CHECK(p.n_train == 2);
  // Replica block of the single universum point: labels 0,1,2 in order.
  for (int l = 0; l < 3; ++l) {
    CHECK(p.y[static_cast<std::size_t>(2 + l)] == l);
    CHECK(p.X.row(2 + l) == ds.universum_X.row(0));
    CHECK(p.cost[2 + l] == 0.5);
  }
}

TEST_CASE("training e-rows are 0 at the own label and 1 elsewhere") {
  const Dataset ds = tiny_dataset(3, 0, 3);
  const AugmentedProblem p = augment(ds, 0.0, 1.0, 0.0);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (int l = 0; l < 3; ++l) {
      const double expected =
          l == ds.train_y[static_cast<std::size_t>(i)] ? 0.0 : 1.0;
      CHECK(p.e(i, l) == expected);
    }
    CHECK(p.e.row(i).sum() == 2.0);  // L - 1
  }
}

TEST_CASE("universum e-row for assigned label 2 with delta 0.1") {
  const Dataset ds = tiny_dataset(2, 1, 3);
  const AugmentedProblem p = augment(ds, 0.1, 1.0, 0.5);
  // Replica with assigned internal label 1 (spec's 1-based label 2).
  const Eigen::Index row = 2 + 1;
  CHECK(p.e(row, 0) == -0.1);
  CHECK(p.e(row, 1) == 0.0);
  CHECK(p.e(row, 2) == -0.1);
  CHECK(p.e.row(row).sum() == doctest::Approx(-0.1 * 2).epsilon(1e-15));
}

TEST_CASE("delta zero makes every universum e-row all zero") {
  const Dataset ds = tiny_dataset(2, 2, 2);
  const AugmentedProblem p = augment(ds, 0.0, 1.0, 0.3);
  for (Eigen::Index r = p.n_train; r < p.rows(); ++r) {
    CHECK(p.e.row(r).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("universum rows are emitted with zero cost when cstar is zero") {
  const Dataset ds = tiny_dataset(2, 2, 2);
  const AugmentedProblem p = augment(ds, 0.1, 1.0, 0.0);
  CHECK(p.rows() == 6);
  for (Eigen::Index r = p.n_train; r < p.rows(); ++r) {
    CHECK(p.cost[r] == 0.0);
  }
}

TEST_CASE("permuting universum input rows permutes output blocks") {
  Dataset ds = tiny_dataset(2, 2, 2);
  Dataset swapped = ds;
  swapped.universum_X.row(0) = ds.universum_X.row(1);
  swapped.universum_X.row(1) = ds.universum_X.row(0);
  const AugmentedProblem a = augment(ds, 0.05, 1.0, 0.2);
  const AugmentedProblem b = augment(swapped, 0.05, 1.0, 0.2);
  const int L = 2;
  CHECK(a.X.middleRows(2, L) == b.X.middleRows(2 + L, L));
  CHECK(a.X.middleRows(2 + L, L) == b.X.middleRows(2, L));
}

TEST_CASE("augment validates its parameters") {
  const Dataset ds = tiny_dataset(2, 1, 2);
  CHECK_THROWS_AS(augment(ds, -0.1, 1.0, 0.0), InputError);
  CHECK_THROWS_AS(augment(ds, 0.0, 0.0, 0.0), InputError);
  CHECK_THROWS_AS(augment(ds, 0.0, 1.0, -1.0), InputError);
}

TEST_CASE("default cstar ratio matches the paper's worked values") {
  CHECK(default_cstar_ratio(300, 500, 3) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(default_cstar_ratio(600, 250, 4) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("data hash distinguishes datasets and is stable") {
  const Dataset a = tiny_dataset(3, 1, 3);
  Dataset b = a;
  CHECK(data_hash(a) == data_hash(b));
  b.train_X(0, 0) += 1.0;
  CHECK(data_hash(a) != data_hash(b));
}
