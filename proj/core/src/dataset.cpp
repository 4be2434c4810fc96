#include "musvm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace musvm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& field, const std::string& path,
                    std::size_t row) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw InputError(path + ": row " + std::to_string(row) +
                     ": non-numeric field '" + field + "'");
  }
  return value;
}

struct RawRows {
  std::vector<std::vector<std::string>> fields;  // per kept line
  std::vector<std::size_t> line_numbers;         // 1-based file lines
};

RawRows read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  RawRows rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.fields.push_back(split_fields(t));
    rows.line_numbers.push_back(lineno);
  }
  return rows;
}

Eigen::MatrixXd rows_to_matrix(const RawRows& rows, std::size_t first_field,
                               const std::string& path) {
  if (rows.fields.empty()) return Eigen::MatrixXd(0, 0);
  const std::size_t d = rows.fields.front().size() - first_field;
  if (rows.fields.front().size() <= first_field) {
    throw InputError(path + ": row " + std::to_string(rows.line_numbers[0]) +
                     ": no feature fields");
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.fields.size()),
                    static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < rows.fields.size(); ++r) {
    const auto& f = rows.fields[r];
    if (f.size() != first_field + d) {
      throw InputError(path + ": row " + std::to_string(rows.line_numbers[r]) +
                       ": expected " + std::to_string(first_field + d) +
                       " fields, got " + std::to_string(f.size()));
    }
    for (std::size_t c = 0; c < d; ++c) {
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_double(f[first_field + c], path, rows.line_numbers[r]);
    }
  }
  return X;
}

}  // namespace

void Dataset::validate() const {
  if (n_classes() < 2) {
    throw InputError("dataset needs at least 2 classes, got " +
                     std::to_string(n_classes()));
  }
  if (n() == 0) throw InputError("dataset has no training samples");
  if (m() > 0 && universum_X.cols() != dim()) {
    throw InputError("universum dimension " +
                     std::to_string(universum_X.cols()) +
                     " does not match training dimension " +
                     std::to_string(dim()));
  }
  for (const int label : train_y) {
    if (label < 0 || label >= n_classes()) {
      throw InputError("internal label out of range");
    }
  }
}

Dataset load_csv(const std::string& train_path,
                 const std::string& universum_path) {
  const RawRows rows = read_rows(train_path);
  if (rows.fields.empty()) {
    throw InputError(train_path + ": no data rows");
  }

  Dataset ds;
  ds.train_X = rows_to_matrix(rows, 1, train_path);

  std::unordered_map<std::string, int> label_to_internal;
  ds.train_y.reserve(rows.fields.size());
  for (std::size_t r = 0; r < rows.fields.size(); ++r) {
    const std::string& token = rows.fields[r][0];
    if (token.empty()) {
      throw InputError(train_path + ": row " +
                       std::to_string(rows.line_numbers[r]) + ": empty label");
    }
    auto it = label_to_internal.find(token);
    if (it == label_to_internal.end()) {
      it = label_to_internal.emplace(token, ds.n_classes()).first;
      ds.label_names.push_back(token);
    }
    ds.train_y.push_back(it->second);
  }

  if (!universum_path.empty()) {
    const RawRows urows = read_rows(universum_path);
    ds.universum_X = rows_to_matrix(urows, 0, universum_path);
    if (ds.universum_X.rows() == 0) {
      ds.universum_X.resize(0, ds.dim());
    }
  } else {
    ds.universum_X.resize(0, ds.dim());
  }

  ds.validate();
  return ds;
}

LabeledData load_labeled_csv(const std::string& path,
                             const std::vector<std::string>& label_names) {
  const RawRows rows = read_rows(path);
  if (rows.fields.empty()) throw InputError(path + ": no data rows");
  LabeledData data;
  data.X = rows_to_matrix(rows, 1, path);
  data.y.reserve(rows.fields.size());
  for (std::size_t r = 0; r < rows.fields.size(); ++r) {
    const std::string& token = rows.fields[r][0];
    const auto it = std::find(label_names.begin(), label_names.end(), token);
    if (it == label_names.end()) {
      throw InputError(path + ": row " + std::to_string(rows.line_numbers[r]) +
                       ": unknown label '" + token + "'");
    }
    data.y.push_back(static_cast<int>(it - label_names.begin()));
  }
  return data;
}

Eigen::MatrixXd load_unlabeled_csv(const std::string& path) {
  return rows_to_matrix(read_rows(path), 0, path);
}

AugmentedProblem augment(const Dataset& ds, double delta, double C,
                         double cstar) {
  ds.validate();
  if (delta < 0.0) throw InputError("delta must be nonnegative");
  if (!(C > 0.0)) throw InputError("C must be positive");
  if (cstar < 0.0) throw InputError("cstar must be nonnegative");

  const Eigen::Index n = ds.n();
  const Eigen::Index m = ds.m();
  const int L = ds.n_classes();
  const Eigen::Index total = n + m * L;

  AugmentedProblem p;
  p.n_train = n;
  p.m_universum = m;
  p.n_classes = L;
  p.delta = delta;
  p.X.resize(total, ds.dim());
  p.y.resize(static_cast<std::size_t>(total));
  p.e.resize(total, L);
  p.cost.resize(total);

  for (Eigen::Index i = 0; i < n; ++i) {
    p.X.row(i) = ds.train_X.row(i);
    p.y[static_cast<std::size_t>(i)] = ds.train_y[static_cast<std::size_t>(i)];
    p.cost[i] = C;
    for (int l = 0; l < L; ++l) {
      p.e(i, l) = (l == ds.train_y[static_cast<std::size_t>(i)]) ? 0.0 : 1.0;
    }
  }
  // One replica of each universum point per class; the assigned label is the
  // center of its delta-insensitive e-row.
  for (Eigen::Index j = 0; j < m; ++j) {
    for (int l = 0; l < L; ++l) {
      const Eigen::Index row = n + j * L + l;
      p.X.row(row) = ds.universum_X.row(j);
      p.y[static_cast<std::size_t>(row)] = l;
      p.cost[row] = cstar;
      for (int k = 0; k < L; ++k) {
        p.e(row, k) = (k == l) ? 0.0 : -delta;
      }
    }
  }
  return p;
}

double default_cstar_ratio(Eigen::Index n, Eigen::Index m, int L) {
  if (m <= 0 || L <= 0) {
    throw InputError("cstar ratio n/(mL) needs m > 0 and L > 0");
  }
  return static_cast<double>(n) / (static_cast<double>(m) * L);
}

namespace {

void fnv1a(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

}  // namespace

std::uint64_t data_hash(const Dataset& ds) {
  std::uint64_t h = 1469598103934665603ULL;
  const std::int64_t shape[4] = {ds.n(), ds.m(), ds.dim(), ds.n_classes()};
  fnv1a(h, shape, sizeof(shape));
  for (Eigen::Index i = 0; i < ds.train_X.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.train_X.cols(); ++j) {
      const double v = ds.train_X(i, j);
      fnv1a(h, &v, sizeof(v));
    }
  }
  fnv1a(h, ds.train_y.data(), ds.train_y.size() * sizeof(int));
  for (Eigen::Index i = 0; i < ds.universum_X.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.universum_X.cols(); ++j) {
      const double v = ds.universum_X(i, j);
      fnv1a(h, &v, sizeof(v));
    }
  }
  for (const auto& name : ds.label_names) {
    fnv1a(h, name.data(), name.size());
  }
  return h;
}

}  // namespace musvm
