#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "inffs/errors.hpp"

namespace inffs {

/// A samples-by-features matrix with optional class labels.
///
/// Labels are contiguous class ids 1..G, remapped from whatever symbols
/// appeared in the source file in first-appearance order; label_names keeps
/// the original symbol for class g at index g-1.
struct DataTable {
  Eigen::MatrixXd values;  // T x n
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<std::string>> feature_names;
  std::vector<std::string> label_names;

  int samples() const { return static_cast<int>(values.rows()); }
  int features() const { return static_cast<int>(values.cols()); }
  bool has_labels() const { return labels.has_value(); }

  int num_classes() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end());
  }

  std::vector<int> class_counts() const {
    std::vector<int> counts(static_cast<std::size_t>(num_classes()), 0);
    if (labels) {
      for (int y : *labels) counts[static_cast<std::size_t>(y - 1)]++;
    }
    return counts;
  }

  DataTable select_rows(std::span<const int> rows) const {
    DataTable out;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
      out.values.row(static_cast<Eigen::Index>(i)) = values.row(rows[i]);
    if (labels) {
      std::vector<int> sub;
      sub.reserve(rows.size());
      for (int r : rows) sub.push_back((*labels)[static_cast<std::size_t>(r)]);
      out.labels = std::move(sub);
    }
    out.feature_names = feature_names;
    out.label_names = label_names;
    return out;
  }

  DataTable select_cols(std::span<const int> cols) const {
    DataTable out;
    out.values.resize(values.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
      out.values.col(static_cast<Eigen::Index>(j)) = values.col(cols[j]);
    out.labels = labels;
    if (feature_names) {
      std::vector<std::string> names;
      names.reserve(cols.size());
      for (int c : cols) names.push_back((*feature_names)[static_cast<std::size_t>(c)]);
      out.feature_names = std::move(names);
    }
    out.label_names = label_names;
    return out;
  }

  /// Enforces ingestion invariants: finite values, n >= 2, T >= 2,
  /// labels contiguous 1..G with every class populated.
  void validate() const {
    if (values.rows() < 2 || values.cols() < 2)
      throw io_error("data table must have at least 2 samples and 2 features");
    if (!values.allFinite()) throw io_error("data table contains NaN or Inf values");
    if (labels) {
      if (static_cast<Eigen::Index>(labels->size()) != values.rows())
        throw io_error("label count does not match sample count");
      const int g = num_classes();
      std::vector<int> counts(static_cast<std::size_t>(g), 0);
      for (int y : *labels) {
        if (y < 1 || y > g) throw io_error("labels must be contiguous class ids 1..G");
        counts[static_cast<std::size_t>(y - 1)]++;
      }
      for (int c : counts)
        if (c == 0) throw io_error("every class must have at least one sample");
    }
  }
};

/// How a dense file's label column is designated.
struct LabelColumn {
  std::variant<std::monostate, int, std::string> spec;

  static LabelColumn none() { return {}; }
  static LabelColumn by_index(int idx) { return {idx}; }
  static LabelColumn by_name(std::string name) { return {std::move(name)}; }
  bool empty() const { return std::holds_alternative<std::monostate>(spec); }
};

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  bool stratified = false;
};

struct SplitResult {
  DataTable train;
  DataTable test;
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

namespace detail {

inline double parse_cell(std::string_view token, const std::string& context) {
  double out = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw io_error("non-numeric cell '" + std::string(token) + "' " + context);
  if (!std::isfinite(out))
    throw io_error("non-finite cell '" + std::string(token) + "' " + context);
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_line(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

inline bool is_numeric(std::string_view token) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

/// Remaps arbitrary label symbols to contiguous ids in first-appearance order.
class LabelEncoder {
 public:
  int encode(const std::string& symbol) {
    auto it = ids_.find(symbol);
    if (it != ids_.end()) return it->second;
    const int id = static_cast<int>(names_.size()) + 1;
    ids_.emplace(symbol, id);
    names_.push_back(symbol);
    return id;
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::map<std::string, int> ids_;
  std::vector<std::string> names_;
};

}  // namespace detail

/// Loads a comma- or tab-separated numeric table with an optional single
/// header row. When label_column names or indexes a column, that column is
/// removed from the values and stored as class labels.
inline DataTable load_dense(const std::string& path, const LabelColumn& label_column = LabelColumn::none()) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!detail::trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw io_error("empty file '" + path + "'");

  const char delim = lines[0].find('\t') != std::string::npos ? '\t' : ',';
  auto first = detail::split_line(lines[0], delim);
  const std::size_t ncols = first.size();

  // resolve a by-index label column up front so a symbolic label in the first
  // data row is not mistaken for a header
  int label_idx = -1;
  if (const int* idx = std::get_if<int>(&label_column.spec)) {
    label_idx = *idx < 0 ? static_cast<int>(ncols) + *idx : *idx;
    if (label_idx < 0 || label_idx >= static_cast<int>(ncols))
      throw usage_error("label column index out of range");
  }

  // a header is any first row with a non-numeric cell outside the label column
  bool has_header = false;
  for (std::size_t c = 0; c < ncols; ++c)
    if (static_cast<int>(c) != label_idx && !detail::is_numeric(first[c])) has_header = true;
  std::vector<std::string> header;
  if (has_header)
    for (auto c : first) header.emplace_back(c);

  if (const std::string* name = std::get_if<std::string>(&label_column.spec)) {
    if (!has_header) throw usage_error("label column by name requires a header row");
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw usage_error("label column '" + *name + "' not found in header");
    label_idx = static_cast<int>(it - header.begin());
  }

  const std::size_t first_data = has_header ? 1 : 0;
  const std::size_t nrows = lines.size() - first_data;
  if (nrows == 0) throw io_error("no data rows in '" + path + "'");
  const std::size_t nfeat = label_idx >= 0 ? ncols - 1 : ncols;

  DataTable table;
  table.values.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(nfeat));
  detail::LabelEncoder encoder;
  std::vector<int> labels;

  for (std::size_t r = 0; r < nrows; ++r) {
    auto cells = detail::split_line(lines[first_data + r], delim);
    if (cells.size() != ncols)
      throw io_error("ragged row " + std::to_string(r + first_data + 1) + " in '" + path + "'");
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (static_cast<int>(c) == label_idx) {
        labels.push_back(encoder.encode(std::string(cells[c])));
      } else {
        table.values(static_cast<Eigen::Index>(r), j++) =
            detail::parse_cell(cells[c], "at row " + std::to_string(r + first_data + 1));
      }
    }
  }

  if (label_idx >= 0) {
    table.labels = std::move(labels);
    table.label_names = encoder.names();
  }
  if (has_header) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < ncols; ++c)
      if (static_cast<int>(c) != label_idx) names.push_back(header[c]);
    table.feature_names = std::move(names);
  }
  table.validate();
  return table;
}

/// Loads the sparse text convention "<label> idx:val idx:val ..." with
/// 1-based, strictly increasing indices per line. Absent entries are zero.
inline DataTable load_sparse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");

  struct Row {
    int label;
    std::vector<std::pair<int, double>> entries;
  };
  std::vector<Row> rows;
  detail::LabelEncoder encoder;
  int max_index = 0;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;  // blank line
    Row row;
    row.label = encoder.encode(token);
    int prev_index = 0;
    while (ls >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 >= token.size())
        throw io_error("malformed token '" + token + "' at line " + std::to_string(lineno));
      int idx = 0;
      {
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + colon, idx);
        if (ec != std::errc{} || ptr != token.data() + colon || idx < 1)
          throw io_error("malformed index in '" + token + "' at line " + std::to_string(lineno));
      }
      const double val =
          detail::parse_cell(std::string_view(token).substr(colon + 1), "at line " + std::to_string(lineno));
      if (idx <= prev_index)
        throw io_error("non-increasing feature index at line " + std::to_string(lineno));
      prev_index = idx;
      max_index = std::max(max_index, idx);
      row.entries.emplace_back(idx, val);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error("empty file '" + path + "'");

  DataTable table;
  table.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), max_index);
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    labels.push_back(rows[r].label);
    for (auto [idx, val] : rows[r].entries)
      table.values(static_cast<Eigen::Index>(r), idx - 1) = val;
  }
  table.labels = std::move(labels);
  table.label_names = encoder.names();
  table.validate();
  return table;
}

/// Writes a table in the dense format load_dense reads back: header row with
/// feature names (plus a final "label" column when labels are present), then
/// one row per sample at full double precision.
inline void save_dense(const DataTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");

  const int n = table.features();
  std::vector<std::string> names;
  if (table.feature_names) {
    names = *table.feature_names;
  } else {
    names.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) names.push_back("f" + std::to_string(j));
  }
  for (int j = 0; j < n; ++j) {
    if (j) out << ',';
    out << names[static_cast<std::size_t>(j)];
  }
  if (table.has_labels()) out << ",label";
  out << '\n';

  char buf[40];
  for (int i = 0; i < table.samples(); ++i) {
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", table.values(i, j));
      if (j) out << ',';
      out << buf;
    }
    if (table.has_labels()) {
      const int y = (*table.labels)[static_cast<std::size_t>(i)];
      out << ',';
      if (!table.label_names.empty())
        out << table.label_names[static_cast<std::size_t>(y - 1)];
      else
        out << y;
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

/// Deterministic train/test split. Stratified splits keep per-class
/// proportions within one sample and require labels with >= 2 samples per class.
inline SplitResult split(const DataTable& table, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw usage_error("train_fraction must be in (0,1)");
  const int t = table.samples();
  std::mt19937_64 rng(spec.seed);

  std::vector<int> train_idx, test_idx;
  auto take = [&](std::vector<int>& pool) {
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto want = static_cast<long>(
        std::lround(spec.train_fraction * static_cast<double>(pool.size())));
    const auto n_train = std::clamp<long>(want, 1, static_cast<long>(pool.size()) - 1);
    for (std::size_t i = 0; i < pool.size(); ++i)
      (static_cast<long>(i) < n_train ? train_idx : test_idx).push_back(pool[i]);
  };

  if (spec.stratified) {
    if (!table.has_labels()) throw usage_error("stratified split requires labels");
    const int g = table.num_classes();
    for (int cls = 1; cls <= g; ++cls) {
      std::vector<int> pool;
      for (int i = 0; i < t; ++i)
        if ((*table.labels)[static_cast<std::size_t>(i)] == cls) pool.push_back(i);
      if (pool.size() < 2)
        throw usage_error("class " + std::to_string(cls) + " has fewer than 2 samples");
      take(pool);
    }
  } else {
    std::vector<int> pool(static_cast<std::size_t>(t));
    std::iota(pool.begin(), pool.end(), 0);
    take(pool);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  SplitResult result;
  result.train = table.select_rows(train_idx);
  result.test = table.select_rows(test_idx);
  result.train_indices = std::move(train_idx);
  result.test_indices = std::move(test_idx);
  return result;
}

}  // namespace inffs
