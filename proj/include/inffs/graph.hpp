#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "inffs/data.hpp"
#include "inffs/detail/stats.hpp"
#include "inffs/errors.hpp"

namespace inffs {

enum class GraphMode { unsupervised, supervised };

/// Symmetric nonnegative feature-affinity matrix over the n features,
/// together with the mixing parameters it was built from.
struct WeightedGraph {
  Eigen::MatrixXd A;  // n x n, A(i,j) = A(j,i) >= 0
  GraphMode mode = GraphMode::unsupervised;
  std::vector<double> alphas;
};

struct UnsupParams {
  double alpha = 0.5;  // in [0,1]
};

struct SupParams {
  double alpha1 = 1.0 / 3.0;
  double alpha2 = 1.0 / 3.0;
  double alpha3 = 1.0 / 3.0;
};

/// Per-feature diagnostic scores of the supervised builder, all in [0,1].
struct SupScores {
  Eigen::VectorXd h;      // normalized Fisher criterion
  Eigen::VectorXd m;      // normalized mutual information
  Eigen::VectorXd sigma;  // normalized standard deviation
  Eigen::VectorXd s;      // h*a1 + m*a2 + sigma*a3
};

namespace detail {

inline void check_unsup_params(const UnsupParams& p) {
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) throw usage_error("alpha must be in [0,1]");
}

inline void check_sup_params(const SupParams& p) {
  for (double a : {p.alpha1, p.alpha2, p.alpha3})
    if (!(a >= 0.0 && a <= 1.0)) throw usage_error("alpha1..3 must be in [0,1]");
  if (std::abs(p.alpha1 + p.alpha2 + p.alpha3 - 1.0) > 1e-12)
    throw usage_error("alpha1 + alpha2 + alpha3 must equal 1");
}

inline void require_labels(const DataTable& table, const char* what) {
  if (!table.has_labels()) throw usage_error(std::string(what) + " requires class labels");
  if (table.num_classes() < 2) throw usage_error(std::string(what) + " requires at least 2 classes");
}

/// Ranks standardized to zero mean and unit Euclidean norm; a zero vector
/// marks a constant feature (correlation defined as 0 against anything).
inline Eigen::VectorXd standardized_ranks(const Eigen::VectorXd& v) {
  const auto ranks = average_ranks(v);
  Eigen::VectorXd r(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) r[i] = ranks[static_cast<std::size_t>(i)];
  r.array() -= r.mean();
  const double norm = r.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(v.size());
  return r / norm;
}

/// Equal-frequency quantization; equal values always share a bin.
inline std::vector<int> equal_frequency_bins(const Eigen::VectorXd& v, int bins) {
  const auto t = static_cast<std::size_t>(v.size());
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int k = 1; k < bins; ++k) {
    const double e = sorted[static_cast<std::size_t>(k) * t / static_cast<std::size_t>(bins)];
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  std::vector<int> out(t);
  for (std::size_t i = 0; i < t; ++i) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v[static_cast<Eigen::Index>(i)]);
    out[i] = static_cast<int>(it - edges.begin());
  }
  return out;
}

/// Raw multi-class Fisher criterion per feature (population moments).
/// Classes absent from the table contribute nothing.
inline Eigen::VectorXd fisher_raw(const DataTable& table) {
  const int n = table.features();
  const int g = table.num_classes();
  const auto& labels = *table.labels;

  std::vector<std::vector<int>> members(static_cast<std::size_t>(g));
  for (int i = 0; i < table.samples(); ++i)
    members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)] - 1)].push_back(i);

  Eigen::VectorXd raw(n);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd col = table.values.col(j);
    const double grand_mean = col.mean();
    double numer = 0.0, within = 0.0;
    for (const auto& idx : members) {
      if (idx.empty()) continue;
      double mu = 0.0;
      for (int i : idx) mu += col[i];
      mu /= static_cast<double>(idx.size());
      double var = 0.0;
      for (int i : idx) var += (col[i] - mu) * (col[i] - mu);
      var /= static_cast<double>(idx.size());
      numer += (mu - grand_mean) * (mu - grand_mean);
      within += var;
    }
    raw[j] = within > 0.0 ? numer / within : 0.0;
  }
  return raw;
}

/// Raw mutual information (nats) of each quantized feature with the labels.
inline Eigen::VectorXd mutual_info_raw(const DataTable& table, int bins) {
  const int n = table.features();
  const int g = table.num_classes();
  const int t = table.samples();
  const auto& labels = *table.labels;
  Eigen::VectorXd raw(n);
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd col = table.values.col(j);
    if (col.minCoeff() == col.maxCoeff()) {
      raw[j] = 0.0;
      continue;
    }
    const auto z = equal_frequency_bins(col, bins);
    const int nz = *std::max_element(z.begin(), z.end()) + 1;
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(nz, g);
    for (int i = 0; i < t; ++i)
      joint(z[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(i)] - 1) += 1.0;
    joint /= static_cast<double>(t);
    const Eigen::VectorXd pz = joint.rowwise().sum();
    const Eigen::VectorXd py = joint.colwise().sum();
    double mi = 0.0;
    for (int a = 0; a < nz; ++a)
      for (int b = 0; b < g; ++b)
        if (joint(a, b) > 0.0) mi += joint(a, b) * std::log(joint(a, b) / (pz[a] * py[b]));
    raw[j] = mi;
  }
  return raw;
}

}  // namespace detail

namespace detail {

/// |dot| of two standardized rank vectors; identical non-constant vectors
/// correlate exactly 1, constant vectors (all-zero ranks) exactly 0.
inline double rank_correlation_abs(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry) {
  if (std::memcmp(rx.data(), ry.data(), sizeof(double) * static_cast<std::size_t>(rx.size())) ==
      0) {
    return rx.isZero(0.0) ? 0.0 : 1.0;
  }
  return std::min(std::abs(rx.dot(ry)), 1.0);
}

}  // namespace detail

/// Absolute Spearman rank correlation with average-rank tie handling.
/// A constant vector is treated as uncorrelated with everything (returns 0).
inline double spearman_abs(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw usage_error("spearman_abs: length mismatch");
  if (x.size() < 2) throw usage_error("spearman_abs: need at least 2 samples");
  const Eigen::VectorXd rx = detail::standardized_ranks(x);
  const Eigen::VectorXd ry = detail::standardized_ranks(y);
  return detail::rank_correlation_abs(rx, ry);
}

/// Per-feature standard deviations scaled by the maximum over all features.
inline Eigen::VectorXd normalized_stds(const DataTable& table) {
  const int n = table.features();
  Eigen::VectorXd stds(n);
  for (int j = 0; j < n; ++j) stds[j] = detail::pop_std(table.values.col(j));
  const double max_std = stds.maxCoeff();
  if (max_std == 0.0) return Eigen::VectorXd::Zero(n);
  return stds / max_std;
}

/// A(i,j) = alpha * max(sigma_i, sigma_j) + (1-alpha) * (1 - |spearman_ij|),
/// including the diagonal. Entries are computed once per unordered pair, so
/// the matrix is exactly symmetric and bit-identical for any thread count.
inline WeightedGraph build_unsupervised(const DataTable& table, const UnsupParams& params,
                                        int threads = 1) {
  detail::check_unsup_params(params);
  const int n = table.features();
  const Eigen::VectorXd sigma = normalized_stds(table);

  std::vector<Eigen::VectorXd> ranks(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    ranks[static_cast<std::size_t>(j)] = detail::standardized_ranks(table.values.col(j));

  WeightedGraph graph;
  graph.mode = GraphMode::unsupervised;
  graph.alphas = {params.alpha};
  graph.A.resize(n, n);

  const double a = params.alpha;
  auto fill_rows = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const auto& ri = ranks[static_cast<std::size_t>(i)];
      for (int j = i; j < n; ++j) {
        const double rho = detail::rank_correlation_abs(ri, ranks[static_cast<std::size_t>(j)]);
        const double w = a * std::max(sigma[i], sigma[j]) + (1.0 - a) * (1.0 - rho);
        graph.A(i, j) = w;
        graph.A(j, i) = w;
      }
    }
  };

  if (threads <= 1) {
    fill_rows(0, n);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int start = 0; start < n; start += chunk) {
      pool.emplace_back(fill_rows, start, std::min(start + chunk, n));
    }
    for (auto& th : pool) th.join();
  }
  return graph;
}

/// Multi-class Fisher criterion, min-max normalized over features to [0,1].
inline Eigen::VectorXd fisher_scores(const DataTable& table) {
  detail::require_labels(table, "fisher_scores");
  Eigen::VectorXd raw = detail::fisher_raw(table);
  const double lo = raw.minCoeff(), hi = raw.maxCoeff();
  if (hi == lo) return Eigen::VectorXd::Zero(raw.size());
  return (raw.array() - lo) / (hi - lo);
}

/// Mutual information of each equal-frequency-quantized feature with the
/// labels, scaled by the maximum over features.
inline Eigen::VectorXd mutual_info_scores(const DataTable& table, int bins = 16) {
  detail::require_labels(table, "mutual_info_scores");
  if (bins < 2) throw usage_error("bins must be >= 2");
  Eigen::VectorXd raw = detail::mutual_info_raw(table, bins);
  const double hi = raw.maxCoeff();
  if (hi == 0.0) return Eigen::VectorXd::Zero(raw.size());
  return raw / hi;
}

/// Combines the three per-feature criteria into s and couples A = s s^T.
inline std::pair<WeightedGraph, SupScores> build_supervised(const DataTable& table,
                                                            const SupParams& params,
                                                            int bins = 16) {
  detail::check_sup_params(params);
  detail::require_labels(table, "build_supervised");

  SupScores scores;
  scores.h = fisher_scores(table);
  scores.m = mutual_info_scores(table, bins);
  scores.sigma = normalized_stds(table);
  scores.s = params.alpha1 * scores.h + params.alpha2 * scores.m + params.alpha3 * scores.sigma;

  WeightedGraph graph;
  graph.mode = GraphMode::supervised;
  graph.alphas = {params.alpha1, params.alpha2, params.alpha3};
  graph.A = scores.s * scores.s.transpose();
  return {std::move(graph), std::move(scores)};
}

}  // namespace inffs
