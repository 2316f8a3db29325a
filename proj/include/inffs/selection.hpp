#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "inffs/detail/stats.hpp"
#include "inffs/errors.hpp"
#include "inffs/ranking.hpp"

namespace inffs {

struct MeanShiftResult {
  std::vector<int> assignment;  // cluster id per input value
  std::vector<double> modes;    // converged mode per cluster id
  double bandwidth = 0.0;
};

/// Which features survive the ranking cut, with mean-shift diagnostics.
struct SelectionResult {
  std::vector<int> kept;  // sorted feature indices
  std::vector<double> modes;
  double bandwidth = 0.0;
  int cluster_of_top = 0;
  bool single_cluster = false;
  bool pareto_warning = false;
  // top-of-ranking prefix length at the largest consecutive-score gap,
  // offered as a labeled fallback when the score distribution is Pareto-like
  std::optional<int> fallback_cut;
};

/// Silverman's pilot bandwidth, floored so near-degenerate inputs keep a
/// positive bandwidth. Returns 0 only when every value is identical.
inline double silverman_bandwidth(const Eigen::VectorXd& values) {
  const auto n = static_cast<double>(values.size());
  const double lo = values.minCoeff(), hi = values.maxCoeff();
  if (hi == lo) return 0.0;
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = detail::quantile_sorted(sorted, 0.75) - detail::quantile_sorted(sorted, 0.25);
  const double sd = detail::sample_std(values);
  const double scale = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return std::max(0.9 * scale * std::pow(n, -0.2), 1e-6 * (hi - lo));
}

/// Gaussian-kernel mean-shift on a 1-D sample. Every point is iterated to a
/// fixed point (step < 1e-8*h or 500 iterations); fixed points within h/2 of
/// an earlier one join its cluster.
inline MeanShiftResult meanshift_1d(const Eigen::VectorXd& values,
                                    std::optional<double> bandwidth = std::nullopt) {
  if (values.size() < 1) throw usage_error("meanshift_1d: empty input");
  if (!values.allFinite()) throw usage_error("meanshift_1d: non-finite values");
  if (bandwidth && !(*bandwidth > 0.0)) throw usage_error("meanshift_1d: bandwidth must be > 0");

  MeanShiftResult result;
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
  result.bandwidth = h;

  if (h == 0.0) {  // all values identical
    result.assignment.assign(static_cast<std::size_t>(values.size()), 0);
    result.modes.push_back(values[0]);
    return result;
  }

  const auto n = values.size();
  const double step_tol = 1e-8 * h;
  std::vector<double> fixed_points(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = values[i];
    for (int it = 0; it < 500; ++it) {
      double wsum = 0.0, vsum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double u = (x - values[j]) / h;
        const double w = std::exp(-0.5 * u * u);
        wsum += w;
        vsum += w * values[j];
      }
      const double next = vsum / wsum;
      const bool done = std::abs(next - x) < step_tol;
      x = next;
      if (done) break;
    }
    fixed_points[static_cast<std::size_t>(i)] = x;
  }

  result.assignment.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double fp = fixed_points[static_cast<std::size_t>(i)];
    int cluster = -1;
    for (std::size_t c = 0; c < result.modes.size(); ++c) {
      if (std::abs(fp - result.modes[c]) <= 0.5 * h) {
        cluster = static_cast<int>(c);
        break;
      }
    }
    if (cluster < 0) {
      cluster = static_cast<int>(result.modes.size());
      result.modes.push_back(fp);
    }
    result.assignment[static_cast<std::size_t>(i)] = cluster;
  }
  return result;
}

/// Cuts a ranking by clustering the score distribution and keeping the
/// cluster that contains the top-ranked feature.
inline SelectionResult select_subset(const Ranking& ranking,
                                     std::optional<double> bandwidth = std::nullopt) {
  const Eigen::VectorXd& scores = ranking.scores.scores;
  const auto n = scores.size();
  if (n < 1 || ranking.order.empty()) throw usage_error("select_subset: empty ranking");

  const MeanShiftResult ms = meanshift_1d(scores, bandwidth);

  SelectionResult result;
  result.modes = ms.modes;
  result.bandwidth = ms.bandwidth;
  result.cluster_of_top = ms.assignment[static_cast<std::size_t>(ranking.order[0])];
  result.single_cluster = ms.modes.size() == 1;
  for (Eigen::Index i = 0; i < n; ++i)
    if (ms.assignment[static_cast<std::size_t>(i)] == result.cluster_of_top)
      result.kept.push_back(static_cast<int>(i));

  const double top_score = scores[ranking.order[0]];
  std::vector<double> all(scores.data(), scores.data() + n);
  const double median_score = detail::median(std::move(all));
  if (static_cast<double>(result.kept.size()) > 0.95 * static_cast<double>(n) &&
      top_score > 3.0 * median_score) {
    result.pareto_warning = true;
    int cut = 1;
    double widest = -1.0;
    for (std::size_t k = 1; k < ranking.order.size(); ++k) {
      const double gap = scores[ranking.order[k - 1]] - scores[ranking.order[k]];
      if (gap > widest) {
        widest = gap;
        cut = static_cast<int>(k);
      }
    }
    result.fallback_cut = cut;
  }
  return result;
}

}  // namespace inffs
