#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "inffs/errors.hpp"
#include "inffs/graph.hpp"

namespace inffs {

enum class RegKind { spectral, substochastic };
enum class ScoreVariant { energy, markov };

/// The convergence factor r applied to A before summing the matrix power
/// series, together with the radius estimate it was derived from.
struct Regularization {
  RegKind kind = RegKind::spectral;
  double factor = 0.0;           // r
  double radius_estimate = 0.0;  // rho(A) or max row sum, whichever was used
};

/// Per-feature path scores. The energy variant holds the row sums of
/// (I - rA)^{-1} - I; the markov variant holds the row sums of (I - rA)^{-1},
/// which exceed the energy scores by exactly one.
struct ScoreVector {
  Eigen::VectorXd scores;
  std::optional<Regularization> regularization;
  ScoreVariant variant = ScoreVariant::energy;
};

/// Feature indices in decreasing score order; ties keep ascending index.
struct Ranking {
  std::vector<int> order;
  ScoreVector scores;
};

/// Dominant eigenvalue of a nonnegative symmetric matrix by power iteration
/// from the all-ones vector, Rayleigh-quotient estimates, and the stopping
/// rule |l_{k+1} - l_k| <= tol * |l_{k+1}|.
inline double spectral_radius(const Eigen::MatrixXd& A, double tol = 1e-10,
                              int max_iterations = 10000) {
  const Eigen::Index n = A.rows();
  if (n == 0) throw usage_error("spectral_radius: empty matrix");
  if (!A.allFinite()) throw usage_error("spectral_radius: non-finite entries");
  if (n == 1) return std::abs(A(0, 0));

  Eigen::VectorXd v = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  double lambda = v.dot(A * v);
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd w = A * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(A * v);
    if (std::abs(next - lambda) <= tol * std::abs(next)) return next;
    lambda = next;
  }
  throw numeric_error("spectral_radius: power iteration did not converge");
}

inline double max_row_sum(const Eigen::MatrixXd& A) {
  if (A.rows() == 0) return 0.0;
  return A.rowwise().sum().maxCoeff();
}

/// Chooses r = 0.9 / rho(A) (spectral) or r = 0.9 / max_row_sum(A)
/// (substochastic). If power iteration fails to converge, the row-sum bound
/// stands in for rho. An all-zero A admits no valid r and is rejected.
inline Regularization regularize(const WeightedGraph& graph, RegKind kind) {
  const Eigen::MatrixXd& A = graph.A;
  const double rmax = max_row_sum(A);
  if (!(rmax > 0.0) || A.maxCoeff() <= 0.0)
    throw numeric_error("degenerate graph: adjacency matrix has no positive entry");

  Regularization reg;
  reg.kind = kind;
  if (kind == RegKind::substochastic) {
    reg.radius_estimate = rmax;
    reg.factor = 0.9 / rmax;
    if ((reg.factor * A).rowwise().sum().maxCoeff() > 0.9 + 1e-12)
      throw numeric_error("regularize: row sums of rA exceed 0.9");
  } else {
    double rho;
    try {
      rho = spectral_radius(A);
    } catch (const numeric_error&) {
      rho = rmax;  // upper bound on rho for nonnegative A
    }
    if (!(rho > 0.0)) throw numeric_error("degenerate graph: spectral radius is zero");
    reg.radius_estimate = rho;
    reg.factor = 0.9 / rho;
    if (spectral_radius(reg.factor * A) > 0.9 + 1e-9)
      throw numeric_error("regularize: rho(rA) exceeds 0.9");
  }
  return reg;
}

/// Closed-form infinite-path scores: solves (I - rA) x = e once and returns
/// x - e (energy) or x (markov). The explicit inverse is never formed.
inline ScoreVector scores_closed_form(const WeightedGraph& graph, const Regularization& reg,
                                      ScoreVariant variant = ScoreVariant::energy) {
  const Eigen::Index n = graph.A.rows();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - reg.factor * graph.A;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd x = system.ldlt().solve(ones);
  if (!x.allFinite())
    throw numeric_error("scores_closed_form: solve produced non-finite scores");

  ScoreVector out;
  out.regularization = reg;
  out.variant = variant;
  if (variant == ScoreVariant::markov) {
    out.scores = x;
  } else {
    // clamp solver noise: x >= 1 holds analytically
    out.scores = (x.array() - 1.0).max(0.0);
  }
  return out;
}

/// Partial-sum oracle: sum_{l=1..L} (rA)^l e by L matrix-vector products.
/// Kept in the library so closed-form results can be audited in place.
inline ScoreVector scores_truncated(const WeightedGraph& graph, const Regularization& reg,
                                    int terms, ScoreVariant variant = ScoreVariant::energy) {
  if (terms < 1) throw usage_error("scores_truncated: need at least one term");
  const Eigen::Index n = graph.A.rows();
  const Eigen::MatrixXd scaled = reg.factor * graph.A;
  Eigen::VectorXd term = scaled * Eigen::VectorXd::Ones(n);
  Eigen::VectorXd acc = term;
  for (int l = 1; l < terms; ++l) {
    term = scaled * term;
    acc += term;
  }
  ScoreVector out;
  out.regularization = reg;
  out.variant = variant;
  out.scores = variant == ScoreVariant::markov ? (acc.array() + 1.0).matrix() : acc;
  return out;
}

/// Stable descending sort of the scores; ties keep ascending feature index.
inline Ranking rank(ScoreVector scores) {
  if (!scores.scores.allFinite()) throw usage_error("rank: non-finite scores");
  Ranking ranking;
  ranking.order.resize(static_cast<std::size_t>(scores.scores.size()));
  std::iota(ranking.order.begin(), ranking.order.end(), 0);
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](int a, int b) { return scores.scores[a] > scores.scores[b]; });
  ranking.scores = std::move(scores);
  return ranking;
}

/// Unsupervised pipeline: graph, regularization, closed-form scores, ranking.
inline Ranking run_inf_fs_u(const DataTable& table, const UnsupParams& params,
                            RegKind kind = RegKind::spectral, int threads = 1) {
  const WeightedGraph graph = build_unsupervised(table, params, threads);
  return rank(scores_closed_form(graph, regularize(graph, kind)));
}

/// Supervised pipeline; also returns the per-feature criteria for diagnostics.
inline std::pair<Ranking, SupScores> run_inf_fs_s(const DataTable& table, const SupParams& params,
                                                  int bins = 16,
                                                  RegKind kind = RegKind::spectral) {
  auto [graph, sup_scores] = build_supervised(table, params, bins);
  Ranking ranking = rank(scores_closed_form(graph, regularize(graph, kind)));
  return {std::move(ranking), std::move(sup_scores)};
}

/// Kendall rank-correlation between two rankings of the same feature set.
inline double kendall_tau(const std::vector<int>& order_a, const std::vector<int>& order_b) {
  const auto n = order_a.size();
  if (n != order_b.size()) throw usage_error("kendall_tau: size mismatch");
  if (n < 2) return 1.0;
  std::vector<int> pos_a(n), pos_b(n);
  for (std::size_t k = 0; k < n; ++k) {
    pos_a[static_cast<std::size_t>(order_a[k])] = static_cast<int>(k);
    pos_b[static_cast<std::size_t>(order_b[k])] = static_cast<int>(k);
  }
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int da = pos_a[i] - pos_a[j];
      const int db = pos_b[i] - pos_b[j];
      const long long sign = static_cast<long long>(da) * db;
      if (sign > 0)
        ++concordant;
      else if (sign < 0)
        ++discordant;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(concordant - discordant) / pairs;
}

}  // namespace inffs
