// Acceptance suite: one checkable criterion per function, one pass/fail line
// per criterion. Run all criteria with no arguments or a single one with
// --criterion N.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "inffs/inffs.hpp"
#include "oracles.hpp"

using namespace inffs;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CheckContext {
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

WeightedGraph make_graph(Eigen::MatrixXd a, GraphMode mode) {
  WeightedGraph graph;
  graph.A = std::move(a);
  graph.mode = mode;
  return graph;
}

/// 100 generic symmetric graphs plus 100 rank-1 graphs, n in {5..50}.
std::vector<WeightedGraph> random_graph_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<WeightedGraph> graphs;
  graphs.reserve(200);
  for (int g = 0; g < 100; ++g) {
    const int n = 5 + static_cast<int>(rng() % 46);
    graphs.push_back(make_graph(oracles::random_symmetric_nonnegative(n, rng),
                                GraphMode::unsupervised));
  }
  for (int g = 0; g < 100; ++g) {
    const int n = 5 + static_cast<int>(rng() % 46);
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = 0.01 + 0.99 * unit(rng);
    graphs.push_back(make_graph(s * s.transpose(), GraphMode::supervised));
  }
  return graphs;
}

// 1. closed form vs 300-term partial sums, both weight modes and kinds
bool criterion_1() {
  const auto start = Clock::now();
  CheckContext ctx;
  double worst = 0.0;
  for (const WeightedGraph& graph : random_graph_suite(1001)) {
    for (RegKind kind : {RegKind::spectral, RegKind::substochastic}) {
      const Regularization reg = regularize(graph, kind);
      const ScoreVector closed = scores_closed_form(graph, reg);
      const ScoreVector series = scores_truncated(graph, reg, 300);
      worst = std::max(worst, (closed.scores - series.scores).cwiseAbs().maxCoeff());
    }
  }
  const double elapsed = seconds_since(start);
  ctx.require(worst <= 1e-9, "max deviation " + std::to_string(worst));
  ctx.require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s");
  std::printf("%s criterion 1: closed form vs truncated series, 200 graphs, max |diff| = %.3e, %.1f s\n",
              ctx.failures.empty() ? "[PASS]" : "[FAIL]", worst, elapsed);
  return ctx.failures.empty();
}

// 2. markov scores = energy scores + 1 on the same suite
bool criterion_2() {
  CheckContext ctx;
  double worst = 0.0;
  for (const WeightedGraph& graph : random_graph_suite(1001)) {
    for (RegKind kind : {RegKind::spectral, RegKind::substochastic}) {
      const Regularization reg = regularize(graph, kind);
      const ScoreVector energy = scores_closed_form(graph, reg, ScoreVariant::energy);
      const ScoreVector markov = scores_closed_form(graph, reg, ScoreVariant::markov);
      worst = std::max(worst,
                       ((markov.scores - energy.scores).array() - 1.0).abs().maxCoeff());
    }
  }
  ctx.require(worst <= 1e-10, "max deviation " + std::to_string(worst));
  std::printf("%s criterion 2: fundamental-matrix identity, max |c - c_energy - 1| = %.3e\n",
              ctx.failures.empty() ? "[PASS]" : "[FAIL]", worst);
  return ctx.failures.empty();
}

// 3. rank-1 graphs rank exactly by descending s under both kinds
bool criterion_3() {
  CheckContext ctx;
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 40);
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = unit(rng);
    std::vector<int> expected(static_cast<std::size_t>(n));
    std::iota(expected.begin(), expected.end(), 0);
    std::stable_sort(expected.begin(), expected.end(),
                     [&](int a, int b) { return s[a] > s[b]; });

    const WeightedGraph graph = make_graph(s * s.transpose(), GraphMode::supervised);
    for (RegKind kind : {RegKind::spectral, RegKind::substochastic}) {
      const Ranking ranking = rank(scores_closed_form(graph, regularize(graph, kind)));
      ctx.require(ranking.order == expected, "trial " + std::to_string(trial));
    }
  }
  // the same statement through the full supervised pipeline
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    MadelonSpec spec;
    spec.n_probes = 30;
    spec.samples_per_class = 50;
    spec.seed = seed;
    const DataTable table = gen_madelon(spec).table;
    const auto [spectral, sup] = run_inf_fs_s(table, {0.4, 0.3, 0.3}, 8, RegKind::spectral);
    const auto [substoch, sup2] =
        run_inf_fs_s(table, {0.4, 0.3, 0.3}, 8, RegKind::substochastic);
    std::vector<int> expected(static_cast<std::size_t>(table.features()));
    std::iota(expected.begin(), expected.end(), 0);
    std::stable_sort(expected.begin(), expected.end(),
                     [&](int a, int b) { return sup.s[a] > sup.s[b]; });
    ctx.require(spectral.order == expected, "pipeline seed " + std::to_string(seed));
    ctx.require(substoch.order == expected, "pipeline seed " + std::to_string(seed));
  }
  std::printf("%s criterion 3: rank-1 ranking equals descending s under both regularizations\n",
              ctx.failures.empty() ? "[PASS]" : "[FAIL]");
  return ctx.failures.empty();
}

// 4. rho(rA) < 1 always; power iteration matches the Gelfand oracle
bool criterion_4() {
  CheckContext ctx;
  double worst_regularized = 0.0;
  for (const WeightedGraph& graph : random_graph_suite(1001)) {
    for (RegKind kind : {RegKind::spectral, RegKind::substochastic}) {
      const Regularization reg = regularize(graph, kind);
      worst_regularized =
          std::max(worst_regularized, oracles::eigensolver_radius(reg.factor * graph.A));
    }
  }
  ctx.require(worst_regularized < 1.0, "rho(rA) reached " + std::to_string(worst_regularized));

  std::mt19937_64 rng(4004);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd a = oracles::random_symmetric_nonnegative(8, rng);
    const double estimate = spectral_radius(a, 1e-12);
    const double reference = oracles::gelfand_radius(a);
    worst_gap = std::max(worst_gap, std::abs(estimate - reference) / reference);
  }
  ctx.require(worst_gap <= 1e-6, "relative gap " + std::to_string(worst_gap));
  std::printf(
      "%s criterion 4: convergence guard, max rho(rA) = %.6f, Gelfand gap = %.2e\n",
      ctx.failures.empty() ? "[PASS]" : "[FAIL]", worst_regularized, worst_gap);
  return ctx.failures.empty();
}

// 5. exact invariances: positive scaling, permutation, monotone transforms
bool criterion_5() {
  CheckContext ctx;
  std::mt19937_64 rng(5005);

  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 20);
    const Eigen::MatrixXd base = oracles::random_symmetric_nonnegative(n, rng);
    for (RegKind kind : {RegKind::spectral, RegKind::substochastic}) {
      const WeightedGraph graph = make_graph(base, GraphMode::unsupervised);
      const ScoreVector reference = scores_closed_form(graph, regularize(graph, kind));
      for (double k : {2.0, 0.25, 4096.0}) {
        const WeightedGraph scaled = make_graph(k * base, GraphMode::unsupervised);
        const ScoreVector scores = scores_closed_form(scaled, regularize(scaled, kind));
        ctx.require(scores.scores == reference.scores, "scaling changed scores");
      }
    }
  }

  const DataTable table = gen_redundant_block(4, 1, 0.3, 40, 55);
  {
    std::vector<int> perm(static_cast<std::size_t>(table.features()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const DataTable shuffled = table.select_cols(perm);
    const Ranking original = run_inf_fs_u(table, {0.5});
    const Ranking permuted = run_inf_fs_u(shuffled, {0.5});
    std::vector<int> mapped;
    for (int f : permuted.order) mapped.push_back(perm[static_cast<std::size_t>(f)]);
    ctx.require(mapped == original.order, "permutation broke the ranking");
  }
  {
    const Eigen::VectorXd x = table.values.col(0);
    for (int j = 1; j < table.features(); ++j) {
      const double before = spearman_abs(x, table.values.col(j));
      ctx.require(spearman_abs(x.array().cube(), table.values.col(j)) == before,
                  "cube transform changed spearman");
      ctx.require(spearman_abs(x.array().exp(), table.values.col(j)) == before,
                  "exp transform changed spearman");
    }
  }
  std::printf("%s criterion 5: invariance suite (scaling, permutation, monotone) exact\n",
              ctx.failures.empty() ? "[PASS]" : "[FAIL]");
  return ctx.failures.empty();
}

// 6. MADELON-style trend at desk scale
bool criterion_6() {
  const auto start = Clock::now();
  CheckContext ctx;

  MadelonSpec spec;  // defaults: 5 informative, 15 redundant, 480 probes
  spec.samples_per_class = 1000;
  spec.seed = 0;
  const MadelonData data = gen_madelon(spec);

  const SupParams alphas{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const auto [full_ranking, sup] = run_inf_fs_s(data.table, alphas, 16);

  int worst_informative_rank = 0;
  int best_probe_rank = data.table.features();
  for (std::size_t pos = 0; pos < full_ranking.order.size(); ++pos) {
    const auto role = data.roles[static_cast<std::size_t>(full_ranking.order[pos])];
    if (role == FeatureRole::informative)
      worst_informative_rank = std::max(worst_informative_rank, static_cast<int>(pos));
    if (role == FeatureRole::probe)
      best_probe_rank = std::min(best_probe_rank, static_cast<int>(pos));
  }
  ctx.require(worst_informative_rank < best_probe_rank,
              "an informative feature ranked below a probe");

  SplitSpec split_spec;
  split_spec.train_fraction = 0.7;
  split_spec.seed = 0;
  split_spec.stratified = true;
  const SplitResult parts = split(data.table, split_spec);
  const Ranking train_ranking = run_inf_fs_s(parts.train, alphas, 16).first;
  const auto reports = sweep_top_b(parts.train, parts.test, train_ranking, {20, 500}, 0.1);
  const double acc20 = reports[0].accuracy;
  const double acc500 = reports[1].accuracy;
  ctx.require(acc20 >= acc500 - 0.05, "top-20 accuracy fell more than 0.05 below top-500");

  const double elapsed = seconds_since(start);
  ctx.require(elapsed < 120.0, "runtime " + std::to_string(elapsed) + " s");
  std::printf(
      "%s criterion 6: MADELON trend, informative ranks 1..%d, first probe at %d, "
      "acc(b=20) = %.4f, acc(b=500) = %.4f, %.1f s\n",
      ctx.failures.empty() ? "[PASS]" : "[FAIL]", worst_informative_rank + 1, best_probe_rank + 1,
      acc20, acc500, elapsed);
  return ctx.failures.empty();
}

// 7. subset selection against the dense-grid KDE oracle on 10 configurations
bool criterion_7() {
  CheckContext ctx;
  struct Config {
    int high, low;
    double gap;
    std::uint64_t seed;
  };
  const std::vector<Config> configs = {
      {3, 2, 0.8, 1},  {5, 5, 0.5, 2},   {10, 20, 0.6, 3}, {8, 4, 1.0, 4},  {20, 30, 0.4, 5},
      {6, 9, 0.9, 6},  {15, 15, 0.3, 7}, {6, 2, 0.7, 8},   {30, 20, 0.5, 9}, {12, 18, 0.75, 10}};

  for (const Config& config : configs) {
    const ScoreVector fixture =
        gen_bimodal_scores(config.high, config.low, config.gap, config.seed);
    Ranking ranking = rank(fixture);
    const SelectionResult result = select_subset(ranking);
    const std::string tag = "config (" + std::to_string(config.high) + "," +
                            std::to_string(config.low) + "," + std::to_string(config.gap) + ")";

    std::vector<int> expected_high(static_cast<std::size_t>(config.high));
    std::iota(expected_high.begin(), expected_high.end(), 0);
    ctx.require(result.kept == expected_high, tag + ": kept != high cluster");
    ctx.require(std::find(result.kept.begin(), result.kept.end(), ranking.order[0]) !=
                    result.kept.end(),
                tag + ": top feature missing");

    // oracle: dense-grid KDE at the same bandwidth must find two modes and
    // place the valley so that exactly the high group sits above it
    std::vector<double> values(fixture.scores.data(),
                               fixture.scores.data() + fixture.scores.size());
    const oracles::KdeScan scan = oracles::kde_grid_scan(values, result.bandwidth);
    ctx.require(scan.mode_locations.size() == 2, tag + ": oracle mode count");
    std::vector<int> oracle_high;
    const int top_region = scan.assignment[static_cast<std::size_t>(ranking.order[0])];
    for (std::size_t i = 0; i < values.size(); ++i)
      if (scan.assignment[i] == top_region) oracle_high.push_back(static_cast<int>(i));
    ctx.require(oracle_high == result.kept, tag + ": oracle assignment mismatch");
  }
  std::printf("%s criterion 7: mean-shift subset selection matches the KDE oracle on 10 fixtures\n",
              ctx.failures.empty() ? "[PASS]" : "[FAIL]");
  return ctx.failures.empty();
}

// 8. 62 x 2000 unsupervised run stays under a minute single-threaded
bool criterion_8() {
  std::mt19937_64 rng(8008);
  std::normal_distribution<double> unit;
  DataTable table;
  table.values.resize(62, 2000);
  for (int i = 0; i < 62; ++i)
    for (int j = 0; j < 2000; ++j) table.values(i, j) = unit(rng);

  const auto start = Clock::now();
  const Ranking ranking = run_inf_fs_u(table, {0.5}, RegKind::spectral, 1);
  const double elapsed = seconds_since(start);

  CheckContext ctx;
  ctx.require(ranking.order.size() == 2000, "ranking size");
  ctx.require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + " s");
  std::printf("%s criterion 8: 62x2000 unsupervised ranking in %.1f s (< 60 s)\n",
              ctx.failures.empty() ? "[PASS]" : "[FAIL]", elapsed);
  return ctx.failures.empty();
}

// 9. Kendall tau between the two regularizations, archived as a report
bool criterion_9() {
  CheckContext ctx;
  std::mt19937_64 rng(9009);
  std::vector<double> taus;
  std::ofstream report("cross_reg_kendall_tau.txt");
  ctx.require(static_cast<bool>(report), "cannot open report file");
  report << "# kendall tau between spectral and substochastic rankings\n";
  report << "# graph\tn\ttau\n";
  for (int g = 0; g < 100; ++g) {
    const int n = 10 + static_cast<int>(rng() % 51);
    const WeightedGraph graph =
        make_graph(oracles::random_symmetric_nonnegative(n, rng), GraphMode::unsupervised);
    const Ranking spectral =
        rank(scores_closed_form(graph, regularize(graph, RegKind::spectral)));
    const Ranking substoch =
        rank(scores_closed_form(graph, regularize(graph, RegKind::substochastic)));
    const double tau = kendall_tau(spectral.order, substoch.order);
    ctx.require(std::isfinite(tau), "non-finite tau");
    taus.push_back(tau);
    char line[64];
    std::snprintf(line, sizeof(line), "%d\t%d\t%.17g\n", g, n, tau);
    report << line;
  }
  const double mean = std::accumulate(taus.begin(), taus.end(), 0.0) / taus.size();
  const double lo = *std::min_element(taus.begin(), taus.end());
  const double hi = *std::max_element(taus.begin(), taus.end());
  report << "# summary\tmean " << mean << "\tmin " << lo << "\tmax " << hi << "\n";
  report.close();
  ctx.require(static_cast<bool>(std::ifstream("cross_reg_kendall_tau.txt")),
              "report not written");
  std::printf(
      "%s criterion 9: cross-regularization Kendall tau archived (mean %.4f, min %.4f, max %.4f)\n",
      ctx.failures.empty() ? "[PASS]" : "[FAIL]", mean, lo, hi);
  return ctx.failures.empty();
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  using Criterion = bool (*)();
  const Criterion criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                criterion_6, criterion_7, criterion_8, criterion_9};

  int failures = 0;
  for (int c = 1; c <= 9; ++c) {
    if (only != 0 && only != c) continue;
    try {
      if (!criteria[c - 1]()) ++failures;
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %d: exception: %s\n", c, e.what());
      ++failures;
    }
  }
  return failures;
}
