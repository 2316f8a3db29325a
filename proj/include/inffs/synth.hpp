#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "inffs/data.hpp"
#include "inffs/errors.hpp"
#include "inffs/ranking.hpp"

namespace inffs {

enum class FeatureRole { informative, redundant, probe };

inline const char* to_string(FeatureRole role) {
  switch (role) {
    case FeatureRole::informative: return "informative";
    case FeatureRole::redundant: return "redundant";
    default: return "probe";
  }
}

/// Two-class hypercube-cluster dataset: informative coordinates place the
/// clusters, redundant columns are exact linear combinations of them, and
/// probe columns are label-independent noise.
struct MadelonSpec {
  int n_informative = 5;
  int n_redundant = 15;
  int n_probes = 480;
  int n_clusters = 32;
  int samples_per_class = 1000;
  std::uint64_t seed = 0;
};

struct MadelonData {
  DataTable table;
  std::vector<FeatureRole> roles;
};

inline MadelonData gen_madelon(const MadelonSpec& spec) {
  if (spec.n_informative < 1 || spec.n_informative > 20)
    throw usage_error("gen_madelon: n_informative must be in [1,20]");
  if (spec.n_redundant < 0 || spec.n_probes < 0)
    throw usage_error("gen_madelon: counts must be nonnegative");
  if (spec.n_clusters < 2) throw usage_error("gen_madelon: need at least 2 clusters");
  if (static_cast<std::uint64_t>(spec.n_clusters) > (std::uint64_t{1} << spec.n_informative))
    throw usage_error("gen_madelon: more clusters than hypercube vertices");
  if (spec.samples_per_class < 1) throw usage_error("gen_madelon: samples_per_class must be >= 1");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 0.3);  // within-cluster spread
  std::normal_distribution<double> unit_noise(0.0, 1.0);
  std::uniform_real_distribution<double> mix(-1.0, 1.0);

  // Pick distinct hypercube vertices, then split them between the classes.
  // The split is resampled until every informative dimension separates the
  // class center means by at least 0.5, so each informative column carries
  // label signal a probe cannot match.
  const int clusters_class1 = spec.n_clusters / 2 + spec.n_clusters % 2;
  const int clusters_class2 = spec.n_clusters - clusters_class1;
  std::vector<std::uint64_t> all_vertices(std::uint64_t{1} << spec.n_informative);
  std::iota(all_vertices.begin(), all_vertices.end(), std::uint64_t{0});

  std::vector<std::uint64_t> vertices;
  bool separated = false;
  for (int attempt = 0; attempt < 100000 && !separated; ++attempt) {
    if (attempt % 128 == 0) {
      std::shuffle(all_vertices.begin(), all_vertices.end(), rng);
      vertices.assign(all_vertices.begin(), all_vertices.begin() + spec.n_clusters);
    }
    std::shuffle(vertices.begin(), vertices.end(), rng);
    separated = true;
    for (int d = 0; d < spec.n_informative && separated; ++d) {
      int ones1 = 0, ones2 = 0;
      for (int c = 0; c < spec.n_clusters; ++c)
        ((c < clusters_class1 ? ones1 : ones2) += (vertices[static_cast<std::size_t>(c)] >> d) & 1);
      const double mean1 = 2.0 * ones1 / clusters_class1 - 1.0;
      const double mean2 = 2.0 * ones2 / clusters_class2 - 1.0;
      separated = std::abs(mean1 - mean2) >= 0.5;
    }
  }
  if (!separated)
    throw numeric_error("gen_madelon: no class assignment separates every informative dimension");

  const int t = 2 * spec.samples_per_class;
  const int n = spec.n_informative + spec.n_redundant + spec.n_probes;

  MadelonData out;
  out.table.values.resize(t, n);
  std::vector<int> labels(static_cast<std::size_t>(t));

  int row = 0;
  for (int cls = 1; cls <= 2; ++cls) {
    const int begin = cls == 1 ? 0 : clusters_class1;
    const int end = cls == 1 ? clusters_class1 : spec.n_clusters;
    for (int k = 0; k < spec.samples_per_class; ++k, ++row) {
      const std::uint64_t vertex = vertices[static_cast<std::size_t>(begin + k % (end - begin))];
      labels[static_cast<std::size_t>(row)] = cls;
      for (int d = 0; d < spec.n_informative; ++d) {
        const double center = (vertex >> d) & 1 ? 1.0 : -1.0;
        out.table.values(row, d) = center + noise(rng);
      }
    }
  }

  if (spec.n_redundant > 0) {
    Eigen::MatrixXd mixer(spec.n_informative, spec.n_redundant);
    for (int i = 0; i < spec.n_informative; ++i)
      for (int j = 0; j < spec.n_redundant; ++j) mixer(i, j) = mix(rng);
    out.table.values.block(0, spec.n_informative, t, spec.n_redundant) =
        out.table.values.leftCols(spec.n_informative) * mixer;
  }

  const int probe_offset = spec.n_informative + spec.n_redundant;
  for (int i = 0; i < t; ++i)
    for (int j = 0; j < spec.n_probes; ++j)
      out.table.values(i, probe_offset + j) = unit_noise(rng);

  out.table.labels = std::move(labels);
  out.table.label_names = {"1", "2"};

  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n));
  out.roles.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < spec.n_informative; ++j) {
    names.push_back("inf" + std::to_string(j));
    out.roles.push_back(FeatureRole::informative);
  }
  for (int j = 0; j < spec.n_redundant; ++j) {
    names.push_back("red" + std::to_string(j));
    out.roles.push_back(FeatureRole::redundant);
  }
  for (int j = 0; j < spec.n_probes; ++j) {
    names.push_back("probe" + std::to_string(j));
    out.roles.push_back(FeatureRole::probe);
  }
  out.table.feature_names = std::move(names);
  out.table.validate();
  return out;
}

/// Score fixture with n_high values near 1.0 and n_low values near 1.0-gap,
/// each with a small Gaussian spread.
inline ScoreVector gen_bimodal_scores(int n_high, int n_low, double gap, std::uint64_t seed) {
  if (n_high < 0 || n_low < 0 || n_high + n_low < 1)
    throw usage_error("gen_bimodal_scores: need at least one value");
  if (gap < 0.0) throw usage_error("gen_bimodal_scores: gap must be >= 0");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> spread(0.0, 0.02);
  ScoreVector out;
  out.scores.resize(n_high + n_low);
  for (int i = 0; i < n_high; ++i) out.scores[i] = 1.0 + spread(rng);
  for (int i = 0; i < n_low; ++i) out.scores[n_high + i] = 1.0 - gap + spread(rng);
  return out;
}

/// Unlabeled table of independent base columns, each followed by copies with
/// additive Gaussian noise. Exercises the correlation term of the
/// unsupervised graph weights.
inline DataTable gen_redundant_block(int n_base, int copies_per_base, double noise_sd,
                                     int samples, std::uint64_t seed) {
  if (n_base < 1) throw usage_error("gen_redundant_block: need at least one base column");
  if (copies_per_base < 0) throw usage_error("gen_redundant_block: copies must be >= 0");
  if (noise_sd < 0.0) throw usage_error("gen_redundant_block: noise_sd must be >= 0");
  if (samples < 2) throw usage_error("gen_redundant_block: need at least 2 samples");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, noise_sd);

  const int n = n_base * (1 + copies_per_base);
  DataTable table;
  table.values.resize(samples, n);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n));

  int col = 0;
  for (int b = 0; b < n_base; ++b) {
    for (int i = 0; i < samples; ++i) table.values(i, col) = unit(rng);
    names.push_back("base" + std::to_string(b));
    const int base_col = col++;
    for (int c = 0; c < copies_per_base; ++c, ++col) {
      for (int i = 0; i < samples; ++i)
        table.values(i, col) = table.values(i, base_col) + (noise_sd > 0.0 ? noise(rng) : 0.0);
      names.push_back("base" + std::to_string(b) + "_copy" + std::to_string(c));
    }
  }
  table.feature_names = std::move(names);
  return table;
}

}  // namespace inffs
