// End-to-end library walkthrough: generate a benchmark table, rank its
// features both ways, cut the ranking, and score the cut on held-out data.

#include <cstdio>

#include "inffs/inffs.hpp"

int main() {
  inffs::MadelonSpec spec;
  spec.n_probes = 60;
  spec.samples_per_class = 300;
  spec.seed = 42;
  const inffs::MadelonData data = inffs::gen_madelon(spec);
  std::printf("table: %d samples x %d features, %d classes\n", data.table.samples(),
              data.table.features(), data.table.num_classes());

  const inffs::SplitResult parts =
      inffs::split(data.table, {.train_fraction = 0.7, .seed = 0, .stratified = true});

  // supervised ranking on the training split
  const auto [ranking, criteria] = inffs::run_inf_fs_s(parts.train, {}, 16);
  std::printf("top features:");
  for (int k = 0; k < 8; ++k)
    std::printf(" %s", (*data.table.feature_names)[static_cast<std::size_t>(ranking.order[k])].c_str());
  std::printf("\n");

  // automatic cut of the score distribution
  const inffs::SelectionResult cut = inffs::select_subset(ranking);
  std::printf("mean-shift kept %zu of %d features (bandwidth %.4f, %zu modes)\n",
              cut.kept.size(), parts.train.features(), cut.bandwidth, cut.modes.size());

  // accuracy of the top-b cuts on the held-out split
  for (const auto& report :
       inffs::sweep_top_b(parts.train, parts.test, ranking, {10, 20, 40}, 0.1)) {
    std::printf("top-%-3d accuracy %.4f\n", report.b, report.accuracy);
  }

  // unsupervised variant ignores the labels entirely
  const inffs::Ranking unsup = inffs::run_inf_fs_u(parts.train, {.alpha = 0.5});
  std::printf("unsupervised top feature: %s\n",
              (*data.table.feature_names)[static_cast<std::size_t>(unsup.order[0])].c_str());
  return 0;
}
