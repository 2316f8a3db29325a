// Command-line front end: rank / select / eval / synth.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 numerical or
// degenerate input.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "inffs/inffs.hpp"

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CommonOptions {
  std::string input;
  std::string format = "dense";
  std::string label_column;
  std::string mode = "u";
  double alpha = 0.5;
  double alpha1 = 1.0 / 3.0;
  double alpha2 = 1.0 / 3.0;
  double alpha3 = 1.0 / 3.0;
  bool auto_alpha = false;
  std::string reg = "spectral";
  int bins = 16;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_input = true) {
  if (needs_input)
    cmd->add_option("--input", opt.input, "input table path")->required();
  cmd->add_option("--format", opt.format, "input format")
      ->check(CLI::IsMember({"dense", "sparse"}));
  cmd->add_option("--labels", opt.label_column,
                  "label column of a dense file (index or header name)");
  cmd->add_option("--mode", opt.mode, "u = unsupervised, s = supervised")
      ->check(CLI::IsMember({"u", "s"}));
  cmd->add_option("--alpha", opt.alpha, "unsupervised mixing coefficient in [0,1]");
  cmd->add_option("--alpha1", opt.alpha1, "supervised Fisher-criterion weight");
  cmd->add_option("--alpha2", opt.alpha2, "supervised mutual-information weight");
  cmd->add_option("--alpha3", opt.alpha3, "supervised standard-deviation weight");
  cmd->add_flag("--auto-alpha", opt.auto_alpha, "cross-validate the mixing coefficients");
  cmd->add_option("--reg", opt.reg, "regularization kind")
      ->check(CLI::IsMember({"spectral", "substochastic"}));
  cmd->add_option("--bins", opt.bins, "mutual-information bins");
  cmd->add_option("--seed", opt.seed, "random seed (default 0)");
  cmd->add_option("--threads", opt.threads, "worker threads (INF_FS_THREADS overrides)");
  cmd->add_option("--out", opt.out, "output path (default stdout)");
}

int resolve_threads(int flag_value) {
  if (const char* env = std::getenv("INF_FS_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
      throw inffs::usage_error("INF_FS_THREADS is not a number");
    }
  }
  return std::max(1, flag_value);
}

inffs::LabelColumn parse_label_column(const std::string& spec) {
  if (spec.empty()) return inffs::LabelColumn::none();
  try {
    std::size_t pos = 0;
    const int idx = std::stoi(spec, &pos);
    if (pos == spec.size()) return inffs::LabelColumn::by_index(idx);
  } catch (...) {
  }
  return inffs::LabelColumn::by_name(spec);
}

inffs::DataTable load_table(const CommonOptions& opt) {
  if (opt.format == "sparse") {
    if (!opt.label_column.empty())
      throw inffs::usage_error("--labels applies to dense input only; sparse rows carry labels");
    return inffs::load_sparse(opt.input);
  }
  return inffs::load_dense(opt.input, parse_label_column(opt.label_column));
}

inffs::RegKind parse_reg(const std::string& reg) {
  return reg == "substochastic" ? inffs::RegKind::substochastic : inffs::RegKind::spectral;
}

inffs::SupParams parse_sup_alphas(const CommonOptions& opt) {
  inffs::SupParams params{opt.alpha1, opt.alpha2, opt.alpha3};
  inffs::detail::check_sup_params(params);
  return params;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw inffs::io_error("cannot write '" + path + "'");
  return file;
}

struct RankOutcome {
  inffs::Ranking ranking;
  std::string mode;
  std::string alpha_desc;
};

RankOutcome compute_ranking(const inffs::DataTable& table, const CommonOptions& opt,
                            int truncate_terms) {
  const inffs::RegKind kind = parse_reg(opt.reg);
  const int threads = resolve_threads(opt.threads);
  RankOutcome out;

  if (opt.mode == "s") {
    if (!table.has_labels())
      throw inffs::usage_error("supervised mode requires a labeled table (--labels)");
    inffs::SupParams params = parse_sup_alphas(opt);
    if (opt.auto_alpha) {
      params = inffs::tune_alpha(table, inffs::GraphMode::supervised,
                                 inffs::AlphaGrid::supervised(), 5,
                                 std::min(10, table.features()), opt.seed)
                   .sup;
    }
    auto [graph, scores] = inffs::build_supervised(table, params, opt.bins);
    const auto reg = inffs::regularize(graph, kind);
    out.ranking = inffs::rank(truncate_terms > 0
                                  ? inffs::scores_truncated(graph, reg, truncate_terms)
                                  : inffs::scores_closed_form(graph, reg));
    out.mode = "supervised";
    out.alpha_desc =
        fmt(params.alpha1) + "," + fmt(params.alpha2) + "," + fmt(params.alpha3);
  } else {
    if (opt.auto_alpha && !table.has_labels())
      throw inffs::usage_error("--auto-alpha needs labels for the cross-validation loop");
    inffs::UnsupParams params{opt.alpha};
    if (opt.auto_alpha) {
      params.alpha = inffs::tune_alpha(table, inffs::GraphMode::unsupervised,
                                       inffs::AlphaGrid::unsupervised(), 5,
                                       std::min(10, table.features()), opt.seed)
                         .unsup_alpha;
    }
    const auto graph = inffs::build_unsupervised(table, params, threads);
    const auto reg = inffs::regularize(graph, kind);
    out.ranking = inffs::rank(truncate_terms > 0
                                  ? inffs::scores_truncated(graph, reg, truncate_terms)
                                  : inffs::scores_closed_form(graph, reg));
    out.mode = "unsupervised";
    out.alpha_desc = fmt(params.alpha);
  }
  return out;
}

void write_ranking_header(std::ostream& os, const inffs::DataTable& table,
                          const RankOutcome& outcome, const CommonOptions& opt) {
  const auto& reg = *outcome.ranking.scores.regularization;
  os << "# inffs rank\n";
  os << "# mode\t" << outcome.mode << "\n";
  os << "# alpha\t" << outcome.alpha_desc << "\n";
  os << "# reg\t" << opt.reg << "\n";
  os << "# r\t" << fmt(reg.factor) << "\n";
  os << "# radius\t" << fmt(reg.radius_estimate) << "\n";
  os << "# n\t" << table.features() << "\n";
}

int cmd_rank(const inffs::DataTable& table, const CommonOptions& opt, int truncate_terms) {
  const RankOutcome outcome = compute_ranking(table, opt, truncate_terms);

  std::ofstream file;
  std::ostream& os = open_out(opt.out, file);
  write_ranking_header(os, table, outcome, opt);
  os << "rank\tfeature\tname\tscore\n";
  const auto& scores = outcome.ranking.scores.scores;
  for (std::size_t k = 0; k < outcome.ranking.order.size(); ++k) {
    const int f = outcome.ranking.order[k];
    const std::string name =
        table.feature_names ? (*table.feature_names)[static_cast<std::size_t>(f)] : "-";
    os << k + 1 << '\t' << f << '\t' << name << '\t' << fmt(scores[f]) << '\n';
  }
  if (!os) throw inffs::io_error("write failed");
  return 0;
}

int cmd_select(const inffs::DataTable& table, const CommonOptions& opt,
               std::optional<double> bandwidth) {
  const RankOutcome outcome = compute_ranking(table, opt, 0);
  const inffs::SelectionResult sel = inffs::select_subset(outcome.ranking, bandwidth);

  std::ofstream file;
  std::ostream& os = open_out(opt.out, file);
  os << "# inffs select\n";
  os << "# mode\t" << outcome.mode << "\n";
  os << "# alpha\t" << outcome.alpha_desc << "\n";
  os << "# reg\t" << opt.reg << "\n";
  os << "# bandwidth\t" << fmt(sel.bandwidth) << "\n";
  os << "# modes\t";
  for (std::size_t i = 0; i < sel.modes.size(); ++i) os << (i ? " " : "") << fmt(sel.modes[i]);
  os << "\n";
  os << "# cluster_of_top\t" << sel.cluster_of_top << "\n";
  os << "# single_cluster\t" << (sel.single_cluster ? 1 : 0) << "\n";
  os << "# pareto_warning\t" << (sel.pareto_warning ? 1 : 0) << "\n";
  os << "# fallback_cut\t" << (sel.fallback_cut ? std::to_string(*sel.fallback_cut) : "-") << "\n";
  os << "# kept_count\t" << sel.kept.size() << "\n";
  for (int f : sel.kept) os << f << '\n';
  if (!os) throw inffs::io_error("write failed");
  if (sel.pareto_warning)
    std::cerr << "warning: Pareto-like score distribution; mean-shift kept "
              << sel.kept.size() << "/" << table.features()
              << " features, fallback gap cut at " << *sel.fallback_cut << "\n";
  return 0;
}

int cmd_eval(const inffs::DataTable& table, const CommonOptions& opt, std::vector<int> b_list,
             int reps, double train_fraction, double fixed_lambda, int cv_k) {
  if (!table.has_labels()) throw inffs::usage_error("eval requires a labeled table (--labels)");
  if (reps < 1) throw inffs::usage_error("--reps must be >= 1");
  std::sort(b_list.begin(), b_list.end());
  b_list.erase(std::unique(b_list.begin(), b_list.end()), b_list.end());
  if (b_list.empty()) throw inffs::usage_error("--b list is empty");
  for (int b : b_list)
    if (b < 1 || b > table.features()) throw inffs::usage_error("--b value out of range");

  const std::vector<double> lambda_grid = {0.01, 0.1, 1.0, 10.0};
  const bool auto_lambda = !(fixed_lambda > 0.0);
  const std::string method = opt.mode == "s" ? "inf_fs_s" : "inf_fs_u";

  std::ofstream file;
  std::ostream& os = open_out(opt.out, file);
  os << "# inffs eval\n";
  os << "# classifier\tl2-logistic-ovr\n";
  os << "# method\t" << method << "\n";
  os << "# reg\t" << opt.reg << "\n";
  os << "# reps\t" << reps << "\n";
  os << "# seed\t" << opt.seed << "\n";
  os << "# train_fraction\t" << fmt(train_fraction) << "\n";
  os << "# b\t";
  for (std::size_t bi = 0; bi < b_list.size(); ++bi) os << (bi ? "," : "") << b_list[bi];
  os << "\n";
  os << "# alpha\t" << (opt.auto_alpha ? "auto" : "fixed") << "\n";
  os << "# lambda\t" << (auto_lambda ? std::string("auto") : fmt(fixed_lambda)) << "\n";
  os << "# columns\trecord method rep b accuracy alpha lambda\n";

  std::vector<std::vector<double>> acc_by_b(b_list.size());
  for (int rep = 0; rep < reps; ++rep) {
    inffs::SplitSpec split_spec;
    split_spec.train_fraction = train_fraction;
    split_spec.seed = opt.seed + static_cast<std::uint64_t>(rep);
    split_spec.stratified = true;
    const inffs::SplitResult parts = inffs::split(table, split_spec);

    CommonOptions rep_opt = opt;
    if (opt.auto_alpha) {
      // tune on the training partition only, with the smallest requested b
      const int tune_b = std::min(b_list.front(), parts.train.features());
      if (opt.mode == "s") {
        const auto tuned =
            inffs::tune_alpha(parts.train, inffs::GraphMode::supervised,
                              inffs::AlphaGrid::supervised(), cv_k, tune_b, split_spec.seed);
        rep_opt.alpha1 = tuned.sup.alpha1;
        rep_opt.alpha2 = tuned.sup.alpha2;
        rep_opt.alpha3 = tuned.sup.alpha3;
      } else {
        const auto tuned =
            inffs::tune_alpha(parts.train, inffs::GraphMode::unsupervised,
                              inffs::AlphaGrid::unsupervised(), cv_k, tune_b, split_spec.seed);
        rep_opt.alpha = tuned.unsup_alpha;
      }
      rep_opt.auto_alpha = false;
    }
    const RankOutcome outcome = compute_ranking(parts.train, rep_opt, 0);

    for (std::size_t bi = 0; bi < b_list.size(); ++bi) {
      const int b = b_list[bi];
      std::vector<int> selected(outcome.ranking.order.begin(),
                                outcome.ranking.order.begin() + b);
      std::sort(selected.begin(), selected.end());
      const inffs::DataTable train_sub = parts.train.select_cols(selected);
      const double lambda =
          auto_lambda ? inffs::choose_lambda(train_sub, cv_k, lambda_grid, split_spec.seed)
                      : fixed_lambda;
      const auto reports =
          inffs::sweep_top_b(parts.train, parts.test, outcome.ranking, {b}, lambda);
      const double acc = reports.front().accuracy;
      acc_by_b[bi].push_back(acc);
      os << "record\t" << method << '\t' << rep << '\t' << b << '\t' << fmt(acc) << '\t'
         << outcome.alpha_desc << '\t' << fmt(lambda) << '\n';
    }
  }

  os << "# columns\tsummary method b mean sd\n";
  for (std::size_t bi = 0; bi < b_list.size(); ++bi) {
    const auto& accs = acc_by_b[bi];
    const double mean =
        std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    const double sd = accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1)) : 0.0;
    os << "summary\t" << method << '\t' << b_list[bi] << '\t' << fmt(mean) << '\t' << fmt(sd)
       << '\n';
  }
  if (!os) throw inffs::io_error("write failed");
  return 0;
}

struct SynthOptions {
  std::string kind = "madelon";
  inffs::MadelonSpec madelon;
  int high = 3, low = 2;
  double gap = 0.8;
  int bases = 2, copies = 3, samples = 100;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

void write_roles(const std::string& path, const std::vector<std::string>& roles) {
  std::ofstream out(path);
  if (!out) throw inffs::io_error("cannot write '" + path + "'");
  for (const auto& role : roles) out << role << '\n';
}

int cmd_synth(const SynthOptions& opt) {
  if (opt.out.empty()) throw inffs::usage_error("synth requires --out");
  if (opt.kind == "madelon") {
    inffs::MadelonSpec spec = opt.madelon;
    spec.seed = opt.seed;
    const inffs::MadelonData data = inffs::gen_madelon(spec);
    inffs::save_dense(data.table, opt.out);
    std::vector<std::string> roles;
    roles.reserve(data.roles.size());
    for (auto role : data.roles) roles.emplace_back(inffs::to_string(role));
    write_roles(opt.out + ".roles", roles);
  } else if (opt.kind == "bimodal") {
    const inffs::ScoreVector scores =
        inffs::gen_bimodal_scores(opt.high, opt.low, opt.gap, opt.seed);
    std::ofstream out(opt.out);
    if (!out) throw inffs::io_error("cannot write '" + opt.out + "'");
    for (Eigen::Index i = 0; i < scores.scores.size(); ++i) out << fmt(scores.scores[i]) << '\n';
    std::vector<std::string> roles;
    for (int i = 0; i < opt.high; ++i) roles.emplace_back("high");
    for (int i = 0; i < opt.low; ++i) roles.emplace_back("low");
    write_roles(opt.out + ".roles", roles);
  } else {  // redundant
    const inffs::DataTable table =
        inffs::gen_redundant_block(opt.bases, opt.copies, opt.noise_sd, opt.samples, opt.seed);
    inffs::save_dense(table, opt.out);
    std::vector<std::string> roles;
    for (int b = 0; b < opt.bases; ++b) {
      roles.emplace_back("base");
      for (int c = 0; c < opt.copies; ++c) roles.emplace_back("copy");
    }
    write_roles(opt.out + ".roles", roles);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infinite Feature Selection: graph-based feature ranking and selection"};
  app.require_subcommand(1);

  CommonOptions rank_opt, select_opt, eval_opt;
  int truncate_terms = 0;
  double select_bandwidth = 0.0;

  CLI::App* rank_cmd = app.add_subcommand("rank", "rank all features");
  add_common(rank_cmd, rank_opt);
  rank_cmd
      ->add_option("--truncate", truncate_terms,
                   "audit mode: use the L-term partial sum instead of the closed form")
      ->check(CLI::PositiveNumber);

  CLI::App* select_cmd = app.add_subcommand("select", "rank and cut to a feature subset");
  add_common(select_cmd, select_opt);
  select_cmd->add_option("--bandwidth", select_bandwidth,
                         "mean-shift bandwidth (default: automatic)");

  CLI::App* eval_cmd = app.add_subcommand("eval", "split, rank, and score top-b cuts");
  add_common(eval_cmd, eval_opt);
  std::vector<int> b_list = {10, 50, 100, 150, 200};
  int reps = 20;
  double train_fraction = 0.7;
  double fixed_lambda = 0.0;
  int cv_k = 5;
  eval_cmd->add_option("--b", b_list, "top-b cuts to score")->delimiter(',');
  eval_cmd->add_option("--reps", reps, "shuffled split repetitions (default 20)");
  eval_cmd->add_option("--train-frac", train_fraction, "train fraction (default 0.7)");
  eval_cmd->add_option("--lambda", fixed_lambda,
                       "fixed classifier regularization (default: inner CV over a grid)");
  eval_cmd->add_option("--cv-k", cv_k, "folds for inner cross-validation (default 5)");

  SynthOptions synth_opt;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate benchmark datasets");
  synth_cmd->add_option("--kind", synth_opt.kind, "generator")
      ->check(CLI::IsMember({"madelon", "bimodal", "redundant"}));
  synth_cmd->add_option("--informative", synth_opt.madelon.n_informative, "");
  synth_cmd->add_option("--redundant", synth_opt.madelon.n_redundant, "");
  synth_cmd->add_option("--probes", synth_opt.madelon.n_probes, "");
  synth_cmd->add_option("--clusters", synth_opt.madelon.n_clusters, "");
  synth_cmd->add_option("--per-class", synth_opt.madelon.samples_per_class, "");
  synth_cmd->add_option("--high", synth_opt.high, "bimodal: high-group size");
  synth_cmd->add_option("--low", synth_opt.low, "bimodal: low-group size");
  synth_cmd->add_option("--gap", synth_opt.gap, "bimodal: distance between groups");
  synth_cmd->add_option("--bases", synth_opt.bases, "redundant: base columns");
  synth_cmd->add_option("--copies", synth_opt.copies, "redundant: copies per base");
  synth_cmd->add_option("--noise-sd", synth_opt.noise_sd, "redundant: copy noise");
  synth_cmd->add_option("--samples", synth_opt.samples, "redundant: sample count");
  synth_cmd->add_option("--seed", synth_opt.seed, "random seed (default 0)");
  synth_cmd->add_option("--out", synth_opt.out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rank_cmd->parsed()) return cmd_rank(load_table(rank_opt), rank_opt, truncate_terms);
    if (select_cmd->parsed()) {
      std::optional<double> bandwidth;
      if (select_cmd->count("--bandwidth")) bandwidth = select_bandwidth;
      return cmd_select(load_table(select_opt), select_opt, bandwidth);
    }
    if (eval_cmd->parsed())
      return cmd_eval(load_table(eval_opt), eval_opt, b_list, reps, train_fraction, fixed_lambda,
                      cv_k);
    if (synth_cmd->parsed()) return cmd_synth(synth_opt);
  } catch (const inffs::usage_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const inffs::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const inffs::numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
