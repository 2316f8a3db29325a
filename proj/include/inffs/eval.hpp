#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "inffs/data.hpp"
#include "inffs/errors.hpp"
#include "inffs/ranking.hpp"

namespace inffs {

/// One-vs-rest L2-regularized logistic classifier with internal
/// standardization by training statistics.
struct LinearModel {
  Eigen::MatrixXd weights;  // G x d
  Eigen::VectorXd bias;     // G
  Eigen::VectorXd means;    // d, training standardization
  Eigen::VectorXd scales;   // d

  int predict_row(const Eigen::RowVectorXd& row) const {
    const Eigen::RowVectorXd z = (row - means.transpose()).cwiseQuotient(scales.transpose());
    Eigen::VectorXd score = weights * z.transpose() + bias;
    int best = 0;
    for (int g = 1; g < score.size(); ++g)
      if (score[g] > score[best]) best = g;
    return best + 1;
  }

  std::vector<int> predict(const Eigen::MatrixXd& rows) const {
    std::vector<int> out(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      out[static_cast<std::size_t>(i)] = predict_row(rows.row(i));
    return out;
  }

  /// Per-class decision scores, one row per sample.
  Eigen::MatrixXd decision_scores(const Eigen::MatrixXd& rows) const {
    Eigen::MatrixXd z = (rows.rowwise() - means.transpose()).array().rowwise() /
                        scales.transpose().array();
    return (z * weights.transpose()).rowwise() + bias.transpose();
  }
};

struct EvalReport {
  double accuracy = 0.0;
  Eigen::VectorXd per_class_accuracy;
  int b = 0;  // features used
  std::optional<std::vector<double>> fold_accuracies;
};

namespace detail {

/// Mean cross-entropy plus (lambda/2)||w||^2 and its gradient for one binary
/// one-vs-rest problem on standardized features.
inline double logistic_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                                 const Eigen::VectorXd& w, double b, Eigen::VectorXd& grad_w,
                                 double& grad_b) {
  const auto t = static_cast<double>(x.rows());
  const Eigen::VectorXd z = x * w + Eigen::VectorXd::Constant(x.rows(), b);
  // log(1+e^z) - y*z, evaluated stably
  double loss = 0.0;
  Eigen::VectorXd p(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    loss += (zi > 0.0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi))) - y[i] * zi;
    p[i] = 1.0 / (1.0 + std::exp(-zi));
  }
  loss /= t;
  loss += 0.5 * lambda * w.squaredNorm();
  const Eigen::VectorXd residual = p - y;
  grad_w = x.transpose() * residual / t + lambda * w;
  grad_b = residual.sum() / t;
  return loss;
}

/// Largest eigenvalue of X^T X / T by power iteration (deterministic start).
inline double gram_spectral_norm(const Eigen::MatrixXd& x) {
  const auto t = static_cast<double>(x.rows());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(x.cols()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd w = x.transpose() * (x * v) / t;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(x.transpose() * (x * v)) / t;
    if (std::abs(next - lambda) <= 1e-8 * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

inline std::pair<Eigen::VectorXd, double> fit_binary_logistic(const Eigen::MatrixXd& x,
                                                              const Eigen::VectorXd& y,
                                                              double lambda, int max_iterations,
                                                              double grad_tol, double lipschitz) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  double b = 0.0;
  Eigen::VectorXd grad_w;
  double grad_b = 0.0;
  double objective = logistic_objective(x, y, lambda, w, b, grad_w, grad_b);

  const double base_step = 1.0 / lipschitz;
  double step = base_step;
  for (int it = 0; it < max_iterations; ++it) {
    if (std::sqrt(grad_w.squaredNorm() + grad_b * grad_b) <= grad_tol) break;

    Eigen::VectorXd next_w;
    double next_b = 0.0, next_objective = 0.0;
    Eigen::VectorXd next_grad_w;
    double next_grad_b = 0.0;
    bool accepted = false;
    // the Lipschitz step cannot increase J beyond evaluation noise
    const double slack = 1e-12 * std::max(1.0, std::abs(objective));
    for (int half = 0; half < 60; ++half) {
      next_w = w - step * grad_w;
      next_b = b - step * grad_b;
      next_objective = logistic_objective(x, y, lambda, next_w, next_b, next_grad_w, next_grad_b);
      if (next_objective <= objective + slack) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) throw numeric_error("train_linear: step-size halving exhausted");

    w = std::move(next_w);
    b = next_b;
    grad_w = std::move(next_grad_w);
    grad_b = next_grad_b;
    objective = next_objective;
    step = std::min(step * 2.0, base_step);
  }
  return {std::move(w), b};
}

}  // namespace detail

/// Trains the one-vs-rest classifier by deterministic full-batch gradient
/// descent with backtracking, up to the iteration budget or gradient tolerance.
inline LinearModel train_linear(const DataTable& table, double lambda, int max_iterations = 500,
                                double grad_tol = 1e-8) {
  if (!table.has_labels()) throw usage_error("train_linear requires labels");
  if (!(lambda > 0.0)) throw usage_error("train_linear: lambda must be > 0");
  const int g = table.num_classes();
  const int d = table.features();
  const auto t = table.samples();

  LinearModel model;
  model.means.resize(d);
  model.scales.resize(d);
  for (int j = 0; j < d; ++j) {
    model.means[j] = table.values.col(j).mean();
    const double sd = std::sqrt((table.values.col(j).array() - model.means[j]).square().sum() /
                                static_cast<double>(t));
    model.scales[j] = sd > 0.0 ? sd : 1.0;
  }
  const Eigen::MatrixXd x = (table.values.rowwise() - model.means.transpose()).array().rowwise() /
                            model.scales.transpose().array();

  model.weights.resize(g, d);
  model.bias.resize(g);
  // logistic curvature is at most 1/4 of the data Gram plus the bias row
  const double lipschitz = 0.25 * 1.05 * (detail::gram_spectral_norm(x) + 1.0) + lambda;
  for (int cls = 1; cls <= g; ++cls) {
    Eigen::VectorXd y(t);
    for (int i = 0; i < t; ++i)
      y[i] = (*table.labels)[static_cast<std::size_t>(i)] == cls ? 1.0 : 0.0;
    auto [w, b] = detail::fit_binary_logistic(x, y, lambda, max_iterations, grad_tol, lipschitz);
    model.weights.row(cls - 1) = w.transpose();
    model.bias[cls - 1] = b;
  }
  return model;
}

/// Accuracy and per-class accuracy of a set of predictions.
inline EvalReport score_predictions(const std::vector<int>& predicted,
                                    const std::vector<int>& actual, int num_classes) {
  if (predicted.size() != actual.size() || actual.empty())
    throw usage_error("score_predictions: size mismatch");
  Eigen::VectorXd correct = Eigen::VectorXd::Zero(num_classes);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(num_classes);
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const int cls = actual[i] - 1;
    total[cls] += 1.0;
    if (predicted[i] == actual[i]) correct[cls] += 1.0;
  }
  EvalReport report;
  report.accuracy = correct.sum() / static_cast<double>(actual.size());
  report.per_class_accuracy =
      (total.array() > 0.0).select(correct.array() / total.array(), 0.0);
  return report;
}

/// What a pipeline produces once fitted on a fold's training part.
struct FittedPipeline {
  std::function<std::vector<int>(const Eigen::MatrixXd&)> predict;
  std::vector<int> selected_features;
  std::optional<LinearModel> model;
};

using FoldPipeline = std::function<FittedPipeline(const DataTable& fold_train)>;

/// Feature-selection + classification configuration evaluated by the CV loop.
struct PipelineConfig {
  GraphMode mode = GraphMode::unsupervised;
  UnsupParams unsup;
  SupParams sup;
  int bins = 16;
  RegKind reg = RegKind::spectral;
  int top_b = 10;
  double lambda = 0.1;
};

/// Fits selection and classifier on the fold-train table only.
inline FoldPipeline make_selection_pipeline(const PipelineConfig& config) {
  return [config](const DataTable& fold_train) {
    Ranking ranking = config.mode == GraphMode::unsupervised
                          ? run_inf_fs_u(fold_train, config.unsup, config.reg)
                          : run_inf_fs_s(fold_train, config.sup, config.bins, config.reg).first;
    const int b = std::min<int>(config.top_b, static_cast<int>(ranking.order.size()));
    std::vector<int> selected(ranking.order.begin(), ranking.order.begin() + b);
    std::sort(selected.begin(), selected.end());

    const DataTable train_sub = fold_train.select_cols(selected);
    LinearModel model = train_linear(train_sub, config.lambda);

    FittedPipeline fitted;
    fitted.selected_features = selected;
    fitted.model = model;
    fitted.predict = [selected, model](const Eigen::MatrixXd& rows) {
      Eigen::MatrixXd sub(rows.rows(), static_cast<Eigen::Index>(selected.size()));
      for (std::size_t j = 0; j < selected.size(); ++j)
        sub.col(static_cast<Eigen::Index>(j)) = rows.col(selected[j]);
      return model.predict(sub);
    };
    return fitted;
  };
}

struct CvResult {
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracies;
  std::vector<std::vector<int>> fold_selected;
  std::vector<LinearModel> fold_models;
};

/// Deterministic stratified fold ids: per class, shuffled then dealt
/// round-robin across the k folds.
inline std::vector<int> stratified_fold_ids(const DataTable& table, int k, std::uint64_t seed) {
  if (!table.has_labels()) throw usage_error("stratified folds require labels");
  if (k < 2 || k > table.samples()) throw usage_error("fold count must be in [2, samples]");
  for (int count : table.class_counts())
    if (count > 0 && count < 2)
      throw numeric_error("a class has too few samples for k-fold cross-validation");

  std::mt19937_64 rng(seed);
  std::vector<int> fold(static_cast<std::size_t>(table.samples()), 0);
  const int g = table.num_classes();
  int next = 0;
  for (int cls = 1; cls <= g; ++cls) {
    std::vector<int> members;
    for (int i = 0; i < table.samples(); ++i)
      if ((*table.labels)[static_cast<std::size_t>(i)] == cls) members.push_back(i);
    std::shuffle(members.begin(), members.end(), rng);
    for (int i : members) fold[static_cast<std::size_t>(i)] = next++ % k;
  }
  return fold;
}

/// Cross-validation over explicit fold ids; the pipeline is refitted on each
/// fold's training part, so no selection or standardization statistic ever
/// sees the held-out fold.
inline CvResult kfold_cv(const DataTable& table, const std::vector<int>& fold, int k,
                         const FoldPipeline& pipeline) {
  if (static_cast<int>(fold.size()) != table.samples())
    throw usage_error("kfold_cv: fold ids do not match the table");
  CvResult result;
  for (int f = 0; f < k; ++f) {
    std::vector<int> train_idx, test_idx;
    for (int i = 0; i < table.samples(); ++i)
      (fold[static_cast<std::size_t>(i)] == f ? test_idx : train_idx).push_back(i);
    if (test_idx.empty()) continue;

    const DataTable fold_train = table.select_rows(train_idx);
    FittedPipeline fitted = pipeline(fold_train);

    Eigen::MatrixXd test_rows(static_cast<Eigen::Index>(test_idx.size()), table.values.cols());
    std::vector<int> actual;
    actual.reserve(test_idx.size());
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      test_rows.row(static_cast<Eigen::Index>(i)) = table.values.row(test_idx[i]);
      actual.push_back((*table.labels)[static_cast<std::size_t>(test_idx[i])]);
    }
    const std::vector<int> predicted = fitted.predict(test_rows);
    int correct = 0;
    for (std::size_t i = 0; i < actual.size(); ++i)
      if (predicted[i] == actual[i]) ++correct;
    result.fold_accuracies.push_back(static_cast<double>(correct) /
                                     static_cast<double>(actual.size()));
    result.fold_selected.push_back(std::move(fitted.selected_features));
    if (fitted.model) result.fold_models.push_back(std::move(*fitted.model));
  }
  if (result.fold_accuracies.empty()) throw numeric_error("kfold_cv: no folds evaluated");
  result.mean_accuracy =
      std::accumulate(result.fold_accuracies.begin(), result.fold_accuracies.end(), 0.0) /
      static_cast<double>(result.fold_accuracies.size());
  return result;
}

/// Stratified k-fold cross-validation with deterministic folds for the seed.
inline CvResult kfold_cv(const DataTable& table, int k, const FoldPipeline& pipeline,
                         std::uint64_t seed) {
  return kfold_cv(table, stratified_fold_ids(table, k, seed), k, pipeline);
}

/// Candidate mixing parameters enumerated on a fixed-step grid; supervised
/// candidates walk the unit simplex.
struct AlphaGrid {
  double step = 0.1;
  std::vector<double> unsup_candidates;
  std::vector<SupParams> sup_candidates;

  static AlphaGrid unsupervised(double step = 0.1) {
    if (!(step > 0.0 && step <= 1.0)) throw usage_error("alpha grid step must be in (0,1]");
    AlphaGrid grid;
    grid.step = step;
    const int levels = static_cast<int>(std::lround(1.0 / step));
    for (int i = 0; i <= levels; ++i)
      grid.unsup_candidates.push_back(static_cast<double>(i) / levels);
    return grid;
  }

  static AlphaGrid supervised(double step = 0.1) {
    if (!(step > 0.0 && step <= 1.0)) throw usage_error("alpha grid step must be in (0,1]");
    AlphaGrid grid;
    grid.step = step;
    const int levels = static_cast<int>(std::lround(1.0 / step));
    for (int i = levels; i >= 0; --i) {
      for (int j = levels - i; j >= 0; --j) {
        const int k = levels - i - j;
        grid.sup_candidates.push_back({static_cast<double>(i) / levels,
                                       static_cast<double>(j) / levels,
                                       static_cast<double>(k) / levels});
      }
    }
    return grid;
  }
};

struct TunedAlpha {
  double unsup_alpha = 0.0;
  SupParams sup;
  double cv_accuracy = 0.0;
  std::vector<double> candidate_accuracies;
};

/// Exhaustive grid search of the mixing parameters by k-fold CV accuracy with
/// the top-b cut; ties keep the earliest candidate in enumeration order.
inline TunedAlpha tune_alpha(const DataTable& table, GraphMode mode, const AlphaGrid& grid, int k,
                             int b, std::uint64_t seed, const PipelineConfig& base = {}) {
  TunedAlpha best;
  best.cv_accuracy = -1.0;

  PipelineConfig config = base;
  config.mode = mode;
  config.top_b = b;

  if (mode == GraphMode::unsupervised) {
    if (grid.unsup_candidates.empty()) throw usage_error("tune_alpha: empty grid");
    for (double alpha : grid.unsup_candidates) {
      config.unsup.alpha = alpha;
      const double acc = kfold_cv(table, k, make_selection_pipeline(config), seed).mean_accuracy;
      best.candidate_accuracies.push_back(acc);
      if (acc > best.cv_accuracy) {
        best.cv_accuracy = acc;
        best.unsup_alpha = alpha;
      }
    }
  } else {
    if (grid.sup_candidates.empty()) throw usage_error("tune_alpha: empty grid");
    for (const SupParams& sup : grid.sup_candidates) {
      config.sup = sup;
      const double acc = kfold_cv(table, k, make_selection_pipeline(config), seed).mean_accuracy;
      best.candidate_accuracies.push_back(acc);
      if (acc > best.cv_accuracy) {
        best.cv_accuracy = acc;
        best.sup = sup;
      }
    }
  }
  return best;
}

/// Picks lambda from a grid by k-fold CV accuracy of the plain classifier
/// (no feature selection inside; the caller has already cut the features).
inline double choose_lambda(const DataTable& table, int k, const std::vector<double>& grid,
                            std::uint64_t seed) {
  if (grid.empty()) throw usage_error("choose_lambda: empty grid");
  double best_lambda = grid.front();
  double best_acc = -1.0;
  for (double lambda : grid) {
    FoldPipeline pipeline = [lambda](const DataTable& fold_train) {
      LinearModel model = train_linear(fold_train, lambda);
      FittedPipeline fitted;
      fitted.model = model;
      fitted.predict = [model](const Eigen::MatrixXd& rows) { return model.predict(rows); };
      return fitted;
    };
    const double acc = kfold_cv(table, k, pipeline, seed).mean_accuracy;
    if (acc > best_acc) {
      best_acc = acc;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

/// Trains on the top-b features of the train split for each requested b and
/// reports test accuracy.
inline std::vector<EvalReport> sweep_top_b(const DataTable& train, const DataTable& test,
                                           const Ranking& ranking, const std::vector<int>& b_list,
                                           double lambda) {
  if (!train.has_labels() || !test.has_labels())
    throw usage_error("sweep_top_b requires labeled train and test tables");
  const int n = train.features();
  std::vector<EvalReport> reports;
  for (int b : b_list) {
    if (b < 1 || b > n) throw usage_error("sweep_top_b: b out of range");
    std::vector<int> selected(ranking.order.begin(), ranking.order.begin() + b);
    std::sort(selected.begin(), selected.end());
    const DataTable train_sub = train.select_cols(selected);
    const DataTable test_sub = test.select_cols(selected);
    const LinearModel model = train_linear(train_sub, lambda);
    const std::vector<int> predicted = model.predict(test_sub.values);
    EvalReport report = score_predictions(predicted, *test_sub.labels, train.num_classes());
    report.b = b;
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace inffs
