#include "plml/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "plml/error.hpp"
#include "plml/log.hpp"
#include "plml/weight_solver.hpp"

namespace plml {
namespace {

template <class F>
auto run_stage(const char* name, std::vector<StageTiming>* timings, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (timings) timings->push_back({name, secs});
    std::ostringstream os;
    os << "stage " << name << ": " << secs << " s";
    log::info(os.str());
  };
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      finish();
    } else {
      auto result = body();
      finish();
      return result;
    }
  } catch (const Error& e) {
    rethrow_with_stage(e, name);
  }
}

Dataset preprocessed_copy(const Dataset& raw, const PreprocessModel& model) {
  Dataset out = raw;
  out.X = apply_preprocess(model, raw.X).X;
  return out;
}

Index effective_m(const TrainOptions& options) { return options.variant == Variant::SML ? 1 : options.hyper.m; }

// Recodes `other` into `reference`'s class coding by class name. Labels the
// reference never saw become 0, which no model predicts.
void align_labels_to(const Dataset& reference, Dataset& other) {
  std::map<std::string, int> code;
  for (size_t c = 0; c < reference.class_names.size(); ++c) code[reference.class_names[c]] = static_cast<int>(c + 1);
  for (int& label : other.y) {
    if (label < 1 || static_cast<size_t>(label) > other.class_names.size()) {
      label = 0;
      continue;
    }
    const auto it = code.find(other.class_names[static_cast<size_t>(label - 1)]);
    label = it == code.end() ? 0 : it->second;
  }
  other.class_names = reference.class_names;
  other.num_classes = reference.num_classes;
}

}  // namespace

WeightStage learn_weight_stage(const Dataset& pre, const TrainOptions& options, std::vector<StageTiming>* timings) {
  WeightStage stage;
  const Index m = effective_m(options);
  stage.anchors = run_stage("anchors", timings, [&] { return kmeans(pre.X, m, options.seed); });

  switch (options.variant) {
    case Variant::SML: stage.W = WeightMatrix(Matrix::Ones(pre.n(), 1)); break;
    case Variant::CBLML: stage.W = WeightMatrix::one_hot(stage.anchors.assignment, m); break;
    case Variant::PLML: {
      WeightProblem prob;
      prob.X = pre.X;
      prob.U = stage.anchors.centers;
      prob.lambda1 = options.hyper.lambda1;
      prob.lambda2 = options.hyper.lambda2;
      run_stage("graph", timings, [&] {
        prob.G = build_anchor_distances(prob.U, prob.X);
        prob.L = build_laplacian(prob.X, options.hyper.knn_k, options.kernel).L;
      });
      auto solved = run_stage("weights", timings, [&] {
        return solve_weights(prob, WeightMatrix::uniform(pre.n(), m), options.weight_solver);
      });
      stage.W = std::move(solved.W);
      stage.report = std::move(solved.report);
      break;
    }
  }
  stage.triplets = run_stage("triplets", timings, [&] { return generate_triplets(pre, options.hyper.k1, options.hyper.k2); });
  return stage;
}

PlmlModel fit_metric_stage(const Dataset& pre, const WeightStage& stage, const PreprocessModel& preprocess,
                           const TrainOptions& options, double alpha1, MetricSolveResult* solve) {
  MetricProblem prob;
  prob.X = pre.X;
  prob.W = stage.W;
  prob.triplets = stage.triplets;
  prob.alpha1 = alpha1;
  prob.alpha2 = options.hyper.alpha2;
  MetricSolveResult result = solve_basis_metrics(prob, options.metric_solver);

  PlmlModel model;
  model.preprocess = preprocess;
  model.anchors = stage.anchors;
  model.basis = result.basis;
  model.W = stage.W;
  model.train_X = pre.X;
  model.train_y = pre.y;
  model.class_names = pre.class_names;
  model.variant = options.variant;
  model.hyper = options.hyper;
  model.hyper.m = stage.W.cols();
  model.hyper.alpha1 = alpha1;
  if (solve) *solve = std::move(result);
  return model;
}

std::vector<std::vector<Index>> stratified_folds(const std::vector<int>& y, int folds, std::uint64_t seed) {
  require(folds >= 2, "stratified_folds: need at least two folds");
  std::map<int, std::vector<Index>> by_class;
  for (size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(static_cast<Index>(i));
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> out(static_cast<size_t>(folds));
  size_t next = 0;
  for (auto& [label, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (Index i : idx) {
      out[next].push_back(i);
      next = (next + 1) % static_cast<size_t>(folds);
    }
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

namespace {

// Complement of fold `f`, in ascending order.
std::vector<Index> training_rows(const std::vector<std::vector<Index>>& folds, size_t f, Index n) {
  std::vector<bool> held(static_cast<size_t>(n), false);
  for (Index i : folds[f]) held[static_cast<size_t>(i)] = true;
  std::vector<Index> rows;
  for (Index i = 0; i < n; ++i) {
    if (!held[static_cast<size_t>(i)]) rows.push_back(i);
  }
  return rows;
}

// Sub-dataset recoded so every present class is nonempty, keeping names.
Dataset compact_subset(const Dataset& data, const std::vector<Index>& rows) {
  Dataset sub = data.subset(rows);
  std::vector<int> present(static_cast<size_t>(data.num_classes) + 1, 0);
  for (int c : sub.y) present[static_cast<size_t>(c)] = 1;
  std::vector<int> code(present.size(), 0);
  std::vector<std::string> names;
  int next = 1;
  for (size_t c = 1; c < present.size(); ++c) {
    if (!present[c]) continue;
    code[c] = next++;
    names.push_back(c - 1 < data.class_names.size() ? data.class_names[c - 1] : std::to_string(c));
  }
  for (int& c : sub.y) c = code[static_cast<size_t>(c)];
  sub.num_classes = next - 1;
  sub.class_names = std::move(names);
  return sub;
}

// Maps predictions made in `sub`'s coding back to `full`'s coding.
int decode_label(const Dataset& full, const Dataset& sub, int label) {
  const auto& name = sub.class_names[static_cast<size_t>(label - 1)];
  const auto it = std::find(full.class_names.begin(), full.class_names.end(), name);
  return static_cast<int>(it - full.class_names.begin()) + 1;
}

}  // namespace

double select_alpha1(const Dataset& pre, const TrainOptions& options, std::vector<std::pair<double, double>>* scores) {
  const auto& grid = options.alpha1_grid;
  if (grid.empty()) return options.hyper.alpha1;
  if (grid.size() == 1) {
    if (scores) scores->emplace_back(grid.front(), 0.0);
    return grid.front();
  }
  const auto folds = stratified_folds(pre.y, options.inner_folds, options.seed + 1);
  std::vector<double> total(grid.size(), 0.0);
  for (size_t f = 0; f < folds.size(); ++f) {
    const Dataset fit = compact_subset(pre, training_rows(folds, f, pre.n()));
    Dataset held = pre.subset(folds[f]);
    TrainOptions inner = options;
    if (inner.hyper.m > fit.n()) {
      log::warn("inner cross-validation fold smaller than m; clamping m to the fold size");
      inner.hyper.m = fit.n();
    }
    inner.hyper.knn_k = std::min<int>(inner.hyper.knn_k, static_cast<int>(fit.n()) - 1);
    const WeightStage stage = learn_weight_stage(fit, inner, nullptr);
    const PreprocessModel identity = PreprocessModel::identity(pre.d());
    for (size_t a = 0; a < grid.size(); ++a) {
      const PlmlModel model = fit_metric_stage(fit, stage, identity, inner, grid[a]);
      const auto pred = predict_batch_preprocessed(model, held.X, options.threads);
      size_t hit = 0;
      for (size_t i = 0; i < pred.size(); ++i) hit += decode_label(pre, fit, pred[i]) == held.y[i] ? 1 : 0;
      total[a] += held.y.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(held.y.size());
    }
  }
  size_t best = 0;
  for (size_t a = 0; a < grid.size(); ++a) {
    const double mean = total[a] / static_cast<double>(folds.size());
    if (scores) scores->emplace_back(grid[a], mean);
    // strict comparison in ascending-alpha order keeps the smallest alpha on ties
    const bool better = total[a] > total[best] || (total[a] == total[best] && grid[a] < grid[best]);
    if (better) best = a;
  }
  return grid[best];
}

TrainResult train_pipeline(const Dataset& raw_train, const TrainOptions& options) {
  TrainResult out;
  auto& timings = out.report.timings;
  run_stage("validate", &timings, [&] { raw_train.validate(); });
  const PreprocessModel preprocess =
      run_stage("preprocess", &timings, [&] { return fit_preprocess(raw_train.X, options.preprocess); });
  const Dataset pre = preprocessed_copy(raw_train, preprocess);

  const WeightStage stage = learn_weight_stage(pre, options, &timings);
  out.report.weight_report = stage.report;

  std::vector<std::pair<double, double>> scores;
  const double alpha1 = run_stage("alpha1-selection", &timings, [&] { return select_alpha1(pre, options, &scores); });
  out.report.selected_alpha1 = alpha1;
  out.report.alpha1_scores = std::move(scores);

  MetricSolveResult solve;
  out.model = run_stage("metrics", &timings, [&] { return fit_metric_stage(pre, stage, preprocess, options, alpha1, &solve); });
  out.report.metric_report = std::move(solve.report);
  out.report.metric_converged = solve.converged;
  return out;
}

EvalResult evaluate_split(const Dataset& train, const Dataset& test, const TrainOptions& options) {
  Dataset aligned = test;
  align_labels_to(train, aligned);
  TrainResult tr = train_pipeline(train, options);
  EvalResult out;
  out.predictions = run_stage("predict", &tr.report.timings,
                              [&] { return predict_batch(tr.model, aligned.X, options.threads); });
  out.truth = aligned.y;
  out.accuracy = accuracy(out.predictions, out.truth);
  out.report = std::move(tr.report);
  return out;
}

CvResult cross_validate(const Dataset& data, const TrainOptions& options, int folds) {
  CvResult out;
  out.truth = data.y;
  out.predictions.assign(data.y.size(), 0);
  const auto parts = stratified_folds(data.y, folds, options.seed);
  for (size_t f = 0; f < parts.size(); ++f) {
    if (parts[f].empty()) continue;
    const Dataset train = compact_subset(data, training_rows(parts, f, data.n()));
    const Dataset test = data.subset(parts[f]);
    const TrainResult tr = train_pipeline(train, options);
    const auto pred = predict_batch(tr.model, test.X, options.threads);
    size_t hit = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
      const int label = decode_label(data, train, pred[i]);
      out.predictions[static_cast<size_t>(parts[f][i])] = label;
      hit += label == test.y[i] ? 1 : 0;
    }
    out.fold_accuracies.push_back(static_cast<double>(hit) / static_cast<double>(pred.size()));
  }
  out.mean_accuracy = accuracy(out.predictions, out.truth);
  return out;
}

std::vector<std::string> default_methods() { return {"PLML", "SML", "CBLML", "EUCLIDEAN"}; }

std::vector<int> run_method(const std::string& method, const Dataset& train, const Dataset& test,
                            const TrainOptions& options) {
  Dataset aligned = test;
  align_labels_to(train, aligned);
  if (method == "EUCLIDEAN") {
    const PreprocessModel pm = fit_preprocess(train.X, options.preprocess);
    return euclidean_1nn(apply_preprocess(pm, train.X).X, train.y, apply_preprocess(pm, aligned.X).X);
  }
  TrainOptions o = options;
  o.variant = parse_variant(method);
  const TrainResult tr = train_pipeline(train, o);
  return predict_batch(tr.model, aligned.X, options.threads);
}

ComparisonReport compare_on_split(const std::string& name, const Dataset& train, const Dataset& test,
                                  const TrainOptions& options, const std::vector<std::string>& methods, double alpha) {
  Dataset aligned = test;
  align_labels_to(train, aligned);
  std::vector<std::vector<int>> preds;
  for (const auto& m : methods) preds.push_back(run_method(m, train, aligned, options));
  return compare_methods(name, methods, preds, aligned.y, alpha);
}

ComparisonReport compare_cv(const std::string& name, const Dataset& data, const TrainOptions& options,
                            const std::vector<std::string>& methods, int folds, double alpha) {
  const auto parts = stratified_folds(data.y, folds, options.seed);
  std::vector<std::vector<int>> preds(methods.size(), std::vector<int>(data.y.size(), 0));
  for (size_t f = 0; f < parts.size(); ++f) {
    if (parts[f].empty()) continue;
    const Dataset train = compact_subset(data, training_rows(parts, f, data.n()));
    const Dataset test = data.subset(parts[f]);
    for (size_t a = 0; a < methods.size(); ++a) {
      Dataset t = test;
      const auto p = run_method(methods[a], train, t, options);
      for (size_t i = 0; i < p.size(); ++i) preds[a][static_cast<size_t>(parts[f][i])] = decode_label(data, train, p[i]);
    }
  }
  return compare_methods(name, methods, preds, data.y, alpha);
}

std::vector<SweepRow> sensitivity_sweep(const Dataset& train, const Dataset* test, const TrainOptions& options,
                                        const std::vector<Index>& m_values, int folds) {
  std::vector<SweepRow> rows;
  for (Index m : m_values) {
    for (Variant v : {Variant::PLML, Variant::CBLML}) {
      TrainOptions o = options;
      o.variant = v;
      o.hyper.m = m;
      const double acc = test ? evaluate_split(train, *test, o).accuracy : cross_validate(train, o, folds).mean_accuracy;
      rows.push_back({m, v, acc});
      std::ostringstream os;
      os << "sweep m=" << m << ' ' << to_string(v) << " accuracy " << acc;
      log::info(os.str());
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "m,variant,accuracy\n";
  os.precision(10);
  for (const auto& r : rows) os << r.m << ',' << to_string(r.variant) << ',' << r.accuracy << '\n';
}

}  // namespace plml
