// plml: train, evaluate and inspect parametric local metric 1-NN classifiers.
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 solver failure.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "plml/config.hpp"
#include "plml/dataset_io.hpp"
#include "plml/ellipses.hpp"
#include "plml/error.hpp"
#include "plml/log.hpp"
#include "plml/model_io.hpp"
#include "plml/pipeline.hpp"
#include "plml/stats.hpp"

using namespace plml;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string trace;
  int verbose = 0;
  bool quiet = false;

  std::string data, test, format, model, output;
  std::optional<int> folds;
  std::optional<std::string> variant;
  std::optional<Index> m;
  std::optional<double> lambda1, lambda2, alpha1, alpha2;
  std::optional<int> k1, k2, knn_k;
  std::optional<bool> pca;
  std::optional<bool> no_normalize;
  std::vector<Index> m_values;
  std::vector<std::string> methods;
  std::vector<Index> instances;
};

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c;
  if (!o.config.empty()) load_config_file(o.config, c);
  if (!o.data.empty()) c.data = o.data;
  if (!o.test.empty()) c.test = o.test;
  if (!o.format.empty()) c.format = o.format;
  if (!o.model.empty()) c.model_path = o.model;
  if (!o.output.empty()) c.output = o.output;
  if (!o.trace.empty()) c.trace = o.trace;
  if (o.folds) c.folds = *o.folds;
  if (o.seed) c.train.seed = *o.seed;
  if (o.threads) c.train.threads = *o.threads;
  if (o.variant) c.train.variant = parse_variant(*o.variant);
  if (o.m) c.train.hyper.m = *o.m;
  if (o.lambda1) c.train.hyper.lambda1 = *o.lambda1;
  if (o.lambda2) c.train.hyper.lambda2 = *o.lambda2;
  if (o.alpha1) c.train.alpha1_grid = {*o.alpha1};
  if (o.alpha2) c.train.hyper.alpha2 = *o.alpha2;
  if (o.k1) c.train.hyper.k1 = *o.k1;
  if (o.k2) c.train.hyper.k2 = *o.k2;
  if (o.knn_k) c.train.hyper.knn_k = *o.knn_k;
  if (o.pca) c.train.preprocess.use_pca = *o.pca;
  if (o.no_normalize) c.train.preprocess.normalize_rows = !*o.no_normalize;
  if (!o.m_values.empty()) c.m_values = o.m_values;
  return c;
}

DatasetFormat format_for(const ExperimentConfig& c, const std::string& path) {
  return c.format.empty() ? format_from_path(path) : parse_format(c.format);
}

Dataset load(const ExperimentConfig& c, const std::string& path, Index min_dim = 0) {
  return load_dataset(path, format_for(c, path), min_dim);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

void write_trace(const std::string& path, const TrainReport& report) {
  if (path.empty()) return;
  auto out = open_output(path);
  out << "solver,iteration,objective,beta,residual\n";
  out.precision(17);
  auto rows = [&](const char* solver, const FistaResult& r) {
    for (const auto& t : r.trace) {
      out << solver << ',' << t.iteration << ',' << t.objective << ',' << t.beta << ',' << t.residual << '\n';
    }
  };
  if (report.weight_report) rows("weights", *report.weight_report);
  rows("metrics", report.metric_report);
}

void log_report(const TrainReport& r) {
  std::ostringstream os;
  os << "selected alpha1 " << r.selected_alpha1;
  for (const auto& [a, s] : r.alpha1_scores) os << "\n  alpha1 " << a << ": inner accuracy " << s;
  for (const auto& t : r.timings) os << "\n  " << t.stage << ": " << std::fixed << std::setprecision(3) << t.seconds << "s";
  log::info(os.str());
}

std::string label_name(const std::vector<std::string>& names, int label) {
  if (label < 1 || static_cast<size_t>(label) > names.size()) return std::to_string(label);
  return names[static_cast<size_t>(label - 1)];
}

void print_accuracy(const std::string& what, double acc) {
  std::cout << what << ' ' << std::fixed << std::setprecision(2) << 100.0 * acc << std::defaultfloat << '\n';
}

int cmd_train(const Overrides& o) {
  const auto c = resolve(o);
  c.validate(true);
  require(!c.model_path.empty(), "train: --model output path required");
  const auto data = load(c, c.data);
  const auto result = train_pipeline(data, c.train);
  log_report(result.report);
  save_model(c.model_path, result.model);
  write_trace(c.trace, result.report);
  print_accuracy("leave-one-out training accuracy", leave_one_out_accuracy(result.model));
  return 0;
}

int cmd_predict(const Overrides& o) {
  const auto c = resolve(o);
  require(!c.model_path.empty(), "predict: --model required");
  require(!c.data.empty(), "predict: --data required");
  const auto model = load_model(c.model_path);
  const auto data = load(c, c.data, model.preprocess.input_dim);
  const auto pred = predict_batch(model, data.X, c.train.threads);
  std::ofstream file;
  if (!c.output.empty()) file = open_output(c.output);
  std::ostream& out = c.output.empty() ? std::cout : file;
  out << "index,predicted\n";
  for (size_t i = 0; i < pred.size(); ++i) out << i << ',' << label_name(model.class_names, pred[i]) << '\n';
  return 0;
}

int cmd_eval(const Overrides& o) {
  const auto c = resolve(o);
  require(!c.test.empty(), "eval: --test required");
  if (!c.model_path.empty() && c.data.empty()) {
    const auto model = load_model(c.model_path);
    auto test = load(c, c.test, model.preprocess.input_dim);
    std::vector<int> truth;
    for (int y : test.y) {
      const auto& name = test.class_names[static_cast<size_t>(y - 1)];
      const auto it = std::find(model.class_names.begin(), model.class_names.end(), name);
      truth.push_back(it == model.class_names.end() ? 0 : static_cast<int>(it - model.class_names.begin()) + 1);
    }
    print_accuracy("test accuracy", accuracy(predict_batch(model, test.X, c.train.threads), truth));
    return 0;
  }
  c.validate(true);
  const auto train = load(c, c.data);
  const auto test = load(c, c.test, train.d());
  const auto res = evaluate_split(train, test, c.train);
  log_report(res.report);
  write_trace(c.trace, res.report);
  print_accuracy("test accuracy", res.accuracy);
  return 0;
}

int cmd_cv(const Overrides& o) {
  const auto c = resolve(o);
  c.validate(true);
  const auto data = load(c, c.data);
  const auto res = cross_validate(data, c.train, c.folds);
  for (size_t f = 0; f < res.fold_accuracies.size(); ++f) {
    print_accuracy("fold " + std::to_string(f + 1) + " accuracy", res.fold_accuracies[f]);
  }
  print_accuracy("cross-validated accuracy", res.mean_accuracy);
  return 0;
}

int cmd_sweep(const Overrides& o) {
  const auto c = resolve(o);
  c.validate(true);
  const auto train = load(c, c.data);
  std::optional<Dataset> test;
  if (!c.test.empty()) test = load(c, c.test, train.d());
  const auto rows = sensitivity_sweep(train, test ? &*test : nullptr, c.train, c.m_values, c.folds);
  std::ofstream file;
  if (!c.output.empty()) file = open_output(c.output);
  write_sweep_csv(c.output.empty() ? std::cout : file, rows);
  return 0;
}

int cmd_viz(const Overrides& o) {
  const auto c = resolve(o);
  require(!c.model_path.empty(), "viz: --model required");
  require(!c.output.empty(), "viz: --output required (.svg or .csv)");
  const auto model = load_model(c.model_path);
  std::vector<Index> idx = o.instances;
  if (idx.empty()) {
    idx.resize(static_cast<size_t>(model.train_X.rows()));
    std::iota(idx.begin(), idx.end(), Index{0});
  }
  for (Index i : idx) require(i >= 0 && i < model.train_X.rows(), "viz: instance index out of range");
  const auto ellipses = export_ellipses(model, idx, c.output);
  Index degenerate = 0;
  for (const auto& e : ellipses) degenerate += e.degenerate();
  std::cout << ellipses.size() << " ellipses written to " << c.output << " (" << degenerate << " degenerate)\n";
  return 0;
}

int cmd_compare(const Overrides& o) {
  const auto c = resolve(o);
  c.validate(true);
  const auto data = load(c, c.data);
  const auto methods = o.methods.empty() ? default_methods() : o.methods;
  const std::string name = std::filesystem::path(c.data).stem().string();
  ComparisonReport rep;
  if (!c.test.empty()) rep = compare_on_split(name, data, load(c, c.test, data.d()), c.train, methods);
  else rep = compare_cv(name, data, c.train, methods, c.folds);
  write_report_table(std::cout, {rep});
  if (!c.output.empty()) {
    auto out = open_output(c.output);
    write_report_csv(out, {rep});
  }
  return 0;
}

void add_data_options(CLI::App* sub, Overrides& o, bool with_test) {
  sub->add_option("--data", o.data, "Training data (CSV or LIBSVM)");
  if (with_test) sub->add_option("--test", o.test, "Test split");
  sub->add_option("--format", o.format, "csv | libsvm (default: from extension)");
}

void add_training_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--variant", o.variant, "PLML | SML | CBLML");
  sub->add_option("-m,--bases", o.m, "Number of basis metrics");
  sub->add_option("--lambda1", o.lambda1, "Anchor locality weight");
  sub->add_option("--lambda2", o.lambda2, "Manifold smoothness weight");
  sub->add_option("--alpha1", o.alpha1, "Fix alpha1 instead of inner cross-validation");
  sub->add_option("--alpha2", o.alpha2, "Pull term weight");
  sub->add_option("--k1", o.k1, "Same-class neighbors per triplet anchor");
  sub->add_option("--k2", o.k2, "Different-class neighbors per triplet anchor");
  sub->add_option("--knn", o.knn_k, "Neighbors in the similarity graph");
  sub->add_flag("--pca{true}", o.pca, "Project onto principal components keeping 95% variance");
  sub->add_flag("--no-normalize{true}", o.no_normalize, "Skip row L2 normalization");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric local metric learning for nearest-neighbor classification"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "TOML or JSON configuration file");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--threads", o.threads, "Worker threads");
  app.add_option("--trace", o.trace, "Write the solver trace CSV here");
  app.add_flag("-v,--verbose", o.verbose, "More logging (repeat for debug)");
  app.add_flag("-q,--quiet", o.quiet, "Errors only");

  auto* train = app.add_subcommand("train", "Train a model and save it");
  add_data_options(train, o, false);
  add_training_options(train, o);
  train->add_option("--model", o.model, "Output model path");

  auto* predict = app.add_subcommand("predict", "Predict labels with a saved model");
  predict->add_option("--model", o.model, "Model path")->required();
  add_data_options(predict, o, false);
  predict->add_option("-o,--output", o.output, "Predictions CSV (default: stdout)");

  auto* eval = app.add_subcommand("eval", "Accuracy on a test split (train fresh, or --model without --data)");
  add_data_options(eval, o, true);
  add_training_options(eval, o);
  eval->add_option("--model", o.model, "Evaluate a saved model instead of training");

  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  add_data_options(cv, o, false);
  add_training_options(cv, o);
  cv->add_option("--folds", o.folds, "Number of folds");

  auto* sweep = app.add_subcommand("sweep", "PLML and CBLML accuracy over a range of m");
  add_data_options(sweep, o, true);
  add_training_options(sweep, o);
  sweep->add_option("--m-values", o.m_values, "Basis counts")->delimiter(',');
  sweep->add_option("--folds", o.folds, "Folds when no test split is given");
  sweep->add_option("-o,--output", o.output, "CSV output (default: stdout)");

  auto* viz = app.add_subcommand("viz", "Export local metric ellipses of a 2-D model");
  viz->add_option("--model", o.model, "Model path")->required();
  viz->add_option("--instances", o.instances, "Training instance indices (default: all)")->delimiter(',');
  viz->add_option("-o,--output", o.output, "Output .svg or .csv")->required();

  auto* compare = app.add_subcommand("compare", "McNemar comparison of PLML, SML, CBLML and Euclidean 1-NN");
  add_data_options(compare, o, true);
  add_training_options(compare, o);
  compare->add_option("--methods", o.methods, "Subset of PLML,SML,CBLML,EUCLIDEAN")->delimiter(',');
  compare->add_option("--folds", o.folds, "Folds when no test split is given");
  compare->add_option("-o,--output", o.output, "Also write the report as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  log::set_level(o.quiet ? log::Level::Quiet
                         : o.verbose >= 2 ? log::Level::Debug
                         : o.verbose == 1 ? log::Level::Info
                                          : log::Level::Warn);
  try {
    if (*train) return cmd_train(o);
    if (*predict) return cmd_predict(o);
    if (*eval) return cmd_eval(o);
    if (*cv) return cmd_cv(o);
    if (*sweep) return cmd_sweep(o);
    if (*viz) return cmd_viz(o);
    if (*compare) return cmd_compare(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Contract: return 1;
      case ErrorKind::Data: return 2;
      case ErrorKind::Solver: return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
