#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "plml/anchors_graph.hpp"
#include "plml/fista.hpp"
#include "plml/metric_solver.hpp"
#include "plml/predictor.hpp"
#include "plml/preprocess.hpp"
#include "plml/stats.hpp"
#include "plml/triplets.hpp"

namespace plml {

struct TrainOptions {
  Variant variant = Variant::PLML;
  Hyperparams hyper;  // hyper.alpha1 is used only when alpha1_grid is empty
  std::vector<double> alpha1_grid{0.01, 0.1, 1.0, 10.0, 100.0};
  int inner_folds = 2;
  PreprocessOptions preprocess;
  SimilarityKernel kernel = SimilarityKernel::SelfTuning;
  FistaOptions weight_solver;
  FistaOptions metric_solver;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct StageTiming {
  std::string stage;
  double seconds;
};

struct TrainReport {
  double selected_alpha1 = 0.0;
  std::vector<std::pair<double, double>> alpha1_scores;  // (alpha1, mean inner-CV accuracy)
  std::vector<StageTiming> timings;
  std::optional<FistaResult> weight_report;  // absent for SML and CBLML
  FistaResult metric_report;
  bool metric_converged = false;
};

struct TrainResult {
  PlmlModel model;
  TrainReport report;
};

/// Anchors, weights and triplets for preprocessed training data; everything
/// that does not depend on alpha1.
struct WeightStage {
  AnchorModel anchors;
  WeightMatrix W;
  TripletSet triplets;
  std::optional<FistaResult> report;
};

WeightStage learn_weight_stage(const Dataset& pre, const TrainOptions& options, std::vector<StageTiming>* timings = nullptr);

/// Learns basis metrics for a fixed alpha1 and assembles the model.
PlmlModel fit_metric_stage(const Dataset& pre, const WeightStage& stage, const PreprocessModel& preprocess,
                           const TrainOptions& options, double alpha1, MetricSolveResult* solve = nullptr);

/// Picks alpha1 from options.alpha1_grid by stratified inner cross-validation
/// on held-out accuracy; ties go to the smallest alpha1.
double select_alpha1(const Dataset& pre, const TrainOptions& options,
                     std::vector<std::pair<double, double>>* scores = nullptr);

/// preprocess -> anchors -> G, L -> weights -> triplets -> alpha1 selection ->
/// basis metrics. Errors are re-raised with the failing stage as a tag.
TrainResult train_pipeline(const Dataset& raw_train, const TrainOptions& options);

/// Class-stratified folds (fold membership lists), deterministic in `seed`.
std::vector<std::vector<Index>> stratified_folds(const std::vector<int>& y, int folds, std::uint64_t seed);

struct EvalResult {
  std::vector<int> predictions;
  std::vector<int> truth;
  double accuracy = 0.0;
  TrainReport report;
};

EvalResult evaluate_split(const Dataset& train, const Dataset& test, const TrainOptions& options);

struct CvResult {
  std::vector<double> fold_accuracies;
  std::vector<int> predictions;  // indexed like the input dataset
  std::vector<int> truth;
  double mean_accuracy = 0.0;
};

CvResult cross_validate(const Dataset& data, const TrainOptions& options, int folds = 10);

/// Methods understood by the comparison helpers: PLML, SML, CBLML, EUCLIDEAN.
std::vector<std::string> default_methods();

/// Predictions of one method on a test set.
std::vector<int> run_method(const std::string& method, const Dataset& train, const Dataset& test,
                            const TrainOptions& options);

ComparisonReport compare_on_split(const std::string& name, const Dataset& train, const Dataset& test,
                                  const TrainOptions& options, const std::vector<std::string>& methods,
                                  double alpha = 0.05);

ComparisonReport compare_cv(const std::string& name, const Dataset& data, const TrainOptions& options,
                            const std::vector<std::string>& methods, int folds = 10, double alpha = 0.05);

struct SweepRow {
  Index m;
  Variant variant;
  double accuracy;
};

/// PLML and CBLML accuracy for each m. Uses the test split when given,
/// otherwise `folds`-fold cross-validation.
std::vector<SweepRow> sensitivity_sweep(const Dataset& train, const Dataset* test, const TrainOptions& options,
                                        const std::vector<Index>& m_values = {5, 10, 15, 20, 25, 30, 35, 40},
                                        int folds = 10);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace plml
