#pragma once

#include <optional>
#include <vector>

#include "plml/types.hpp"

namespace plml {

enum class PcaPosition { BeforeNorm, AfterNorm };

struct PreprocessOptions {
  bool use_pca = false;
  double variance_target = 0.95;
  PcaPosition pca_position = PcaPosition::AfterNorm;
  bool normalize_rows = true;
};

/// Standardization, row L2 normalization and optional PCA, fitted on training data.
struct PreprocessModel {
  Index input_dim = 0;
  std::vector<Index> kept_features;  // input columns with nonzero variance
  Vector feature_means;              // over kept features
  Vector feature_stds;
  bool normalize_rows = true;
  PcaPosition pca_position = PcaPosition::AfterNorm;
  std::optional<Matrix> pca_components;  // kept x k, orthonormal columns
  Vector pca_mean;                       // centering applied before projection
  double retained_variance_fraction = 1.0;

  Index output_dim() const {
    return pca_components ? pca_components->cols() : static_cast<Index>(kept_features.size());
  }

  /// Means 0, stds 1, no PCA: only row normalization remains.
  static PreprocessModel identity(Index d);
};

struct PreprocessedRows {
  Matrix X;
  std::vector<Index> zero_rows;  // rows that were exactly zero before normalization
};

PreprocessModel fit_preprocess(const Matrix& train, const PreprocessOptions& options = {});

PreprocessedRows apply_preprocess(const PreprocessModel& model, const Matrix& X);

}  // namespace plml
