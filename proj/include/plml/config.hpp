#pragma once

#include <string>
#include <vector>

#include "plml/pipeline.hpp"

namespace plml {

/// Everything a CLI run needs besides the subcommand.
struct ExperimentConfig {
  std::string data;    // training data (or the only data for cv)
  std::string test;    // optional default test split
  std::string format;  // csv | libsvm; empty: guess from the extension
  int folds = 10;
  TrainOptions train;
  std::vector<Index> m_values{5, 10, 15, 20, 25, 30, 35, 40};
  std::string model_path;
  std::string output;
  std::string trace;

  /// Throws ContractError for bad ranges, DataError for missing files.
  void validate(bool need_data) const;
};

/// Reads a flat TOML (.toml) or JSON document into `config`, overriding the
/// fields it names. Unknown keys are rejected.
void load_config_file(const std::string& path, ExperimentConfig& config);

/// Same for an in-memory JSON document.
void apply_config_json(const std::string& json_text, ExperimentConfig& config);

}  // namespace plml
