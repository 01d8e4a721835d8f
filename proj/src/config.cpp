#include "plml/config.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "plml/error.hpp"

namespace plml {

void ExperimentConfig::validate(bool need_data) const {
  if (need_data) {
    if (data.empty()) throw ContractError("no dataset given");
    if (!std::filesystem::exists(data)) throw DataError("dataset '" + data + "' does not exist");
  }
  if (!test.empty() && !std::filesystem::exists(test)) throw DataError("test set '" + test + "' does not exist");
  require(train.hyper.m >= 1, "m must be at least 1");
  require(folds >= 2, "folds must be at least 2");
  require(train.inner_folds >= 2, "inner_folds must be at least 2");
  require(train.hyper.lambda1 >= 0.0 && train.hyper.lambda2 >= 0.0, "lambdas must be nonnegative");
  require(train.hyper.alpha2 >= 0.0, "alpha2 must be nonnegative");
  for (double a : train.alpha1_grid) require(a > 0.0, "alpha1 values must be positive");
  require(train.hyper.k1 >= 0 && train.hyper.k2 >= 0 && train.hyper.knn_k >= 1, "neighbor counts out of range");
  require(train.threads >= 1, "threads must be at least 1");
}

void apply_config_json(const std::string& json_text, ExperimentConfig& c) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("config: top level must be a table/object");
  auto& t = c.train;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "data") c.data = v.get<std::string>();
      else if (key == "test") c.test = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "folds") c.folds = v.get<int>();
      else if (key == "model") c.model_path = v.get<std::string>();
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "trace") c.trace = v.get<std::string>();
      else if (key == "m_values") c.m_values = v.get<std::vector<Index>>();
      else if (key == "variant") t.variant = parse_variant(v.get<std::string>());
      else if (key == "m") t.hyper.m = v.get<Index>();
      else if (key == "lambda1") t.hyper.lambda1 = v.get<double>();
      else if (key == "lambda2") t.hyper.lambda2 = v.get<double>();
      else if (key == "alpha1") t.alpha1_grid = {v.get<double>()};
      else if (key == "alpha1_grid") t.alpha1_grid = v.get<std::vector<double>>();
      else if (key == "alpha2") t.hyper.alpha2 = v.get<double>();
      else if (key == "k1") t.hyper.k1 = v.get<int>();
      else if (key == "k2") t.hyper.k2 = v.get<int>();
      else if (key == "knn_k") t.hyper.knn_k = v.get<int>();
      else if (key == "inner_folds") t.inner_folds = v.get<int>();
      else if (key == "seed") t.seed = v.get<std::uint64_t>();
      else if (key == "threads") t.threads = v.get<int>();
      else if (key == "use_pca") t.preprocess.use_pca = v.get<bool>();
      else if (key == "variance_target") t.preprocess.variance_target = v.get<double>();
      else if (key == "normalize_rows") t.preprocess.normalize_rows = v.get<bool>();
      else if (key == "pca_position") {
        const auto s = v.get<std::string>();
        if (s == "after_norm") t.preprocess.pca_position = PcaPosition::AfterNorm;
        else if (s == "before_norm") t.preprocess.pca_position = PcaPosition::BeforeNorm;
        else throw ContractError("config: pca_position must be after_norm or before_norm");
      } else if (key == "kernel") {
        const auto s = v.get<std::string>();
        if (s == "self_tuning") t.kernel = SimilarityKernel::SelfTuning;
        else if (s == "binary") t.kernel = SimilarityKernel::Binary;
        else throw ContractError("config: kernel must be self_tuning or binary");
      }
      else if (key == "weight_tol") t.weight_solver.tol = v.get<double>();
      else if (key == "weight_max_iter") t.weight_solver.max_iter = v.get<int>();
      else if (key == "metric_tol") t.metric_solver.tol = v.get<double>();
      else if (key == "metric_max_iter") t.metric_solver.max_iter = v.get<int>();
      else throw ContractError("config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("config: wrong value type: ") + e.what());
  }
}

void load_config_file(const std::string& path, ExperimentConfig& config) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  const bool is_toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
  if (!is_toml) {
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_json(ss.str(), config);
    return;
  }
  toml::table tbl;
  try {
    tbl = toml::parse(in, path);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " at line " << e.source().begin.line;
    throw DataError(os.str());
  }
  std::ostringstream js;
  js << toml::json_formatter{tbl};
  apply_config_json(js.str(), config);
}

}  // namespace plml
