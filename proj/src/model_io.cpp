#include "plml/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "plml/error.hpp"

namespace plml {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const json& j, const char* what) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols) {
    throw DataError(std::string("model: ") + what + " has inconsistent shape");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) m(i, c) = data[static_cast<size_t>(i * cols + c)];
  }
  return m;
}

Vector vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string model_to_json(const PlmlModel& model) {
  json doc;
  doc["format"] = kModelFormat;
  doc["version"] = kModelVersion;
  doc["variant"] = to_string(model.variant);
  const auto& h = model.hyper;
  doc["hyperparams"] = {{"lambda1", h.lambda1}, {"lambda2", h.lambda2}, {"alpha1", h.alpha1}, {"alpha2", h.alpha2},
                        {"m", h.m},           {"k1", h.k1},           {"k2", h.k2},         {"knn_k", h.knn_k}};

  const auto& p = model.preprocess;
  json pre = {{"input_dim", p.input_dim},
              {"kept_features", p.kept_features},
              {"feature_means", to_std(p.feature_means)},
              {"feature_stds", to_std(p.feature_stds)},
              {"normalize_rows", p.normalize_rows},
              {"pca_position", p.pca_position == PcaPosition::AfterNorm ? "after_norm" : "before_norm"},
              {"retained_variance_fraction", p.retained_variance_fraction}};
  if (p.pca_components) {
    pre["pca"] = {{"components", matrix_to_json(*p.pca_components)}, {"mean", to_std(p.pca_mean)}};
  } else {
    pre["pca"] = nullptr;
  }
  doc["preprocess"] = pre;

  doc["anchors"] = {{"U", matrix_to_json(model.anchors.centers)}, {"assignment", model.anchors.assignment}};
  json metrics = json::array();
  for (const auto& M : model.basis.metrics()) metrics.push_back(matrix_to_json(M.matrix()));
  doc["basis"] = {{"m", model.basis.size()}, {"d", model.basis.dim()}, {"metrics", metrics}};
  doc["W"] = matrix_to_json(model.W.matrix());
  doc["train_X"] = matrix_to_json(model.train_X);
  doc["train_y"] = model.train_y;
  doc["class_names"] = model.class_names;
  return doc.dump();
}

PlmlModel model_from_json(const std::string& text) {
  if (text.empty()) throw DataError("model: empty document");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model: parse error: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kModelFormat) throw DataError("model: not a plml model document");
    const int version = doc.at("version").get<int>();
    if (version != kModelVersion) {
      std::ostringstream os;
      os << "model: unsupported version " << version << " (expected " << kModelVersion << ")";
      throw DataError(os.str());
    }
    PlmlModel model;
    model.variant = parse_variant(doc.at("variant").get<std::string>());
    const auto& h = doc.at("hyperparams");
    model.hyper.lambda1 = h.at("lambda1").get<double>();
    model.hyper.lambda2 = h.at("lambda2").get<double>();
    model.hyper.alpha1 = h.at("alpha1").get<double>();
    model.hyper.alpha2 = h.at("alpha2").get<double>();
    model.hyper.m = h.at("m").get<Index>();
    model.hyper.k1 = h.at("k1").get<int>();
    model.hyper.k2 = h.at("k2").get<int>();
    model.hyper.knn_k = h.at("knn_k").get<int>();

    const auto& pre = doc.at("preprocess");
    auto& p = model.preprocess;
    p.input_dim = pre.at("input_dim").get<Index>();
    p.kept_features = pre.at("kept_features").get<std::vector<Index>>();
    p.feature_means = vector_from_json(pre.at("feature_means"));
    p.feature_stds = vector_from_json(pre.at("feature_stds"));
    p.normalize_rows = pre.at("normalize_rows").get<bool>();
    p.pca_position = pre.at("pca_position").get<std::string>() == "before_norm" ? PcaPosition::BeforeNorm
                                                                                 : PcaPosition::AfterNorm;
    p.retained_variance_fraction = pre.at("retained_variance_fraction").get<double>();
    if (!pre.at("pca").is_null()) {
      p.pca_components = matrix_from_json(pre.at("pca").at("components"), "pca components");
      p.pca_mean = vector_from_json(pre.at("pca").at("mean"));
    }
    if (static_cast<Index>(p.kept_features.size()) != p.feature_means.size() ||
        p.feature_means.size() != p.feature_stds.size()) {
      throw DataError("model: preprocess feature vectors differ in length");
    }
    for (Index f : p.kept_features) {
      if (f < 0 || f >= p.input_dim) throw DataError("model: preprocess feature index out of range");
    }
    if ((p.feature_stds.array() <= 0.0).any()) throw DataError("model: invariant violated: feature stds must be positive");

    model.anchors.centers = matrix_from_json(doc.at("anchors").at("U"), "anchors");
    model.anchors.assignment = doc.at("anchors").at("assignment").get<std::vector<Index>>();

    std::vector<MetricMatrix> metrics;
    const auto& jm = doc.at("basis").at("metrics");
    for (size_t l = 0; l < jm.size(); ++l) {
      try {
        metrics.emplace_back(matrix_from_json(jm[l], "basis metric"));
      } catch (const ContractError& e) {
        throw DataError("model: invariant violated in basis metric " + std::to_string(l) + ": " + e.what());
      }
    }
    try {
      model.basis = BasisMetrics(std::move(metrics));
    } catch (const ContractError& e) {
      throw DataError(std::string("model: invariant violated: ") + e.what());
    }
    if (model.basis.size() != doc.at("basis").at("m").get<Index>() ||
        model.basis.dim() != doc.at("basis").at("d").get<Index>()) {
      throw DataError("model: basis shape does not match its declared m and d");
    }
    try {
      model.W = WeightMatrix(matrix_from_json(doc.at("W"), "W"));
    } catch (const ContractError& e) {
      throw DataError(std::string("model: invariant violated in W: ") + e.what());
    }
    model.train_X = matrix_from_json(doc.at("train_X"), "train_X");
    model.train_y = doc.at("train_y").get<std::vector<int>>();
    model.class_names = doc.at("class_names").get<std::vector<std::string>>();
    model.validate();
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("model: malformed document: ") + e.what());
  }
}

void save_model(const std::string& path, const PlmlModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model '" + path + "'");
  out << model_to_json(model) << '\n';
}

PlmlModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace plml
