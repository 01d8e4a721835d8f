#include "plml/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "plml/error.hpp"

namespace plml {
namespace {

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(const std::string& s) {
  const auto v = parse_double(s);
  if (!v || !std::isfinite(*v) || std::floor(*v) != *v || std::abs(*v) > 9e15) return std::nullopt;
  return static_cast<long long>(*v);
}

[[noreturn]] void parse_error(size_t line, const std::string& msg) {
  std::ostringstream os;
  os << "line " << line << ": " << msg;
  throw DataError(os.str());
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string canonical_label(const std::string& raw) {
  if (auto v = parse_integer(raw)) return std::to_string(*v);
  return raw;
}

Dataset make_dataset(std::vector<std::vector<double>> rows, const std::vector<std::string>& labels, Index d) {
  bool numeric = true;
  for (const auto& l : labels) numeric = numeric && parse_integer(l).has_value();
  std::vector<std::string> names;
  for (const auto& l : labels) names.push_back(canonical_label(l));
  std::vector<std::string> uniq = names;
  if (numeric) {
    std::sort(uniq.begin(), uniq.end(), [](const std::string& a, const std::string& b) {
      return *parse_integer(a) < *parse_integer(b);
    });
  } else {
    std::sort(uniq.begin(), uniq.end());
  }
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::map<std::string, int> code;
  for (size_t c = 0; c < uniq.size(); ++c) code[uniq[c]] = static_cast<int>(c + 1);

  Dataset ds;
  ds.X = Matrix::Zero(static_cast<Index>(rows.size()), d);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) ds.X(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  for (const auto& nm : names) ds.y.push_back(code.at(nm));
  ds.num_classes = static_cast<int>(uniq.size());
  ds.class_names = std::move(uniq);
  return ds;
}

Dataset read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::string line;
  size_t lineno = 0;
  size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split(t, ',');
    if (fields.size() < 2) parse_error(lineno, "expected at least one feature and a label");
    if (first) {
      first = false;
      const bool header = std::any_of(fields.begin(), fields.end() - 1,
                                      [](const std::string& f) { return !parse_double(f).has_value(); });
      if (header) {
        width = fields.size();
        continue;
      }
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      std::ostringstream os;
      os << "ragged row: expected " << width << " fields, found " << fields.size();
      parse_error(lineno, os.str());
    }
    std::vector<double> row;
    row.reserve(width - 1);
    for (size_t j = 0; j + 1 < fields.size(); ++j) {
      auto v = parse_double(fields[j]);
      if (!v) parse_error(lineno, "non-numeric feature '" + fields[j] + "' in column " + std::to_string(j + 1));
      if (!std::isfinite(*v)) parse_error(lineno, "non-finite feature in column " + std::to_string(j + 1));
      row.push_back(*v);
    }
    if (fields.back().empty()) parse_error(lineno, "missing label");
    rows.push_back(std::move(row));
    labels.push_back(fields.back());
  }
  if (rows.empty()) throw DataError("dataset has no rows");
  return make_dataset(std::move(rows), labels, static_cast<Index>(width - 1));
}

Dataset read_libsvm(std::istream& in, Index min_dim) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::string line;
  size_t lineno = 0;
  Index d = min_dim;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream is(line);
    std::string label;
    if (!(is >> label)) continue;
    if (!parse_integer(label)) parse_error(lineno, "label '" + label + "' is not an integer");
    std::vector<double> row;
    std::string tok;
    long long prev = 0;
    while (is >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) parse_error(lineno, "expected idx:value, found '" + tok + "'");
      const auto idx = parse_integer(tok.substr(0, colon));
      const auto val = parse_double(tok.substr(colon + 1));
      if (!idx || *idx < 1) parse_error(lineno, "bad feature index in '" + tok + "'");
      if (!val || !std::isfinite(*val)) parse_error(lineno, "non-numeric value in '" + tok + "'");
      if (*idx <= prev) parse_error(lineno, "feature indices must be strictly increasing");
      prev = *idx;
      if (static_cast<size_t>(*idx) > row.size()) row.resize(static_cast<size_t>(*idx), 0.0);
      row[static_cast<size_t>(*idx - 1)] = *val;
    }
    d = std::max<Index>(d, static_cast<Index>(row.size()));
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  if (rows.empty()) throw DataError("dataset has no rows");
  if (d == 0) throw DataError("dataset has no features");
  return make_dataset(std::move(rows), labels, d);
}

}  // namespace

DatasetFormat parse_format(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "csv") return DatasetFormat::Csv;
  if (lower == "libsvm" || lower == "svmlight") return DatasetFormat::Libsvm;
  throw DataError("unknown dataset format '" + name + "'");
}

DatasetFormat format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "libsvm" || ext == "svm" || ext == "txt" || ext == "t") return DatasetFormat::Libsvm;
  return DatasetFormat::Csv;
}

Dataset read_dataset(std::istream& in, DatasetFormat format, Index min_dim) {
  Dataset ds = format == DatasetFormat::Csv ? read_csv(in) : read_libsvm(in, min_dim);
  if (format == DatasetFormat::Csv && ds.d() < min_dim) pad_columns(ds, min_dim);
  ds.validate();
  return ds;
}

Dataset load_dataset(const std::string& path, DatasetFormat format, Index min_dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  try {
    return read_dataset(in, format, min_dim);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const Dataset& ds, DatasetFormat format) {
  out.precision(17);
  auto label_of = [&](Index i) {
    const int c = ds.y[static_cast<size_t>(i)];
    return ds.class_names.size() >= static_cast<size_t>(c) ? ds.class_names[static_cast<size_t>(c - 1)]
                                                           : std::to_string(c);
  };
  for (Index i = 0; i < ds.n(); ++i) {
    if (format == DatasetFormat::Csv) {
      for (Index j = 0; j < ds.d(); ++j) out << ds.X(i, j) << ',';
      out << label_of(i) << '\n';
    } else {
      out << label_of(i);
      for (Index j = 0; j < ds.d(); ++j) {
        if (ds.X(i, j) != 0.0) out << ' ' << (j + 1) << ':' << ds.X(i, j);
      }
      out << '\n';
    }
  }
}

void save_dataset(const std::string& path, const Dataset& ds, DatasetFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset '" + path + "'");
  write_dataset(out, ds, format);
}

void align_classes(const Dataset& reference, Dataset& other) {
  std::map<std::string, int> code;
  for (size_t c = 0; c < reference.class_names.size(); ++c) code[reference.class_names[c]] = static_cast<int>(c + 1);
  for (auto& label : other.y) {
    const std::string& name = other.class_names.at(static_cast<size_t>(label - 1));
    auto it = code.find(name);
    if (it == code.end()) throw DataError("label '" + name + "' does not occur in the training data");
    label = it->second;
  }
  other.class_names = reference.class_names;
  other.num_classes = reference.num_classes;
}

void pad_columns(Dataset& ds, Index d) {
  if (ds.d() == d) return;
  if (ds.d() > d) {
    std::ostringstream os;
    os << "dataset has " << ds.d() << " features, expected at most " << d;
    throw DataError(os.str());
  }
  Matrix wider = Matrix::Zero(ds.n(), d);
  wider.leftCols(ds.d()) = ds.X;
  ds.X = std::move(wider);
}

}  // namespace plml
