#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "plml/types.hpp"

namespace plml {

enum class DatasetFormat { Csv, Libsvm };

/// "csv" or "libsvm" (case-insensitive); anything else is a DataError.
DatasetFormat parse_format(const std::string& name);

/// Guesses the format from the extension: .libsvm/.svm/.txt/.t are LIBSVM.
DatasetFormat format_from_path(const std::string& path);

/// CSV: last column is the label, a header line is detected when any feature
/// field of the first line is non-numeric. LIBSVM: `label idx:val ...` with
/// 1-based indices, densified to max(index, min_dim) columns.
/// Labels that all parse as integers are coded by numeric order, otherwise
/// lexicographically. Errors carry the line number.
Dataset read_dataset(std::istream& in, DatasetFormat format, Index min_dim = 0);
Dataset load_dataset(const std::string& path, DatasetFormat format, Index min_dim = 0);

void write_dataset(std::ostream& out, const Dataset& ds, DatasetFormat format);
void save_dataset(const std::string& path, const Dataset& ds, DatasetFormat format);

/// Recodes `other` so its labels use `reference`'s class coding. Labels not
/// present in `reference` raise a DataError.
void align_classes(const Dataset& reference, Dataset& other);

/// Pads with zero columns or rejects when `ds` is wider than `d`.
void pad_columns(Dataset& ds, Index d);

}  // namespace plml
