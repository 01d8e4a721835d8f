#pragma once

#include <string>

#include "plml/predictor.hpp"

namespace plml {

inline constexpr const char* kModelFormat = "plml-model";
inline constexpr int kModelVersion = 1;

/// Versioned JSON document. Matrices are stored row-major with explicit shape.
std::string model_to_json(const PlmlModel& model);

/// Rejects unknown versions, malformed JSON and models violating their
/// invariants (simplex rows of W, PSD basis metrics, shapes), naming the
/// violated invariant in the DataError message.
PlmlModel model_from_json(const std::string& text);

void save_model(const std::string& path, const PlmlModel& model);
PlmlModel load_model(const std::string& path);

}  // namespace plml
