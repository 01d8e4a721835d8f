#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "plml/predictor.hpp"

namespace plml {

/// The unit ball {z : (z - c)^T M (z - c) = 1} of a 2 x 2 metric.
struct Ellipse {
  Index instance = -1;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::array<Eigen::Vector2d, 2> directions;  // unit axis directions (eigenvectors)
  std::array<double, 2> lengths{0.0, 0.0};    // semi-axis 1/sqrt(lambda)
  std::array<bool, 2> finite{true, true};     // false where lambda <= 1e-12
  bool degenerate() const { return !finite[0] || !finite[1]; }
};

Ellipse ellipse_for_metric(const Matrix& M, const Eigen::Vector2d& center);

/// Ellipses of the combined local metrics of the given training instances.
/// Requires a two-dimensional model.
std::vector<Ellipse> compute_ellipses(const PlmlModel& model, const std::vector<Index>& instances);

/// instance,center_x,center_y,axis,dir_x,dir_y,length,degenerate; one row per finite axis.
void write_ellipses_csv(std::ostream& os, const std::vector<Ellipse>& ellipses);

/// Standalone SVG: training points colored by class and each instance's axes,
/// drawn at a common display scale.
void write_ellipses_svg(std::ostream& os, const std::vector<Ellipse>& ellipses, const PlmlModel& model);

/// Writes SVG when `path` ends in .svg, CSV otherwise.
std::vector<Ellipse> export_ellipses(const PlmlModel& model, const std::vector<Index>& instances,
                                     const std::string& path);

}  // namespace plml
