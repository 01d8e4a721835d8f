#include "plml/ellipses.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "plml/error.hpp"
#include "plml/log.hpp"

namespace plml {

Ellipse ellipse_for_metric(const Matrix& M, const Eigen::Vector2d& center) {
  require(M.rows() == 2 && M.cols() == 2, "ellipse_for_metric: metric must be 2 x 2");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (M + M.transpose()));
  Ellipse e;
  e.center = center;
  for (int a = 0; a < 2; ++a) {
    // largest eigenvalue first: its axis is the short one
    const int k = 1 - a;
    const double lambda = es.eigenvalues()(k);
    e.directions[static_cast<size_t>(a)] = es.eigenvectors().col(k);
    if (lambda > 1e-12) {
      e.lengths[static_cast<size_t>(a)] = 1.0 / std::sqrt(lambda);
    } else {
      e.finite[static_cast<size_t>(a)] = false;
      e.lengths[static_cast<size_t>(a)] = std::numeric_limits<double>::infinity();
    }
  }
  return e;
}

std::vector<Ellipse> compute_ellipses(const PlmlModel& model, const std::vector<Index>& instances) {
  if (model.train_X.cols() != 2) {
    std::ostringstream os;
    os << "export_ellipses: model dimension is " << model.train_X.cols() << ", ellipses need d = 2";
    throw ContractError(os.str());
  }
  std::vector<Ellipse> out;
  out.reserve(instances.size());
  for (Index i : instances) {
    require(i >= 0 && i < model.train_X.rows(), "export_ellipses: instance index out of range");
    const Matrix M = combine_metric(model.W.row(i), model.basis).matrix();
    Ellipse e = ellipse_for_metric(M, model.train_X.row(i).transpose());
    e.instance = i;
    if (e.degenerate()) log::warn("instance " + std::to_string(i) + " has a singular metric; infinite axis omitted");
    out.push_back(e);
  }
  return out;
}

void write_ellipses_csv(std::ostream& os, const std::vector<Ellipse>& ellipses) {
  os << "instance,center_x,center_y,axis,dir_x,dir_y,length,degenerate\n";
  os.precision(17);
  for (const auto& e : ellipses) {
    for (size_t a = 0; a < 2; ++a) {
      if (!e.finite[a]) continue;
      os << e.instance << ',' << e.center.x() << ',' << e.center.y() << ',' << a << ',' << e.directions[a].x() << ','
         << e.directions[a].y() << ',' << e.lengths[a] << ',' << (e.degenerate() ? 1 : 0) << '\n';
    }
  }
}

void write_ellipses_svg(std::ostream& os, const std::vector<Ellipse>& ellipses, const PlmlModel& model) {
  const Matrix& X = model.train_X;
  const double size = 800.0;
  const double margin = 40.0;
  const Eigen::Vector2d lo = X.colwise().minCoeff().transpose();
  const Eigen::Vector2d hi = X.colwise().maxCoeff().transpose();
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const double px = (size - 2.0 * margin) / span;
  auto sx = [&](double x) { return margin + (x - lo.x()) * px; };
  auto sy = [&](double y) { return size - margin - (y - lo.y()) * px; };

  // Common display scale: the median finite major semi-axis spans 3% of the plot.
  std::vector<double> majors;
  for (const auto& e : ellipses) {
    for (size_t a = 0; a < 2; ++a) {
      if (e.finite[a]) majors.push_back(e.lengths[a]);
    }
  }
  double scale = 1.0;
  if (!majors.empty()) {
    std::nth_element(majors.begin(), majors.begin() + static_cast<std::ptrdiff_t>(majors.size() / 2), majors.end());
    const double med = majors[majors.size() / 2];
    if (med > 0.0) scale = 0.03 * span / med;
  }

  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (Index i = 0; i < X.rows(); ++i) {
    const int c = model.train_y[static_cast<size_t>(i)];
    os << "<circle cx=\"" << sx(X(i, 0)) << "\" cy=\"" << sy(X(i, 1)) << "\" r=\"2\" fill=\""
       << palette[static_cast<size_t>(c - 1) % 10] << "\"/>\n";
  }
  for (const auto& e : ellipses) {
    for (size_t a = 0; a < 2; ++a) {
      if (!e.finite[a]) continue;
      const Eigen::Vector2d half = e.directions[a] * e.lengths[a] * scale;
      const Eigen::Vector2d p = e.center - half;
      const Eigen::Vector2d q = e.center + half;
      os << "<line x1=\"" << sx(p.x()) << "\" y1=\"" << sy(p.y()) << "\" x2=\"" << sx(q.x()) << "\" y2=\""
         << sy(q.y()) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    }
  }
  os << "</svg>\n";
}

std::vector<Ellipse> export_ellipses(const PlmlModel& model, const std::vector<Index>& instances,
                                     const std::string& path) {
  auto ellipses = compute_ellipses(model, instances);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  const bool svg = path.size() >= 4 && path.substr(path.size() - 4) == ".svg";
  if (svg) {
    write_ellipses_svg(out, ellipses, model);
  } else {
    write_ellipses_csv(out, ellipses);
  }
  return ellipses;
}

}  // namespace plml
