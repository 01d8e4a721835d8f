#include "plml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "plml/error.hpp"

namespace plml {
namespace {

// log C(n, k)
double log_choose(Index n, Index k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binomial_upper_tail(Index n, Index k) {
  double p = 0.0;
  for (Index i = k; i <= n; ++i) p += std::exp(log_choose(n, i) - static_cast<double>(n) * std::log(2.0));
  return std::min(1.0, p);
}

}  // namespace

double mcnemar_chi_square(Index b, Index c) {
  if (b + c == 0) return 0.0;
  const double diff = std::abs(static_cast<double>(b - c)) - 1.0;
  return diff * diff / static_cast<double>(b + c);
}

double binomial_two_sided_p(Index b, Index c) {
  const Index n = b + c;
  if (n == 0) return 1.0;
  return std::min(1.0, 2.0 * binomial_upper_tail(n, std::max(b, c)));
}

McNemarResult mcnemar_test(const std::vector<int>& pred_a, const std::vector<int>& pred_b,
                           const std::vector<int>& truth, double alpha) {
  require(pred_a.size() == truth.size() && pred_b.size() == truth.size(), "mcnemar_test: length mismatch");
  McNemarResult r;
  for (size_t i = 0; i < truth.size(); ++i) {
    const bool a_ok = pred_a[i] == truth[i];
    const bool b_ok = pred_b[i] == truth[i];
    if (a_ok && !b_ok) ++r.b;
    if (!a_ok && b_ok) ++r.c;
  }
  if (r.b + r.c < 25) {
    r.exact = true;
    r.p_value = binomial_two_sided_p(r.b, r.c);
  } else {
    r.statistic = mcnemar_chi_square(r.b, r.c);
    r.p_value = std::erfc(std::sqrt(r.statistic / 2.0));  // chi-square, 1 dof
  }
  if (r.p_value < alpha && r.b != r.c) r.outcome = r.b > r.c ? McNemarOutcome::AWins : McNemarOutcome::BWins;
  return r;
}

std::vector<double> ranking_points(const std::vector<std::vector<PairOutcome>>& outcomes) {
  std::vector<double> pts(outcomes.size(), 0.0);
  for (size_t a = 0; a < outcomes.size(); ++a) {
    require(outcomes[a].size() == outcomes.size(), "ranking_points: outcome matrix must be square");
    for (size_t b = 0; b < outcomes.size(); ++b) {
      if (a == b) continue;
      switch (outcomes[a][b]) {
        case PairOutcome::Win: pts[a] += 1.0; break;
        case PairOutcome::Tie: pts[a] += 0.5; break;
        case PairOutcome::Loss: break;
      }
    }
  }
  return pts;
}

ComparisonReport compare_methods(const std::string& dataset, const std::vector<std::string>& methods,
                                 const std::vector<std::vector<int>>& predictions, const std::vector<int>& truth,
                                 double alpha) {
  require(methods.size() == predictions.size(), "compare_methods: one prediction vector per method");
  ComparisonReport rep;
  rep.dataset = dataset;
  rep.methods = methods;
  rep.alpha = alpha;
  const size_t k = methods.size();
  rep.outcomes.assign(k, std::vector<PairOutcome>(k, PairOutcome::Tie));
  for (size_t a = 0; a < k; ++a) {
    require(predictions[a].size() == truth.size(), "compare_methods: prediction length mismatch");
    size_t hit = 0;
    for (size_t i = 0; i < truth.size(); ++i) hit += predictions[a][i] == truth[i] ? 1 : 0;
    rep.accuracies.push_back(truth.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(truth.size()));
    for (size_t b = a + 1; b < k; ++b) {
      const auto r = mcnemar_test(predictions[a], predictions[b], truth, alpha);
      if (r.outcome == McNemarOutcome::AWins) {
        rep.outcomes[a][b] = PairOutcome::Win;
        rep.outcomes[b][a] = PairOutcome::Loss;
      } else if (r.outcome == McNemarOutcome::BWins) {
        rep.outcomes[a][b] = PairOutcome::Loss;
        rep.outcomes[b][a] = PairOutcome::Win;
      }
    }
  }
  rep.points = ranking_points(rep.outcomes);
  return rep;
}

void write_report_table(std::ostream& os, const std::vector<ComparisonReport>& reports) {
  if (reports.empty()) return;
  const auto& methods = reports.front().methods;
  size_t name_w = 14;
  for (const auto& r : reports) name_w = std::max(name_w, r.dataset.size() + 2);
  const int nw = static_cast<int>(name_w);
  os << std::left << std::setw(nw) << "Dataset";
  for (const auto& m : methods) os << std::setw(16) << m;
  os << '\n';
  std::vector<double> totals(methods.size(), 0.0);
  for (const auto& r : reports) {
    os << std::setw(nw) << r.dataset;
    for (size_t a = 0; a < methods.size(); ++a) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << 100.0 * r.accuracies[a] << '(' << std::setprecision(1)
           << r.points[a] << ')';
      os << std::setw(16) << cell.str();
      totals[a] += r.points[a];
    }
    os << '\n';
  }
  os << std::setw(nw) << "Total Score";
  for (double t : totals) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(1) << t;
    os << std::setw(16) << cell.str();
  }
  os << '\n';
}

void write_report_csv(std::ostream& os, const std::vector<ComparisonReport>& reports) {
  os << "dataset,method,accuracy,points,wins,ties,losses\n";
  os.precision(10);
  for (const auto& r : reports) {
    for (size_t a = 0; a < r.methods.size(); ++a) {
      int w = 0, t = 0, l = 0;
      for (size_t b = 0; b < r.methods.size(); ++b) {
        if (a == b) continue;
        switch (r.outcomes[a][b]) {
          case PairOutcome::Win: ++w; break;
          case PairOutcome::Tie: ++t; break;
          case PairOutcome::Loss: ++l; break;
        }
      }
      os << r.dataset << ',' << r.methods[a] << ',' << r.accuracies[a] << ',' << r.points[a] << ',' << w << ','
         << t << ',' << l << '\n';
    }
  }
}

double sign_test_p(Index wins, Index losses) {
  require(wins >= 0 && losses >= 0, "sign_test_p: counts must be nonnegative");
  if (wins + losses == 0) return 1.0;
  return binomial_upper_tail(wins + losses, wins);
}

}  // namespace plml
