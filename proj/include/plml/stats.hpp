#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "plml/types.hpp"

namespace plml {

enum class McNemarOutcome { AWins, BWins, Tie };

struct McNemarResult {
  McNemarOutcome outcome = McNemarOutcome::Tie;
  Index b = 0;  // A right, B wrong
  Index c = 0;  // A wrong, B right
  bool exact = false;
  double statistic = 0.0;  // chi-square statistic when !exact
  double p_value = 1.0;
};

/// Continuity-corrected statistic (|b - c| - 1)^2 / (b + c).
double mcnemar_chi_square(Index b, Index c);

/// Exact two-sided binomial p-value for b successes out of b + c at p = 1/2.
double binomial_two_sided_p(Index b, Index c);

/// Paired test on discordant counts: exact binomial when b + c < 25,
/// continuity-corrected chi-square with one degree of freedom otherwise.
McNemarResult mcnemar_test(const std::vector<int>& pred_a, const std::vector<int>& pred_b,
                           const std::vector<int>& truth, double alpha = 0.05);

enum class PairOutcome { Win, Tie, Loss };

/// Pairwise comparison of several methods on one dataset.
struct ComparisonReport {
  std::string dataset;
  std::vector<std::string> methods;
  std::vector<double> accuracies;
  std::vector<std::vector<PairOutcome>> outcomes;  // outcomes[a][b] from a's side; diagonal unused
  double alpha = 0.05;
  std::vector<double> points;
};

/// Win = 1, tie = 0.5, loss = 0 per opponent, summed per method.
std::vector<double> ranking_points(const std::vector<std::vector<PairOutcome>>& outcomes);

ComparisonReport compare_methods(const std::string& dataset, const std::vector<std::string>& methods,
                                 const std::vector<std::vector<int>>& predictions, const std::vector<int>& truth,
                                 double alpha = 0.05);

/// Accuracy (points) per dataset and method, plus a total score row.
void write_report_table(std::ostream& os, const std::vector<ComparisonReport>& reports);

/// Long-format CSV: dataset,method,accuracy,points,wins,ties,losses.
void write_report_csv(std::ostream& os, const std::vector<ComparisonReport>& reports);

/// One-sided sign test: P(X >= wins) for X ~ Binomial(wins + losses, 1/2); ties dropped.
double sign_test_p(Index wins, Index losses);

}  // namespace plml
