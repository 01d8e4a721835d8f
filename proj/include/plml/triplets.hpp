#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "plml/types.hpp"

namespace plml {

/// c(i, j, k): under instance i's metric, d^2(x_i, x_k) should exceed d^2(x_i, x_j) + 1.
struct Triplet {
  Index i;
  Index j;  // same class as i
  Index k;  // different class

  friend bool operator==(const Triplet&, const Triplet&) = default;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

struct TripletSet {
  std::vector<Triplet> triplets;
  std::vector<std::pair<Index, Index>> same_class_pairs;  // (i, j) for the pull term
  int k1 = 3;
  int k2 = 3;

  Index size() const { return static_cast<Index>(triplets.size()); }
};

/// For every instance, the Cartesian product of its k1 nearest same-class and
/// k2 nearest different-class neighbors (Euclidean, ties to the lowest index).
TripletSet generate_triplets(const Dataset& train, int k1 = 3, int k2 = 3);

void write_triplets_csv(std::ostream& os, const TripletSet& set);

}  // namespace plml
