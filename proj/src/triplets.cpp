#include "plml/triplets.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "plml/error.hpp"
#include "plml/log.hpp"

namespace plml {

TripletSet generate_triplets(const Dataset& train, int k1, int k2) {
  require(k1 >= 0 && k2 >= 0, "generate_triplets: neighbor counts must be nonnegative");
  require(static_cast<Index>(train.y.size()) == train.n(), "generate_triplets: label count mismatch");

  TripletSet out;
  out.k1 = k1;
  out.k2 = k2;
  const Index n = train.n();
  std::vector<Index> same, other;
  std::vector<int> lonely_classes;

  for (Index i = 0; i < n; ++i) {
    const Vector d = (train.X.rowwise() - train.X.row(i)).rowwise().squaredNorm();
    auto closer = [&](Index a, Index b) { return d(a) < d(b) || (d(a) == d(b) && a < b); };
    same.clear();
    other.clear();
    const int yi = train.y[static_cast<size_t>(i)];
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      (train.y[static_cast<size_t>(j)] == yi ? same : other).push_back(j);
    }
    const auto ks = std::min<size_t>(static_cast<size_t>(k1), same.size());
    const auto kd = std::min<size_t>(static_cast<size_t>(k2), other.size());
    std::partial_sort(same.begin(), same.begin() + static_cast<std::ptrdiff_t>(ks), same.end(), closer);
    std::partial_sort(other.begin(), other.begin() + static_cast<std::ptrdiff_t>(kd), other.end(), closer);
    if (same.empty() && k1 > 0) lonely_classes.push_back(yi);

    for (size_t a = 0; a < ks; ++a) {
      out.same_class_pairs.emplace_back(i, same[a]);
      for (size_t b = 0; b < kd; ++b) out.triplets.push_back({i, same[a], other[b]});
    }
  }

  if (!lonely_classes.empty()) {
    std::sort(lonely_classes.begin(), lonely_classes.end());
    lonely_classes.erase(std::unique(lonely_classes.begin(), lonely_classes.end()), lonely_classes.end());
    std::ostringstream os;
    os << "classes with a single instance contribute no same-class pairs:";
    for (int c : lonely_classes) os << ' ' << c;
    log::warn(os.str());
  }
  return out;
}

void write_triplets_csv(std::ostream& os, const TripletSet& set) {
  os << "i,j,k\n";
  for (const auto& t : set.triplets) os << t.i << ',' << t.j << ',' << t.k << '\n';
}

}  // namespace plml
