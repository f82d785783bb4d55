#pragma once

#include <cstddef>
#include <vector>

namespace riesz {

// Kahan-compensated accumulator. Energy sums mix O(n^2) terms spanning many
// orders of magnitude; the convergence-rate tables are sensitive to the
// resulting rounding floor, so all energy assembly goes through this.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Deterministic pairwise reduction with a fixed tree, independent of any
// thread count used to fill `terms`.
inline double pairwise_sum(std::vector<double> terms) {
  if (terms.empty()) return 0.0;
  std::size_t m = terms.size();
  while (m > 1) {
    const std::size_t half = (m + 1) / 2;
    for (std::size_t i = 0; i + half < m; ++i) terms[i] += terms[i + half];
    m = half;
  }
  return terms[0];
}

}  // namespace riesz
