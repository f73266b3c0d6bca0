#pragma once

#include <span>
#include <vector>

namespace blackwell {

// Kahan-compensated running sum of d-dimensional vectors. Long horizons
// ( >= 1e6 rounds) must not drift.
class KahanVector {
 public:
  explicit KahanVector(int dim) : sum_(dim, 0.0), comp_(dim, 0.0) {}

  void add(std::span<const double> v) {
    for (size_t i = 0; i < sum_.size(); ++i) {
      const double y = v[i] - comp_[i];
      const double t = sum_[i] + y;
      comp_[i] = (t - sum_[i]) - y;
      sum_[i] = t;
    }
  }

  const std::vector<double>& sum() const { return sum_; }

  std::vector<double> mean(long n) const {
    std::vector<double> out(sum_);
    if (n > 0) {
      for (double& v : out) v /= static_cast<double>(n);
    }
    return out;
  }

  int dim() const { return static_cast<int>(sum_.size()); }

 private:
  std::vector<double> sum_;
  std::vector<double> comp_;
};

}  // namespace blackwell
