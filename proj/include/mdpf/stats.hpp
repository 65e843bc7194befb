#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mdpf {

/// Streaming weighted mean and variance of a fixed-length vector of values,
/// one independent accumulator per component (West's weighted update).
/// The variance is the unbiased reliability-weight estimate
/// M2 / (W - W2 / W), which reduces to the usual sample variance for equal
/// weights and is zero after a single sample.
class WeightedStats {
 public:
  WeightedStats() = default;
  explicit WeightedStats(std::size_t size) : mean_(size, 0.0), m2_(size, 0.0) {}

  std::size_t size() const { return mean_.size(); }
  std::size_t count() const { return count_; }
  double weight_sum() const { return weight_; }

  /// Throws std::invalid_argument for a non-positive weight or size mismatch.
  void add(std::span<const double> sample, double weight = 1.0);
  /// Combines with another accumulator as if its samples had been added here.
  void merge(const WeightedStats& other);

  const std::vector<double>& mean() const { return mean_; }
  std::vector<double> variance() const;

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  double weight_ = 0.0;
  double weight2_ = 0.0;
  std::size_t count_ = 0;
};

/// Kahan-compensated running sum of a vector.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(std::size_t size) : sum_(size, 0.0), carry_(size, 0.0) {}

  void add(std::span<const double> values, double scale = 1.0);
  const std::vector<double>& sum() const { return sum_; }
  std::size_t size() const { return sum_.size(); }

 private:
  std::vector<double> sum_;
  std::vector<double> carry_;
};

}  // namespace mdpf
