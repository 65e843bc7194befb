#include "mdpf/stats.hpp"

#include <stdexcept>

namespace mdpf {

void WeightedStats::add(std::span<const double> sample, double weight) {
  if (!(weight > 0.0)) throw std::invalid_argument("WeightedStats: weight must be positive");
  if (sample.size() != mean_.size()) throw std::invalid_argument("WeightedStats: size mismatch");
  const double w_new = weight_ + weight;
  const double ratio = weight / w_new;
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    const double delta = sample[k] - mean_[k];
    const double r = delta * ratio;
    mean_[k] += r;
    m2_[k] += weight_ * delta * r;
  }
  weight_ = w_new;
  weight2_ += weight * weight;
  ++count_;
}

void WeightedStats::merge(const WeightedStats& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.size() != size()) throw std::invalid_argument("WeightedStats: size mismatch");
  const double w = weight_ + other.weight_;
  for (std::size_t k = 0; k < mean_.size(); ++k) {
    const double delta = other.mean_[k] - mean_[k];
    mean_[k] += delta * other.weight_ / w;
    m2_[k] += other.m2_[k] + delta * delta * weight_ * other.weight_ / w;
  }
  weight_ = w;
  weight2_ += other.weight2_;
  count_ += other.count_;
}

std::vector<double> WeightedStats::variance() const {
  std::vector<double> v(mean_.size(), 0.0);
  if (count_ < 2) return v;
  const double denom = weight_ - weight2_ / weight_;
  if (!(denom > 0.0)) return v;
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = m2_[k] > 0.0 ? m2_[k] / denom : 0.0;
  return v;
}

void CompensatedSum::add(std::span<const double> values, double scale) {
  if (values.size() != sum_.size()) throw std::invalid_argument("CompensatedSum: size mismatch");
  for (std::size_t k = 0; k < sum_.size(); ++k) {
    const double y = values[k] * scale - carry_[k];
    const double t = sum_[k] + y;
    carry_[k] = (t - sum_[k]) - y;
    sum_[k] = t;
  }
}

}  // namespace mdpf
