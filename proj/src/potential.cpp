#include "mdpf/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mdpf/errors.hpp"

namespace mdpf {

void Exp6Params::validate() const {
  if (!(A > 0.0) || !(B > 0.0) || !(C > 0.0)) {
    throw ConfigError("Exp-6 parameters A, B, C must be positive");
  }
  if (!(r_cut > 0.0)) {
    throw ConfigError("Exp-6 cutoff radius must be positive");
  }
}

PairTerms exp6_eval(double r, const Exp6Params& p) {
  if (!(r > 0.0)) {
    throw std::domain_error("exp6_eval: non-positive distance " + std::to_string(r));
  }
  const double rep = p.A * std::exp(-p.B * r);
  const double inv2 = 1.0 / (r * r);
  const double inv6 = inv2 * inv2 * inv2;
  const double disp = p.C * inv6;
  PairTerms t;
  t.value = rep - disp;
  t.d1 = -p.B * rep + 6.0 * disp / r;
  t.d2 = p.B * p.B * rep - 42.0 * disp * inv2;
  return t;
}

ShiftedExp6::ShiftedExp6(const Exp6Params& params, double r_min) : params_(params), r_min_(r_min) {
  params_.validate();
  const PairTerms at_cut = exp6_eval(params_.r_cut, params_);
  shift_value_ = at_cut.value;
  shift_slope_ = at_cut.d1;
}

PairTerms ShiftedExp6::operator()(double r) const {
  if (r >= params_.r_cut) return {};
  PairTerms t = exp6_eval(r, params_);
  t.value -= shift_value_ + (r - params_.r_cut) * shift_slope_;
  t.d1 -= shift_slope_;
  return t;
}

PotentialTable PotentialTable::build(const Exp6Params& params, double r_min, std::size_t n_nodes) {
  params.validate();
  if (n_nodes < 2) {
    throw ConfigError("potential table needs at least 2 nodes");
  }
  if (!(r_min > 0.0) || !(r_min < params.r_cut)) {
    throw ConfigError("potential table requires 0 < r_min < r_cut (r_min=" + std::to_string(r_min) +
                      ", r_cut=" + std::to_string(params.r_cut) + ")");
  }
  PotentialTable t;
  t.params_ = params;
  t.r_min_ = r_min;
  t.r_cut_ = params.r_cut;
  t.spacing_ = (params.r_cut - r_min) / static_cast<double>(n_nodes - 1);
  t.inv_spacing_ = 1.0 / t.spacing_;
  t.value_.resize(n_nodes);
  t.d1_.resize(n_nodes);
  t.d2_.resize(n_nodes);

  const ShiftedExp6 shifted(params, r_min);
  for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
    const PairTerms v = shifted(t.node_position(k));
    t.value_[k] = v.value;
    t.d1_[k] = v.d1;
    t.d2_[k] = v.d2;
  }
  t.value_.back() = 0.0;
  t.d1_.back() = 0.0;
  t.d2_.back() = exp6_eval(params.r_cut, params).d2;
  return t;
}

PairTerms PotentialTable::operator()(double r) const {
  if (r >= r_cut_) return {};
  if (r < r_min_) {
    throw std::out_of_range("potential table evaluated at r=" + std::to_string(r) +
                            " below r_min=" + std::to_string(r_min_));
  }
  const double s = (r - r_min_) * inv_spacing_;
  std::size_t k = static_cast<std::size_t>(s);
  if (k + 1 >= value_.size()) k = value_.size() - 2;
  const double t = s - static_cast<double>(k);
  const double u = 1.0 - t;
  return {u * value_[k] + t * value_[k + 1], u * d1_[k] + t * d1_[k + 1],
          u * d2_[k] + t * d2_[k + 1]};
}

}  // namespace mdpf
