#pragma once

#include <cstdint>
#include <vector>

#include "rrgen/params.hpp"

namespace rrgen {

// Adam with bias correction. Moment arrays are zero at step_count == 0 and
// stay aligned with the parameter set they were built from.
class AdamState {
 public:
  explicit AdamState(const ParamSet& params, double learning_rate = 1e-3,
                     double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  std::int64_t step_count() const { return step_count_; }
  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr) { learning_rate_ = lr; }

 private:
  std::int64_t step_count_ = 0;
  double learning_rate_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;

  friend void adam_step(ParamSet& params, AdamState& state);
};

// One Adam update over every parameter. Every parameter must carry a
// gradient (ContractError naming the first one that does not); gradients are
// left untouched for the caller to zero.
void adam_step(ParamSet& params, AdamState& state);

}  // namespace rrgen
