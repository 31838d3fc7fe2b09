#include "rrgen/optim.hpp"

#include <cmath>

#include "rrgen/error.hpp"

namespace rrgen {

AdamState::AdamState(const ParamSet& params, double learning_rate, double beta1,
                     double beta2, double epsilon)
    : learning_rate_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  first_moment_.reserve(params.count());
  second_moment_.reserve(params.count());
  for (const auto& [name, tensor] : params.items()) {
    first_moment_.emplace_back(static_cast<std::size_t>(tensor.numel()), 0.0);
    second_moment_.emplace_back(static_cast<std::size_t>(tensor.numel()), 0.0);
  }
}

void adam_step(ParamSet& params, AdamState& state) {
  if (params.count() != state.first_moment_.size()) {
    throw ContractError("adam_step: optimizer state built for a different parameter set");
  }
  for (const auto& [name, tensor] : params.items()) {
    if (tensor.grad() == nullptr) {
      throw ContractError("adam_step: parameter \"" + name + "\" has no gradient");
    }
  }

  state.step_count_ += 1;
  const double t = static_cast<double>(state.step_count_);
  const double correction1 = 1.0 - std::pow(state.beta1_, t);
  const double correction2 = 1.0 - std::pow(state.beta2_, t);

  std::size_t slot = 0;
  for (const auto& [name, tensor] : params.items()) {
    Tensor param = tensor;  // shared storage; updates in place
    const double* grad = param.grad();
    double* value = param.data();
    std::vector<double>& m = state.first_moment_[slot];
    std::vector<double>& v = state.second_moment_[slot];
    const std::int64_t n = param.numel();
    for (std::int64_t i = 0; i < n; ++i) {
      const double g = grad[i];
      m[static_cast<std::size_t>(i)] =
          state.beta1_ * m[static_cast<std::size_t>(i)] + (1.0 - state.beta1_) * g;
      v[static_cast<std::size_t>(i)] =
          state.beta2_ * v[static_cast<std::size_t>(i)] + (1.0 - state.beta2_) * g * g;
      const double m_hat = m[static_cast<std::size_t>(i)] / correction1;
      const double v_hat = v[static_cast<std::size_t>(i)] / correction2;
      value[i] -= state.learning_rate_ * m_hat / (std::sqrt(v_hat) + state.epsilon_);
    }
    ++slot;
  }
}

}  // namespace rrgen
