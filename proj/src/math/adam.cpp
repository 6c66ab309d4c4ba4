#include "anet/math/adam.hpp"

#include <cmath>

namespace anet::math {

AdamState::AdamState(std::span<ParamBlock* const> params, double lr) : learning_rate(lr) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const ParamBlock* p : params) {
    first_moment.emplace_back(p->size(), 0.0);
    second_moment.emplace_back(p->size(), 0.0);
  }
}

void adam_step(std::span<ParamBlock* const> params, AdamState& state) {
  require(state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          "adam_step: accumulator count does not match parameter block count");
  for (std::size_t b = 0; b < params.size(); ++b) {
    ParamBlock& p = *params[b];
    require(state.first_moment[b].size() == p.size() && state.second_moment[b].size() == p.size(),
            "adam_step: accumulator shape mismatch for block " + p.name);
    if (!all_finite(p.grad)) {
      throw TrainError("adam_step: non-finite gradient in block " + p.name);
    }
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);

  for (std::size_t b = 0; b < params.size(); ++b) {
    ParamBlock& p = *params[b];
    Vec& m = state.first_moment[b];
    Vec& v = state.second_moment[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p.value[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    if (!all_finite(p.value)) {
      throw TrainError("adam_step: non-finite parameter after update in block " + p.name);
    }
  }
}

double l1_penalty(std::span<ParamBlock* const> params, double coefficient) {
  require(coefficient >= 0.0, "l1_penalty: coefficient must be >= 0");
  double penalty = 0.0;
  if (coefficient == 0.0) return 0.0;
  for (ParamBlock* p : params) {
    if (!p->regularize) continue;
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double w = p->value[i];
      penalty += std::abs(w);
      if (w > 0.0) {
        p->grad[i] += coefficient;
      } else if (w < 0.0) {
        p->grad[i] -= coefficient;
      }
    }
  }
  return coefficient * penalty;
}

}  // namespace anet::math
