#pragma once

#include <string>

#include "macdp/channel_model.hpp"
#include "macdp/errors.hpp"
#include "macdp/rng.hpp"

namespace macdp::detail {

// Shared episode loop of sample_trajectory and the Monte Carlo harness.
// `visit(t, state, actions, outcome)` is called once per step.
template <typename Visit>
void rollout(const ModelParams& params, Controller& controller, int horizon, CounterRng& rng,
             SystemSize size, Visit&& visit) {
  SystemState x;
  x.s = rng.bernoulli(params.stationary_busy()) ? 1 : 0;
  controller.reset(x.s);
  const bool two = size == SystemSize::kTwoDevices;
  for (int t = 0; t < horizon; ++t) {
    const auto u = controller.act({x.n1, x.n2});
    if (!two && u[1] != 0) {
      throw ContractViolation("step " + std::to_string(t) + ": device 2 acted in a one-device system");
    }
    StepNoise noise;
    noise.w1 = rng.bernoulli(params.p1) ? 1 : 0;
    noise.w2 = rng.bernoulli(params.p2) ? 1 : 0;
    noise.channel_draw = rng.uniform();
    if (!two) noise.w2 = 0;
    StepOutcome out;
    try {
      out = step_two_device(params, x, u[0], u[1], noise);
    } catch (const ContractViolation& e) {
      throw ContractViolation("step " + std::to_string(t) + ": " + e.what());
    }
    visit(t, x, u, out);
    controller.observe(u, out.feedback);
    x = out.next;
  }
}

}  // namespace macdp::detail
