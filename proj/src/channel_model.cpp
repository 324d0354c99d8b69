#include "macdp/channel_model.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "macdp/errors.hpp"
#include "rollout.hpp"

namespace macdp {

namespace {

bool open_unit(double x) { return x > 0.0 && x < 1.0; }

void check_binary(int v, const char* name) {
  if (v != 0 && v != 1) throw ContractViolation(std::string(name) + " must be 0 or 1");
}

}  // namespace

void ModelParams::validate() const {
  if (!open_unit(p1)) throw ValidationError("p1 must lie in (0,1)");
  if (!open_unit(p2)) throw ValidationError("p2 must lie in (0,1)");
  if (!open_unit(alpha0)) throw ValidationError("alpha0 must lie in (0,1)");
  if (!open_unit(alpha1)) throw ValidationError("alpha1 must lie in (0,1)");
  if (!(c >= 0.0)) throw ValidationError("c must be non-negative");
  if (!(r >= 0.0)) throw ValidationError("r must be non-negative");
  if (!open_unit(beta)) throw ValidationError("beta must lie in (0,1)");
}

double ModelParams::arrival(int device) const {
  if (device == 1) return p1;
  if (device == 2) return p2;
  throw ValidationError("device must be 1 or 2");
}

const char* to_token(Feedback h) {
  switch (h) {
    case Feedback::kIdle: return "0";
    case Feedback::kBusy: return "1";
    case Feedback::kNone: return "E";
  }
  return "?";
}

StepOutcome step_two_device(const ModelParams& params, const SystemState& x, int u1, int u2,
                            const StepNoise& noise) {
  check_binary(x.n1, "n1");
  check_binary(x.n2, "n2");
  check_binary(x.s, "s");
  check_binary(u1, "u1");
  check_binary(u2, "u2");
  if (u1 > x.n1) throw ContractViolation("device 1 transmits from an empty buffer");
  if (u2 > x.n2) throw ContractViolation("device 2 transmits from an empty buffer");

  const int idle = 1 - x.s;
  StepOutcome out;
  out.next.n1 = std::min(x.n1 - u1 * (1 - u2) * idle + noise.w1, 1);
  out.next.n2 = std::min(x.n2 - u2 * (1 - u1) * idle + noise.w2, 1);
  out.next.s = noise.channel_draw < params.busy_after(x.s) ? 1 : 0;
  out.reward = -(u1 + u2) * params.c + ((u1 ^ u2) * idle) * params.r;
  out.feedback = (u1 + u2 > 0) ? observed(x.s) : Feedback::kNone;
  return out;
}

SingleStepOutcome step_one_device(const ModelParams& params, const SingleDeviceState& x, int u,
                                  const StepNoise& noise) {
  StepNoise n = noise;
  n.w2 = 0;
  const auto out = step_two_device(params, {x.n, 0, x.s}, u, 0, n);
  return {{out.next.n1, out.next.s}, out.reward, out.feedback};
}

std::vector<TrajectoryStep> sample_trajectory(const ModelParams& params, Controller& controller,
                                              int horizon, std::uint64_t seed, SystemSize size) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  std::vector<TrajectoryStep> traj;
  traj.reserve(static_cast<std::size_t>(horizon));
  CounterRng rng(seed);
  detail::rollout(params, controller, horizon, rng, size,
                  [&](int t, const SystemState& x, const std::array<int, 2>& u, const StepOutcome& out) {
                    traj.push_back({t, x, u, out.reward, out.feedback});
                  });
  return traj;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryStep>& trajectory) {
  os << "t,n1,n2,s,u1,u2,reward,feedback\n";
  for (const auto& st : trajectory) {
    os << st.t << ',' << st.state.n1 << ',' << st.state.n2 << ',' << st.state.s << ','
       << st.actions[0] << ',' << st.actions[1] << ',' << st.reward << ',' << to_token(st.feedback)
       << '\n';
  }
}

}  // namespace macdp
