#include "macdp/centralized.hpp"

#include <vector>

#include "macdp/errors.hpp"

namespace macdp {

CountableMdp build_centralized_mdp(const ModelParams& params, int cap_m, RecursionMode mode) {
  params.validate();
  if (cap_m < 2) throw ValidationError("channel cap must be at least 2");
  const CentralizedLayout layout(cap_m);
  const double p = params.p1;

  std::vector<double> q(2 * cap_m);
  for (int s = 0; s < 2; ++s) {
    for (int m = 1; m <= cap_m; ++m) q[s * cap_m + m - 1] = q_value(params, {s, m});
  }

  MdpBuilder b;
  b.reserve(layout.size(), 6 * cap_m, 16 * cap_m);
  for (StateId id = 0; id < layout.size(); ++id) {
    b.add_state();
    const auto [n, ch] = layout.state(id);
    const ChannelIndex later = aged(ch, cap_m);
    if (n == 0) {
      b.add_action(kStayIdle);
      b.add_transition(1.0 - p, layout.id(0, later));
      b.add_transition(p, layout.id(1, later));
      continue;
    }
    b.add_action(kStayIdle);
    b.add_transition(1.0, layout.id(1, later));

    const double busy = q[ch.s * cap_m + ch.m - 1];
    const double idle = 1.0 - busy;
    const double win = params.r - params.c;
    const double lose = -params.c;
    b.add_action(kTransmit);
    b.add_transition((1.0 - p) * idle, layout.id(0, {0, 1}), win);
    if (mode == RecursionMode::kAsPrinted) {
      b.add_transition(p * idle, layout.id(1, later), win);
      b.add_transition(busy, layout.id(1, later), lose);
    } else {
      b.add_transition(p * idle, layout.id(1, {0, 1}), win);
      b.add_transition(busy, layout.id(1, {1, 1}), lose);
    }
  }
  return std::move(b).build(params.beta);
}

Thresholds thresholds_of(const CentralizedLayout& layout, const PolicyTable& policy) {
  Thresholds th;
  for (int s = 0; s < 2; ++s) {
    std::optional<int>& k = s == 0 ? th.k0 : th.k1;
    for (int m = 1; m <= layout.cap_m(); ++m) {
      if (policy[layout.id(1, {s, m})] == kTransmit) {
        k = m;
        break;
      }
    }
  }
  return th;
}

double CentralizedSolution::initial_value() const {
  const double pi1 = params.stationary_busy();
  const double p = params.p1;
  double v = 0.0;
  for (int s = 0; s < 2; ++s) {
    const double w = s ? pi1 : 1.0 - pi1;
    v += w * ((1.0 - p) * vi.values[layout.id(0, {s, 1})] + p * vi.values[layout.id(1, {s, 1})]);
  }
  return params.beta * v;
}

CentralizedSolution solve_centralized(const ModelParams& params, int cap_m, RecursionMode mode, double tol) {
  CentralizedSolution sol;
  sol.params = params;
  sol.mode = mode;
  sol.layout = CentralizedLayout(cap_m);
  const auto mdp = build_centralized_mdp(params, cap_m, mode);
  SolveOptions opts;
  opts.tol = tol;
  sol.vi = value_iteration(mdp, opts);
  sol.policy = extract_policy(mdp, sol.vi.values);
  sol.thresholds = thresholds_of(sol.layout, sol.policy);
  return sol;
}

namespace {

class CentralizedController final : public Controller {
 public:
  CentralizedController(const CentralizedLayout& layout, PolicyTable policy)
      : layout_(layout), policy_(std::move(policy)) {}

  void reset(int initial_channel) override {
    started_ = false;
    channel_ = {initial_channel, 1};
  }

  std::array<int, 2> act(const std::array<int, 2>& n) override {
    if (n[0] == 0 || !started_) return {0, 0};
    return {policy_[layout_.id(1, channel_)] == kTransmit ? 1 : 0, 0};
  }

  void observe(const std::array<int, 2>& u, Feedback h) override {
    if (u[0] == 1) {
      channel_ = {h == Feedback::kBusy ? 1 : 0, 1};
    } else if (started_) {
      channel_ = aged(channel_, layout_.cap_m());
    }
    // Before the first step channel_ already holds (S_0, 1).
    started_ = true;
  }

 private:
  CentralizedLayout layout_;
  PolicyTable policy_;
  bool started_ = false;
  ChannelIndex channel_;
};

}  // namespace

std::unique_ptr<Controller> make_centralized_controller(const CentralizedLayout& layout, PolicyTable policy) {
  if (policy.size() != layout.size()) throw ValidationError("policy does not match layout");
  return std::make_unique<CentralizedController>(layout, std::move(policy));
}

}  // namespace macdp
