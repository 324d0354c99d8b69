#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace macdp {

/// Scalar constants of the multiple-access scheduling model.
///
/// The channel is a two-state Markov chain (0 = idle, 1 = busy) with
/// self-transition probabilities alpha0 (idle -> idle) and alpha1
/// (busy -> busy). Device i sees Bernoulli(p_i) packet arrivals.
struct ModelParams {
  double p1 = 0.3;
  double p2 = 0.3;
  double alpha0 = 0.75;
  double alpha1 = 0.75;
  double c = 0.3;
  double r = 1.0;
  double beta = 0.9;

  /// Throws ValidationError unless p_i, alpha_s, beta lie in (0,1) and
  /// c, r >= 0.
  void validate() const;

  /// Arrival probability of device 1 or 2.
  double arrival(int device) const;
  /// P(S_{t+1} = 1 | S_t = s).
  double busy_after(int s) const { return s == 0 ? 1.0 - alpha0 : alpha1; }
  /// Stationary probability that the channel is busy.
  double stationary_busy() const { return (1.0 - alpha0) / (2.0 - alpha0 - alpha1); }

  bool operator==(const ModelParams&) const = default;
};

/// Channel feedback H_t: the previous channel state if anybody transmitted.
enum class Feedback : std::uint8_t { kIdle = 0, kBusy = 1, kNone = 2 };

inline Feedback observed(int s) { return s ? Feedback::kBusy : Feedback::kIdle; }
/// CSV/JSON token: "0", "1" or "E".
const char* to_token(Feedback h);

struct SystemState {
  int n1 = 0;
  int n2 = 0;
  int s = 0;
  bool operator==(const SystemState&) const = default;
};

/// Exogenous randomness of one step: the two arrival outcomes and a uniform
/// draw that selects the next channel state from row s of the transition
/// matrix (busy iff channel_draw < P(s -> 1)).
struct StepNoise {
  int w1 = 0;
  int w2 = 0;
  double channel_draw = 0.5;
};

struct StepOutcome {
  SystemState next;
  double reward = 0.0;
  Feedback feedback = Feedback::kNone;
};

/// Two-device dynamics. Throws ContractViolation if a device transmits from
/// an empty buffer.
StepOutcome step_two_device(const ModelParams& params, const SystemState& state, int u1, int u2,
                            const StepNoise& noise);

struct SingleDeviceState {
  int n = 0;
  int s = 0;
  bool operator==(const SingleDeviceState&) const = default;
};

struct SingleStepOutcome {
  SingleDeviceState next;
  double reward = 0.0;
  Feedback feedback = Feedback::kNone;
};

/// One-device dynamics (noise.w2 is ignored).
SingleStepOutcome step_one_device(const ModelParams& params, const SingleDeviceState& state, int u,
                                  const StepNoise& noise);

/// Online strategy for the whole system. Implementations may hold private
/// per-device state; act() must only use each device's own buffer for that
/// device's action if the strategy is meant to be decentralized.
class Controller {
 public:
  virtual ~Controller() = default;
  /// Start of an episode. Buffers are empty and S_0 = initial_channel has
  /// just been revealed to everybody.
  virtual void reset(int initial_channel) = 0;
  /// Actions (u1, u2) given the current buffers.
  virtual std::array<int, 2> act(const std::array<int, 2>& buffers) = 0;
  /// Public outcome of the step just taken.
  virtual void observe(const std::array<int, 2>& actions, Feedback feedback) = 0;
};

struct TrajectoryStep {
  int t = 0;
  SystemState state;
  std::array<int, 2> actions{};
  double reward = 0.0;
  Feedback feedback = Feedback::kNone;
  bool operator==(const TrajectoryStep&) const = default;
};

/// Number of devices in the simulated system. With one device, device 2 has
/// no arrivals and never transmits.
enum class SystemSize { kOneDevice = 1, kTwoDevices = 2 };

/// Initial condition: buffers empty, S_0 drawn from the stationary
/// distribution and revealed to the controller. Per step, draws are taken in
/// the order w1, w2, channel. Throws ContractViolation naming the step if the
/// controller returns an illegal action.
std::vector<TrajectoryStep> sample_trajectory(const ModelParams& params, Controller& controller,
                                              int horizon, std::uint64_t seed,
                                              SystemSize size = SystemSize::kTwoDevices);

/// CSV dump `t,n1,n2,s,u1,u2,reward,feedback`.
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryStep>& trajectory);

/// Never transmits.
class IdleController final : public Controller {
 public:
  void reset(int) override {}
  std::array<int, 2> act(const std::array<int, 2>&) override { return {0, 0}; }
  void observe(const std::array<int, 2>&, Feedback) override {}
};

/// Transmits whenever a buffer is full.
class GreedyController final : public Controller {
 public:
  void reset(int) override {}
  std::array<int, 2> act(const std::array<int, 2>& n) override { return n; }
  void observe(const std::array<int, 2>&, Feedback) override {}
};

}  // namespace macdp
