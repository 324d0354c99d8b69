#pragma once

#include <memory>
#include <optional>

#include "macdp/belief.hpp"
#include "macdp/channel_model.hpp"
#include "macdp/mdp.hpp"
#include "macdp/recursion_mode.hpp"

namespace macdp {

/// Information state (N_t, xi_t) of the single-device problem with xi_t
/// restricted to its reachable set {q_{s,m}}.
struct CentralizedInfoState {
  int n = 0;
  ChannelIndex channel;
  bool operator==(const CentralizedInfoState&) const = default;
};

inline constexpr ActionId kStayIdle = 0;
inline constexpr ActionId kTransmit = 1;

/// Builds the single-device MDP over {0,1} x {(s,m) : 1 <= m <= cap_m}.
/// Arrivals use params.p1. Throws ValidationError on bad params or cap < 2.
CountableMdp build_centralized_mdp(const ModelParams& params, int cap_m, RecursionMode mode);

/// State enumeration of build_centralized_mdp: id = (2n + s) * cap_m + m - 1.
class CentralizedLayout {
 public:
  explicit CentralizedLayout(int cap_m) : cap_m_(cap_m) {}
  int cap_m() const { return cap_m_; }
  std::size_t size() const { return 4u * static_cast<std::size_t>(cap_m_); }
  StateId id(int n, ChannelIndex ch) const {
    return static_cast<StateId>((2 * n + ch.s) * cap_m_ + ch.m - 1);
  }
  CentralizedInfoState state(StateId id) const {
    const int m = static_cast<int>(id % cap_m_) + 1;
    const int ns = static_cast<int>(id / cap_m_);
    return {ns / 2, {ns % 2, m}};
  }

 private:
  int cap_m_;
};

/// k_s = min{m : transmit at (1, q_{s,m})}; empty when no such m exists
/// within the cap (reported as ">= cap").
struct Thresholds {
  std::optional<int> k0;
  std::optional<int> k1;
  bool operator==(const Thresholds&) const = default;
};

Thresholds thresholds_of(const CentralizedLayout& layout, const PolicyTable& policy);

struct CentralizedSolution {
  ModelParams params;
  RecursionMode mode = RecursionMode::kBayesConsistent;
  CentralizedLayout layout{2};
  SolveResult vi;
  PolicyTable policy;
  Thresholds thresholds;

  /// Expected discounted reward from the synchronization point (buffer
  /// empty, S_0 ~ stationary and revealed):
  ///   beta * sum_s pi_s [(1 - p) V(0, q_{s,1}) + p V(1, q_{s,1})].
  double initial_value() const;
};

CentralizedSolution solve_centralized(const ModelParams& params, int cap_m = 60,
                                      RecursionMode mode = RecursionMode::kBayesConsistent,
                                      double tol = 1e-10);

/// Online single-device strategy: keeps the (s, m) index from feedback and
/// looks the action up in `policy`. Never transmits from an empty buffer.
std::unique_ptr<Controller> make_centralized_controller(const CentralizedLayout& layout,
                                                        PolicyTable policy);

}  // namespace macdp
