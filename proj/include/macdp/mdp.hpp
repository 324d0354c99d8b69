#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace macdp {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// One value per enumerated state.
using ValueTable = std::vector<double>;
/// One chosen action id per enumerated state.
using PolicyTable = std::vector<ActionId>;

/// Finite-state, finite-action, stationary discounted MDP stored in
/// compressed-row form.
///
/// States are the integers [0, num_states()). Each state owns a contiguous
/// run of "choices" (one per available action, in strictly increasing action
/// id order); each choice owns a contiguous run of (probability, next state)
/// pairs. Per-transition rewards are folded into one expected reward per
/// choice, which leaves the Bellman operator unchanged:
///   sum_j p_j (r_j + beta v(x_j)) = rbar + beta sum_j p_j v(x_j).
///
/// Instances are immutable once built and can be shared read-only.
class CountableMdp {
 public:
  struct Choice {
    ActionId action;
    double expected_reward;
    std::span<const double> probabilities;
    std::span<const StateId> next;
  };

  std::size_t num_states() const { return state_begin_.size() - 1; }
  std::size_t num_choices() const { return actions_.size(); }
  std::size_t num_transitions() const { return next_.size(); }
  double discount() const { return discount_; }

  /// Available action ids at `s`, ascending.
  std::span<const ActionId> actions(StateId s) const {
    return {actions_.data() + state_begin_[s], actions_.data() + state_begin_[s + 1]};
  }

  /// Global index of the first choice of `s`; choices of `s` occupy
  /// [first_choice(s), first_choice(s + 1)).
  std::size_t first_choice(StateId s) const { return state_begin_[s]; }

  Choice choice(std::size_t c) const {
    const auto b = choice_begin_[c];
    const auto e = choice_begin_[c + 1];
    return {actions_[c], rewards_[c], {probs_.data() + b, probs_.data() + e},
            {next_.data() + b, next_.data() + e}};
  }

  /// rbar + beta * sum p v(next) for global choice index `c`.
  double q_value(std::size_t c, std::span<const double> v) const {
    double acc = 0.0;
    const auto e = choice_begin_[c + 1];
    for (auto j = choice_begin_[c]; j < e; ++j) acc += probs_[j] * v[next_[j]];
    return rewards_[c] + discount_ * acc;
  }

 private:
  friend class MdpBuilder;

  double discount_ = 0.0;
  std::vector<std::uint64_t> state_begin_{0};
  std::vector<ActionId> actions_;
  std::vector<double> rewards_;
  std::vector<std::uint64_t> choice_begin_{0};
  std::vector<double> probs_;
  std::vector<StateId> next_;
};

/// Incremental constructor for CountableMdp. States are appended in id order:
///
///   MdpBuilder b;
///   b.add_state();
///   b.add_action(0);
///   b.add_transition(1.0, 0, 1.0);
///   CountableMdp m = std::move(b).build(0.9);
class MdpBuilder {
 public:
  MdpBuilder() = default;

  void reserve(std::size_t states, std::size_t choices, std::size_t transitions);

  /// Starts the next state and returns its id.
  StateId add_state();
  /// Opens an action on the current state. Ids must increase within a state.
  void add_action(ActionId a);
  /// Adds an outcome to the current action. Zero-probability outcomes are
  /// dropped; rewards are accumulated into the action's expected reward.
  void add_transition(double probability, StateId next, double reward = 0.0);

  /// Validates and freezes. Throws ValidationError naming the first offending
  /// (state, action) if a row sums to something other than one (tolerance
  /// 1e-12), if a successor id is out of range, or if a state has no action.
  /// Rows within tolerance are renormalised exactly.
  CountableMdp build(double discount) &&;

 private:
  CountableMdp m_;
  bool has_state_ = false;
  bool has_action_ = false;
};

inline constexpr double kProbabilityTolerance = 1e-12;

struct BackupResult {
  ValueTable values;
  /// q-value per global choice index (see CountableMdp::first_choice).
  std::vector<double> q;
};

/// One application of the Bellman optimality operator.
BackupResult bellman_backup(const CountableMdp& mdp, std::span<const double> v);

struct SolveOptions {
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  /// Keep every sweep's sup-norm residual (needed for contraction audits).
  bool record_residuals = true;
};

struct SolveResult {
  ValueTable values;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> residuals;
};

/// Plain (Jacobi) value iteration from v = 0. Stops when the sup-norm change
/// of a sweep is <= tol; if max_iter is reached first the result carries
/// converged = false.
SolveResult value_iteration(const CountableMdp& mdp, const SolveOptions& opts = {});

/// Same as above but warm-started from `initial`.
SolveResult value_iteration(const CountableMdp& mdp, ValueTable initial, const SolveOptions& opts);

/// Greedy policy w.r.t. v. Among actions whose q-value is within `tie_tol` of
/// the best, the lowest action id wins.
PolicyTable extract_policy(const CountableMdp& mdp, std::span<const double> v, double tie_tol = 1e-12);

/// Iterates the policy-restricted backup to a fixed point. Throws
/// ValidationError if the policy picks an action the state does not offer.
SolveResult policy_evaluation(const CountableMdp& mdp, std::span<const ActionId> policy,
                              const SolveOptions& opts = {});

/// Backward induction. Element t holds the optimal expected discounted reward
/// with t + 1 decisions left (terminal value 0).
std::vector<ValueTable> finite_horizon_dp(const CountableMdp& mdp, std::size_t horizon);

/// True iff every consecutive pair of residuals satisfies
/// r[n+1] <= beta * r[n] + slack.
bool contraction_holds(std::span<const double> residuals, double beta, double slack = 1e-12);

/// Debug dump, one `state_id,value` row per state.
void write_value_csv(std::ostream& os, std::span<const double> v);

}  // namespace macdp
