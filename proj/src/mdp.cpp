#include "macdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "macdp/errors.hpp"

namespace macdp {

void MdpBuilder::reserve(std::size_t states, std::size_t choices, std::size_t transitions) {
  m_.state_begin_.reserve(states + 1);
  m_.actions_.reserve(choices);
  m_.rewards_.reserve(choices);
  m_.choice_begin_.reserve(choices + 1);
  m_.probs_.reserve(transitions);
  m_.next_.reserve(transitions);
}

StateId MdpBuilder::add_state() {
  if (has_state_) m_.state_begin_.push_back(m_.actions_.size());
  has_state_ = true;
  has_action_ = false;
  return static_cast<StateId>(m_.state_begin_.size() - 1);
}

void MdpBuilder::add_action(ActionId a) {
  if (!has_state_) throw ValidationError("add_action before add_state");
  const auto first = m_.state_begin_.back();
  if (m_.actions_.size() > first && m_.actions_.back() >= a) {
    std::ostringstream msg;
    msg << "state " << m_.state_begin_.size() - 1 << ": action ids must be strictly increasing";
    throw ValidationError(msg.str());
  }
  if (!m_.actions_.empty()) m_.choice_begin_.push_back(m_.probs_.size());
  m_.actions_.push_back(a);
  m_.rewards_.push_back(0.0);
  has_action_ = true;
}

void MdpBuilder::add_transition(double probability, StateId next, double reward) {
  if (!has_action_) throw ValidationError("add_transition before add_action");
  if (!(probability >= 0.0) || probability > 1.0 + kProbabilityTolerance) {
    std::ostringstream msg;
    msg << "state " << m_.state_begin_.size() - 1 << ", action " << m_.actions_.back()
        << ": probability " << probability << " outside [0,1]";
    throw ValidationError(msg.str());
  }
  if (probability == 0.0) return;
  m_.probs_.push_back(probability);
  m_.next_.push_back(next);
  m_.rewards_.back() += probability * reward;
}

CountableMdp MdpBuilder::build(double discount) && {
  if (!(discount > 0.0 && discount < 1.0)) throw ValidationError("discount must lie in (0,1)");
  if (!has_state_) throw ValidationError("MDP has no states");
  m_.state_begin_.push_back(m_.actions_.size());
  if (!m_.actions_.empty()) m_.choice_begin_.push_back(m_.probs_.size());
  m_.discount_ = discount;

  const std::size_t n = m_.num_states();
  for (StateId s = 0; s < n; ++s) {
    if (m_.state_begin_[s] == m_.state_begin_[s + 1]) {
      throw ValidationError("state " + std::to_string(s) + " has no action");
    }
    for (auto c = m_.state_begin_[s]; c < m_.state_begin_[s + 1]; ++c) {
      double sum = 0.0;
      for (auto j = m_.choice_begin_[c]; j < m_.choice_begin_[c + 1]; ++j) {
        if (m_.next_[j] >= n) {
          std::ostringstream msg;
          msg << "state " << s << ", action " << m_.actions_[c] << ": successor " << m_.next_[j]
              << " is not an enumerated state";
          throw ValidationError(msg.str());
        }
        sum += m_.probs_[j];
      }
      if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "state " << s << ", action " << m_.actions_[c] << ": probabilities sum to " << sum;
        throw ValidationError(msg.str());
      }
      if (sum != 1.0) {
        for (auto j = m_.choice_begin_[c]; j < m_.choice_begin_[c + 1]; ++j) m_.probs_[j] /= sum;
        m_.rewards_[c] /= sum;
      }
    }
  }
  has_state_ = has_action_ = false;
  return std::move(m_);
}

BackupResult bellman_backup(const CountableMdp& mdp, std::span<const double> v) {
  if (v.size() != mdp.num_states()) throw ValidationError("value table size does not match MDP");
  BackupResult out;
  out.values.resize(mdp.num_states());
  out.q.resize(mdp.num_choices());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (auto c = mdp.first_choice(s); c < mdp.first_choice(s + 1); ++c) {
      out.q[c] = mdp.q_value(c, v);
      best = std::max(best, out.q[c]);
    }
    out.values[s] = best;
  }
  return out;
}

namespace {

// Runs `sweep(v, next)` until the sup-norm change drops to tol.
template <typename Sweep>
SolveResult iterate(std::size_t n, ValueTable v, const SolveOptions& opts, Sweep&& sweep) {
  if (!(opts.tol > 0.0)) throw ValidationError("tolerance must be positive");
  SolveResult res;
  ValueTable next(n);
  while (res.iterations < opts.max_iter) {
    sweep(v, next);
    double diff = 0.0;
    for (std::size_t s = 0; s < n; ++s) diff = std::max(diff, std::abs(next[s] - v[s]));
    v.swap(next);
    ++res.iterations;
    res.residual = diff;
    if (opts.record_residuals) res.residuals.push_back(diff);
    if (diff <= opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.values = std::move(v);
  return res;
}

}  // namespace

SolveResult value_iteration(const CountableMdp& mdp, const SolveOptions& opts) {
  return value_iteration(mdp, ValueTable(mdp.num_states(), 0.0), opts);
}

SolveResult value_iteration(const CountableMdp& mdp, ValueTable initial, const SolveOptions& opts) {
  if (initial.size() != mdp.num_states()) throw ValidationError("value table size does not match MDP");
  return iterate(mdp.num_states(), std::move(initial), opts, [&](const ValueTable& v, ValueTable& out) {
    for (StateId s = 0; s < mdp.num_states(); ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (auto c = mdp.first_choice(s); c < mdp.first_choice(s + 1); ++c) {
        best = std::max(best, mdp.q_value(c, v));
      }
      out[s] = best;
    }
  });
}

PolicyTable extract_policy(const CountableMdp& mdp, std::span<const double> v, double tie_tol) {
  if (v.size() != mdp.num_states()) throw ValidationError("value table size does not match MDP");
  PolicyTable policy(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    const auto first = mdp.first_choice(s);
    const auto last = mdp.first_choice(s + 1);
    double best = -std::numeric_limits<double>::infinity();
    for (auto c = first; c < last; ++c) best = std::max(best, mdp.q_value(c, v));
    // Actions are stored ascending, so the first one within tolerance is the
    // lowest id.
    for (auto c = first; c < last; ++c) {
      if (mdp.q_value(c, v) >= best - tie_tol) {
        policy[s] = mdp.choice(c).action;
        break;
      }
    }
  }
  return policy;
}

namespace {

std::vector<std::size_t> resolve_policy(const CountableMdp& mdp, std::span<const ActionId> policy) {
  if (policy.size() != mdp.num_states()) throw ValidationError("policy size does not match MDP");
  std::vector<std::size_t> chosen(mdp.num_states());
  for (StateId s = 0; s < mdp.num_states(); ++s) {
    const auto acts = mdp.actions(s);
    const auto it = std::lower_bound(acts.begin(), acts.end(), policy[s]);
    if (it == acts.end() || *it != policy[s]) {
      throw ValidationError("policy picks action " + std::to_string(policy[s]) +
                            " not available at state " + std::to_string(s));
    }
    chosen[s] = mdp.first_choice(s) + static_cast<std::size_t>(it - acts.begin());
  }
  return chosen;
}

}  // namespace

SolveResult policy_evaluation(const CountableMdp& mdp, std::span<const ActionId> policy,
                              const SolveOptions& opts) {
  const auto chosen = resolve_policy(mdp, policy);
  return iterate(mdp.num_states(), ValueTable(mdp.num_states(), 0.0), opts,
                 [&](const ValueTable& v, ValueTable& out) {
                   for (StateId s = 0; s < mdp.num_states(); ++s) out[s] = mdp.q_value(chosen[s], v);
                 });
}

std::vector<ValueTable> finite_horizon_dp(const CountableMdp& mdp, std::size_t horizon) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  std::vector<ValueTable> stages;
  stages.reserve(horizon);
  ValueTable v(mdp.num_states(), 0.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    v = bellman_backup(mdp, v).values;
    stages.push_back(v);
  }
  return stages;
}

bool contraction_holds(std::span<const double> residuals, double beta, double slack) {
  for (std::size_t n = 1; n < residuals.size(); ++n) {
    if (residuals[n] > beta * residuals[n - 1] + slack) return false;
  }
  return true;
}

void write_value_csv(std::ostream& os, std::span<const double> v) {
  const auto old = os.precision(17);
  os << "state_id,value\n";
  for (std::size_t s = 0; s < v.size(); ++s) os << s << ',' << v[s] << '\n';
  os.precision(old);
}

}  // namespace macdp
