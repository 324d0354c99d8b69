#include "macdp/belief.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "macdp/errors.hpp"
#include "compensated_sum.hpp"

namespace macdp {

double q_value(const ModelParams& params, ChannelIndex idx) {
  if (idx.m < 1 || (idx.s != 0 && idx.s != 1)) throw ValidationError("invalid channel index");
  double q = params.busy_after(idx.s);
  for (int i = 1; i < idx.m; ++i) q = q * params.alpha1 + (1.0 - q) * (1.0 - params.alpha0);
  return q;
}

double z_value(double arrival, BufferIndex idx) {
  if (idx.is_infinite()) return 1.0;
  if (idx.k() < 1) throw ValidationError("buffer index must be >= 1");
  double z = arrival;
  for (int i = 1; i < idx.k(); ++i) z = z + (1.0 - z) * arrival;
  return z;
}

double z_value(const ModelParams& params, int device, BufferIndex idx) {
  return z_value(params.arrival(device), idx);
}

ChannelIndex aged(ChannelIndex idx, int cap) { return {idx.s, std::min(idx.m + 1, cap)}; }

BufferIndex aged(BufferIndex idx, int cap) {
  if (idx.is_infinite()) return idx;
  return BufferIndex::finite(std::min(idx.k() + 1, cap));
}

// ---------------------------------------------------------------------------

void IndexTracker::reset(std::optional<int> revealed_channel) {
  started_ = false;
  exact_channel_ = revealed_channel;
  k_ = l_ = BufferIndex::finite(1);
  channel_.reset();
}

void IndexTracker::update(Prescription d, const std::array<int, 2>& u, Feedback h) {
  const bool any = u[0] + u[1] > 0;
  if (any == (h == Feedback::kNone)) {
    throw ContractViolation(any ? "transmission without channel feedback"
                                : "channel feedback without transmission");
  }
  BufferIndex next[2];
  for (int i = 0; i < 2; ++i) {
    const int di = d[i + 1];
    const BufferIndex cur = i == 0 ? k_ : l_;
    const std::string dev = "device " + std::to_string(i + 1);
    if (u[i] < 0 || u[i] > 1 || u[i] > di) throw ContractViolation(dev + " acted against its prescription");
    if (u[i] == 1) {
      if (!started_) throw ContractViolation(dev + " transmitted from a known-empty buffer");
      const bool success = h == Feedback::kIdle && u[1 - i] == 0;
      next[i] = success ? BufferIndex::finite(1) : BufferIndex::infinity();
    } else if (di == 1) {
      if (started_ && cur.is_infinite()) throw ContractViolation(dev + " stayed silent with a full buffer");
      next[i] = BufferIndex::finite(1);
    } else {
      next[i] = started_ ? aged(cur, cap_k_) : BufferIndex::finite(1);
    }
  }
  k_ = next[0];
  l_ = next[1];

  if (any) {
    channel_ = ChannelIndex{h == Feedback::kBusy ? 1 : 0, 1};
  } else if (channel_) {
    channel_ = aged(*channel_, cap_m_);
  } else if (!started_ && exact_channel_) {
    channel_ = ChannelIndex{*exact_channel_, 1};
  }
  started_ = true;
}

std::optional<CommonIndex> IndexTracker::index() const {
  if (!started_ || !channel_) return std::nullopt;
  return CommonIndex{k_, l_, *channel_};
}

double IndexTracker::buffer_belief(const ModelParams& params, int device) const {
  if (!started_) return 0.0;
  return z_value(params, device, buffer(device));
}

double IndexTracker::channel_belief(const ModelParams& params) const {
  if (channel_) return q_value(params, *channel_);
  if (!started_ && exact_channel_) return *exact_channel_;
  return params.stationary_busy();
}

// ---------------------------------------------------------------------------

std::vector<HistoryStep> history_alphabet() {
  std::vector<HistoryStep> out;
  for (int d1 = 0; d1 <= 1; ++d1) {
    for (int d2 = 0; d2 <= 1; ++d2) {
      for (int u1 = 0; u1 <= d1; ++u1) {
        for (int u2 = 0; u2 <= d2; ++u2) {
          if (u1 + u2 == 0) {
            out.push_back({{d1, d2}, {0, 0}, Feedback::kNone});
          } else {
            out.push_back({{d1, d2}, {u1, u2}, Feedback::kIdle});
            out.push_back({{d1, d2}, {u1, u2}, Feedback::kBusy});
          }
        }
      }
    }
  }
  return out;
}

double JointPosterior::buffer_marginal(int device) const {
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const int n = device == 1 ? (i >> 2) & 1 : (i >> 1) & 1;
    if (n) acc += p[i];
  }
  return acc;
}

double JointPosterior::busy_marginal() const {
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    if (i & 1) acc += p[i];
  }
  return acc;
}

namespace {

// Likelihood of the public step given the hidden state: 1 if consistent.
bool consistent(const HistoryStep& st, int n1, int n2, int s) {
  if (st.u[0] != n1 * st.d.d1 || st.u[1] != n2 * st.d.d2) return false;
  const Feedback expect = st.u[0] + st.u[1] > 0 ? observed(s) : Feedback::kNone;
  return st.h == expect;
}

// P(w1, w2) under the coupling.
double arrival_prob(const ModelParams& params, ArrivalCoupling coupling, int w1, int w2) {
  if (coupling == ArrivalCoupling::kShared) {
    if (w1 != w2) return 0.0;
    return w1 ? params.p1 : 1.0 - params.p1;
  }
  return (w1 ? params.p1 : 1.0 - params.p1) * (w2 ? params.p2 : 1.0 - params.p2);
}

int next_buffer(int n, int u, int u_other, int s, int w) {
  return std::min(n - u * (1 - u_other) * (1 - s) + w, 1);
}

double channel_prob(const ModelParams& params, int s, int s_next) {
  const double busy = params.busy_after(s);
  return s_next ? busy : 1.0 - busy;
}

}  // namespace

JointPosterior bayes_oracle(const ModelParams& params, std::span<const HistoryStep> history,
                            const OraclePrior& prior) {
  std::array<detail::CompensatedSum, 8> mass;
  detail::CompensatedSum total;

  // Depth-first over hidden trajectories; `weight` is the probability of the
  // hidden prefix, which is discarded as soon as it contradicts the history.
  std::function<void(std::size_t, int, int, int, double)> walk = [&](std::size_t t, int n1, int n2, int s,
                                                                     double weight) {
    if (weight == 0.0) return;
    if (t == history.size()) {
      mass[(n1 << 2) | (n2 << 1) | s].add(weight);
      total.add(weight);
      return;
    }
    const HistoryStep& st = history[t];
    if (!consistent(st, n1, n2, s)) return;
    for (int w1 = 0; w1 <= 1; ++w1) {
      for (int w2 = 0; w2 <= 1; ++w2) {
        const double pw = arrival_prob(params, prior.coupling, w1, w2);
        const int m1 = next_buffer(n1, st.u[0], st.u[1], s, w1);
        const int m2 = next_buffer(n2, st.u[1], st.u[0], s, w2);
        for (int s2 = 0; s2 <= 1; ++s2) walk(t + 1, m1, m2, s2, weight * pw * channel_prob(params, s, s2));
      }
    }
  };

  if (prior.revealed_channel) {
    walk(0, 0, 0, *prior.revealed_channel, 1.0);
  } else {
    const double pi1 = params.stationary_busy();
    walk(0, 0, 0, 0, 1.0 - pi1);
    walk(0, 0, 0, 1, pi1);
  }
  if (total.value() <= 0.0) throw ValidationError("history has zero probability");
  JointPosterior post;
  for (int i = 0; i < 8; ++i) post.p[i] = mass[i].value() / total.value();
  return post;
}

JointBeliefFilter::JointBeliefFilter(const ModelParams& params, const OraclePrior& prior)
    : params_(params), coupling_(prior.coupling) {
  if (prior.revealed_channel) {
    post_.p[*prior.revealed_channel] = 1.0;
  } else {
    post_.p[0] = 1.0 - params.stationary_busy();
    post_.p[1] = params.stationary_busy();
  }
}

bool JointBeliefFilter::update(const HistoryStep& st) {
  JointPosterior next;
  double total = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double w = post_.p[i];
    if (w == 0.0) continue;
    const int n1 = (i >> 2) & 1, n2 = (i >> 1) & 1, s = i & 1;
    if (!consistent(st, n1, n2, s)) continue;
    for (int w1 = 0; w1 <= 1; ++w1) {
      for (int w2 = 0; w2 <= 1; ++w2) {
        const double pw = arrival_prob(params_, coupling_, w1, w2);
        if (pw == 0.0) continue;
        const int m1 = next_buffer(n1, st.u[0], st.u[1], s, w1);
        const int m2 = next_buffer(n2, st.u[1], st.u[0], s, w2);
        for (int s2 = 0; s2 <= 1; ++s2) {
          const double v = w * pw * channel_prob(params_, s, s2);
          next.p[(m1 << 2) | (m2 << 1) | s2] += v;
          total += v;
        }
      }
    }
  }
  if (total <= 0.0) return false;
  for (auto& v : next.p) v /= total;
  post_ = next;
  return true;
}

IndependenceReport check_conditional_independence(const ModelParams& params, int horizon,
                                                  ArrivalCoupling coupling) {
  if (horizon < 0) throw ValidationError("horizon must be non-negative");
  const auto alphabet = history_alphabet();
  IndependenceReport rep;

  std::function<void(const JointBeliefFilter&, int)> walk = [&](const JointBeliefFilter& f, int depth) {
    const auto& post = f.posterior();
    const double m1 = post.buffer_marginal(1);
    const double m2 = post.buffer_marginal(2);
    for (int a = 0; a <= 1; ++a) {
      for (int b = 0; b <= 1; ++b) {
        const double pa = a ? m1 : 1.0 - m1;
        const double pb = b ? m2 : 1.0 - m2;
        rep.max_gap = std::max(rep.max_gap, std::abs(post.buffers(a, b) - pa * pb));
      }
    }
    ++rep.histories;
    if (depth >= horizon) return;
    for (const auto& st : alphabet) {
      JointBeliefFilter child = f;
      if (child.update(st)) walk(child, depth + 1);
    }
  };
  walk(JointBeliefFilter(params, {std::nullopt, coupling}), 0);
  return rep;
}

BeliefAudit audit_index_beliefs(const ModelParams& params, int max_length, std::optional<int> revealed_channel) {
  if (max_length < 0) throw ValidationError("history length must be non-negative");
  const auto alphabet = history_alphabet();
  // Caps beyond reach so that no index saturates.
  const int cap = max_length + 2;
  BeliefAudit rep;

  std::function<void(const IndexTracker&, const JointBeliefFilter&, int)> walk =
      [&](const IndexTracker& tr, const JointBeliefFilter& f, int depth) {
        const auto& post = f.posterior();
        for (int i = 1; i <= 2; ++i) {
          rep.max_buffer_gap = std::max(rep.max_buffer_gap, std::abs(tr.buffer_belief(params, i) - post.buffer_marginal(i)));
        }
        rep.max_channel_gap = std::max(rep.max_channel_gap, std::abs(tr.channel_belief(params) - post.busy_marginal()));
        ++rep.histories;
        if (depth >= max_length) return;
        for (const auto& st : alphabet) {
          JointBeliefFilter child = f;
          if (!child.update(st)) continue;
          IndexTracker next = tr;
          try {
            next.update(st.d, st.u, st.h);
          } catch (const ContractViolation&) {
            ++rep.rejected;
            continue;
          }
          walk(next, child, depth + 1);
        }
      };
  IndexTracker root(cap, cap);
  root.reset(revealed_channel);
  walk(root, JointBeliefFilter(params, {revealed_channel, ArrivalCoupling::kIndependent}), 0);
  return rep;
}

}  // namespace macdp
