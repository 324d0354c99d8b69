#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "macdp/channel_model.hpp"

namespace macdp {

/// Channel posterior q_{s,m} = P(S_m = 1 | S_0 = s): the channel was last seen
/// in state s, m steps ago.
struct ChannelIndex {
  int s = 0;
  int m = 1;
  bool operator==(const ChannelIndex&) const = default;
};

/// Buffer posterior index: finite k means z_k = 1 - (1 - p)^k (k steps since
/// the buffer was last known empty); infinity means the buffer is known full.
class BufferIndex {
 public:
  constexpr BufferIndex() = default;
  static constexpr BufferIndex finite(int k) { return BufferIndex(k); }
  static constexpr BufferIndex infinity() { return BufferIndex(kInf); }

  constexpr bool is_infinite() const { return k_ == kInf; }
  /// Finite index; meaningless for infinity.
  constexpr int k() const { return k_; }

  bool operator==(const BufferIndex&) const = default;
  /// Orders finite indices naturally with infinity above all of them.
  auto operator<=>(const BufferIndex&) const = default;

 private:
  static constexpr int kInf = 1 << 30;
  constexpr explicit BufferIndex(int k) : k_(k) {}
  int k_ = 1;
};

double q_value(const ModelParams& params, ChannelIndex idx);
double z_value(double arrival, BufferIndex idx);
double z_value(const ModelParams& params, int device, BufferIndex idx);

/// One step without observation, saturating at `cap`.
ChannelIndex aged(ChannelIndex idx, int cap);
/// One step without information about the buffer. Infinity stays infinity;
/// finite indices saturate at `cap`.
BufferIndex aged(BufferIndex idx, int cap);

/// Coordinator action: device i transmits iff it has a packet and d_i = 1.
struct Prescription {
  int d1 = 0;
  int d2 = 0;
  int operator[](int device) const { return device == 1 ? d1 : d2; }
  bool operator==(const Prescription&) const = default;
};

/// Common-information summary (k, l, (s, m)) shared by both devices.
struct CommonIndex {
  BufferIndex k;
  BufferIndex l;
  ChannelIndex channel;
  bool operator==(const CommonIndex&) const = default;
};

/// Online index arithmetic driven by the public record (prescription,
/// realized actions, feedback). Both devices run identical copies.
///
/// Starts at the synchronization point (t = 0): buffers known empty and,
/// optionally, S_0 revealed. After the first step both buffer indices are 1
/// and, if S_0 was revealed, the channel index is (S_0, 1).
class IndexTracker {
 public:
  IndexTracker(int cap_k, int cap_m) : cap_k_(cap_k), cap_m_(cap_m) {}

  void reset(std::optional<int> revealed_channel);

  /// Throws ContractViolation if the record is impossible under the current
  /// indices (a device transmitting against its prescription, a known-full
  /// buffer staying silent under d = 1, feedback without transmission, ...).
  void update(Prescription d, const std::array<int, 2>& u, Feedback h);

  /// False only before the first step.
  bool started() const { return started_; }
  BufferIndex buffer(int device) const { return device == 1 ? k_ : l_; }
  std::optional<ChannelIndex> channel() const { return channel_; }
  /// Full index once started and the channel has been seen.
  std::optional<CommonIndex> index() const;

  /// Posterior P(N^i = 1 | public record).
  double buffer_belief(const ModelParams& params, int device) const;
  /// Posterior P(S = 1 | public record).
  double channel_belief(const ModelParams& params) const;

 private:
  int cap_k_;
  int cap_m_;
  bool started_ = false;
  std::optional<int> exact_channel_;
  BufferIndex k_;
  BufferIndex l_;
  std::optional<ChannelIndex> channel_;
};

/// How arrivals at the two devices are related. kShared (w2 := w1, rate p1)
/// violates the independence assumption and exists to show it matters.
enum class ArrivalCoupling { kIndependent, kShared };

/// One public step: prescription in force, realized actions, feedback.
struct HistoryStep {
  Prescription d;
  std::array<int, 2> u{};
  Feedback h = Feedback::kNone;
  bool operator==(const HistoryStep&) const = default;
};

/// All 14 public steps that can follow some hidden state.
std::vector<HistoryStep> history_alphabet();

struct OraclePrior {
  std::optional<int> revealed_channel;  ///< S_0 if revealed, else stationary
  ArrivalCoupling coupling = ArrivalCoupling::kIndependent;
};

/// Posterior over (n1, n2, s), flat index (n1 << 2) | (n2 << 1) | s.
struct JointPosterior {
  std::array<double, 8> p{};
  double prob(int n1, int n2, int s) const { return p[(n1 << 2) | (n2 << 1) | s]; }
  double buffer_marginal(int device) const;
  double busy_marginal() const;
  /// P(n1 = a, n2 = b), channel summed out.
  double buffers(int a, int b) const { return prob(a, b, 0) + prob(a, b, 1); }
};

/// Exact posterior by enumerating every hidden trajectory (initial channel,
/// then arrivals and channel transitions per step) consistent with the
/// public history. Cost is 8^T. Throws ValidationError for a
/// zero-probability history.
JointPosterior bayes_oracle(const ModelParams& params, std::span<const HistoryStep> history,
                            const OraclePrior& prior = {});

/// Recursive Bayes filter over the joint hidden state. Gives the same
/// posterior as bayes_oracle, one step at a time.
class JointBeliefFilter {
 public:
  JointBeliefFilter(const ModelParams& params, const OraclePrior& prior);
  /// Conditions on one more public step. Returns false (and leaves the
  /// filter untouched) if the step has zero probability.
  bool update(const HistoryStep& step);
  const JointPosterior& posterior() const { return post_; }

 private:
  ModelParams params_;
  ArrivalCoupling coupling_;
  JointPosterior post_;
};

struct IndependenceReport {
  double max_gap = 0.0;
  std::size_t histories = 0;
};

/// Max over every positive-probability public history of length <= horizon of
/// max_{a,b} |P(n1=a, n2=b | history) - P(n1=a | history) P(n2=b | history)|.
/// Histories start at the synchronization point with S_0 unrevealed.
IndependenceReport check_conditional_independence(const ModelParams& params, int horizon,
                                                  ArrivalCoupling coupling = ArrivalCoupling::kIndependent);

struct BeliefAudit {
  double max_buffer_gap = 0.0;
  double max_channel_gap = 0.0;
  std::size_t histories = 0;
  /// Positive-probability histories the IndexTracker rejected.
  std::size_t rejected = 0;
};

/// Runs IndexTracker and JointBeliefFilter side by side over every
/// positive-probability public history of length <= max_length and records
/// the largest gap between z_k / q_{s,m} and the exact marginals.
BeliefAudit audit_index_beliefs(const ModelParams& params, int max_length, std::optional<int> revealed_channel);

}  // namespace macdp
