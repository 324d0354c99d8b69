#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "macdp/coordinated.hpp"
#include "macdp/mdp.hpp"

namespace macdp {

/// Time-invariant strategy of one device in prescription form: a bit per
/// coordinator state, realized as u = n * bit.
class DeviceStrategy {
 public:
  DeviceStrategy(const CoordinatedLayout& layout, std::vector<std::uint8_t> bits);

  static DeviceStrategy never(const CoordinatedLayout& layout);
  static DeviceStrategy always(const CoordinatedLayout& layout);

  const CoordinatedLayout& layout() const { return layout_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  int at(StateId id) const { return bits_[id]; }
  int at(const CommonIndex& x) const { return bits_[layout_.id(x)]; }

  bool operator==(const DeviceStrategy&) const = default;

 private:
  CoordinatedLayout layout_;
  std::vector<std::uint8_t> bits_;
};

/// Device `device`'s half of a coordination law.
DeviceStrategy component(const PrescriptionTable& table, int device);
/// Joint coordination law (d1, d2) = (first(x), second(x)).
PrescriptionTable combine(const DeviceStrategy& first, const DeviceStrategy& second);

struct BestResponse {
  int responder = 1;
  DeviceStrategy strategy;
  SolveResult vi;
  /// Value from the synchronization point.
  double initial_value = 0.0;
};

struct BestResponseOptions {
  RecursionMode mode = RecursionMode::kBayesConsistent;
  double tol = 1e-10;
  /// On q-value ties (1e-12) keep the incumbent's bit instead of the lowest.
  const DeviceStrategy* incumbent = nullptr;
};

/// Best time-invariant prescription-form strategy of `responder` against a
/// fixed partner strategy.
///
/// The responder's problem is the coordinator MDP with the partner's bit
/// pinned to fixed(x): state (k, l, (s, m)), two actions. Both buffers are
/// marginalized with their public beliefs z_k, z_l, which is exact because
/// the buffers are conditionally independent given the public record.
BestResponse best_response(const ModelParams& params, const DeviceStrategy& fixed, int responder,
                           const BestResponseOptions& opts = {});

/// Value table of a strategy pair on the coordinator state space.
SolveResult pair_value(const ModelParams& params, const DeviceStrategy& first, const DeviceStrategy& second,
                       RecursionMode mode, double tol = 1e-10);

struct PbpStep {
  int round = 0;
  int responder = 1;
  double value_before = 0.0;  ///< pair value before this response
  double value_after = 0.0;   ///< best-response value
  bool changed = false;
};

struct PbpOptions {
  int max_rounds = 50;
  int first_responder = 1;
  RecursionMode mode = RecursionMode::kBayesConsistent;
  double tol = 1e-10;
};

struct PbpReport {
  DeviceStrategy first;
  DeviceStrategy second;
  bool converged = false;
  int rounds = 0;
  std::vector<PbpStep> trace;
  /// If a previously seen pair came back: (earlier round, round of return).
  std::optional<std::pair<int, int>> cycle;
  double final_value = 0.0;
};

/// Alternating best responses until a full round changes nothing (a
/// person-by-person optimum), a pair repeats, or max_rounds is hit.
PbpReport pbp_iteration(const ModelParams& params, DeviceStrategy first, DeviceStrategy second,
                        const PbpOptions& opts = {});

}  // namespace macdp
