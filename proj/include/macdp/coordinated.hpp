#pragma once

#include <array>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "macdp/belief.hpp"
#include "macdp/channel_model.hpp"
#include "macdp/mdp.hpp"
#include "macdp/recursion_mode.hpp"

namespace macdp {

/// Action ids of the coordinator MDP. The order doubles as the tie-break
/// order: (0,0) < (1,0) < (0,1) < (1,1).
inline constexpr std::array<Prescription, 4> kPrescriptions{
    Prescription{0, 0}, Prescription{1, 0}, Prescription{0, 1}, Prescription{1, 1}};

inline Prescription prescription_of(ActionId a) { return kPrescriptions.at(a); }
inline ActionId action_of(Prescription d) { return static_cast<ActionId>(d.d1 + 2 * d.d2); }

/// Enumeration of the truncated coordinator state space
/// (R^1 u {inf}) x (R^2 u {inf}) x Q.
///
/// Buffer slot j in [0, cap_k) is index j + 1; slot cap_k is infinity.
class CoordinatedLayout {
 public:
  CoordinatedLayout(int cap_k, int cap_m);

  int cap_k() const { return cap_k_; }
  int cap_m() const { return cap_m_; }
  std::size_t size() const { return size_; }

  StateId id(const CommonIndex& x) const {
    const auto sk = static_cast<std::size_t>(slot(x.k));
    const auto sl = static_cast<std::size_t>(slot(x.l));
    return static_cast<StateId>(((sk * slots_ + sl) * 2 + x.channel.s) * cap_m_ + x.channel.m - 1);
  }
  CommonIndex state(StateId id) const;

  bool operator==(const CoordinatedLayout&) const = default;

 private:
  int slot(BufferIndex b) const { return b.is_infinite() ? cap_k_ : b.k() - 1; }
  BufferIndex buffer_at(int slot) const {
    return slot == cap_k_ ? BufferIndex::infinity() : BufferIndex::finite(slot + 1);
  }

  int cap_k_;
  int cap_m_;
  std::size_t slots_;
  std::size_t size_;
};

/// One outcome of a prescription: probability, successor, reward.
struct CoordinatedOutcome {
  double probability;
  CommonIndex next;
  double reward;
};

/// Successor distribution of prescription `d` at `x` (outcomes to the same
/// successor merged, zero-probability outcomes dropped).
///
/// Device i with d_i = 1 and no packet reveals an empty buffer (index 1 next
/// step); a lone transmission on an idle channel succeeds (index 1); any
/// observed failure leaves the transmitter known full (infinity). The two
/// modes differ only for (1,1) on a busy channel: kAsPrinted sends all of it
/// to (inf, inf, q_{1,1}); kBayesConsistent keeps track of who transmitted.
std::vector<CoordinatedOutcome> coordinated_outcomes(const ModelParams& params, const CoordinatedLayout& layout,
                                                     const CommonIndex& x, Prescription d, RecursionMode mode);

/// Coordinator MDP with all four prescriptions available everywhere.
CountableMdp build_coordinated_mdp(const ModelParams& params, int cap_k, int cap_m, RecursionMode mode);

/// Coordinator MDP with a per-state list of (action id, prescription).
/// Action ids must be ascending per state.
using PrescriptionMenu = std::function<void(StateId, std::vector<std::pair<ActionId, Prescription>>&)>;
CountableMdp build_prescription_mdp(const ModelParams& params, const CoordinatedLayout& layout, RecursionMode mode,
                                    const PrescriptionMenu& menu);

/// Coordination law psi: prescription per coordinator state.
class PrescriptionTable {
 public:
  PrescriptionTable(const CoordinatedLayout& layout, PolicyTable actions);

  const CoordinatedLayout& layout() const { return layout_; }
  const PolicyTable& actions() const { return actions_; }
  Prescription at(const CommonIndex& x) const { return prescription_of(actions_[layout_.id(x)]); }
  Prescription at(StateId id) const { return prescription_of(actions_[id]); }

  bool operator==(const PrescriptionTable&) const = default;

 private:
  CoordinatedLayout layout_;
  PolicyTable actions_;
};

struct CoordinatedSolution {
  ModelParams params;
  RecursionMode mode = RecursionMode::kAsPrinted;
  CoordinatedLayout layout{2, 2};
  SolveResult vi;
  PolicyTable policy;

  PrescriptionTable table() const { return {layout, policy}; }
  double value(const CommonIndex& x) const { return vi.values[layout.id(x)]; }
  /// beta * sum_s pi_s V(1, 1, q_{s,1}): value from the synchronization point.
  double initial_value() const;
};

CoordinatedSolution solve_coordinated(const ModelParams& params, int cap_k = 60, int cap_m = 60,
                                      RecursionMode mode = RecursionMode::kAsPrinted, double tol = 1e-10);

/// Value at the synchronization point for any coordinator value table.
double synchronized_value(const ModelParams& params, const CoordinatedLayout& layout, const ValueTable& v);

/// Per-device half of a decentralized strategy. Keeps its own copy of the
/// common index and transmits iff it has a packet and its prescription bit
/// at that index is 1.
class DeviceController {
 public:
  DeviceController(int device, std::shared_ptr<const PrescriptionTable> table);

  void reset(int initial_channel);
  int act(int own_buffer) const;
  /// Throws ContractViolation if the public record is impossible under the
  /// device's index state.
  void observe(const std::array<int, 2>& actions, Feedback feedback);

  const IndexTracker& tracker() const { return tracker_; }
  int device() const { return device_; }

 private:
  Prescription current() const;

  int device_;
  std::shared_ptr<const PrescriptionTable> table_;
  IndexTracker tracker_;
};

/// Two DeviceControllers, each seeing only its own buffer.
class DecentralizedPair final : public Controller {
 public:
  DecentralizedPair(DeviceController first, DeviceController second)
      : devices_{std::move(first), std::move(second)} {}

  void reset(int initial_channel) override;
  std::array<int, 2> act(const std::array<int, 2>& buffers) override;
  void observe(const std::array<int, 2>& actions, Feedback feedback) override;

  const DeviceController& device(int i) const { return devices_[i - 1]; }

 private:
  std::array<DeviceController, 2> devices_;
};

/// Splits a coordination law into the two per-device strategies.
std::pair<DeviceController, DeviceController> decentralize(std::shared_ptr<const PrescriptionTable> table);

}  // namespace macdp
