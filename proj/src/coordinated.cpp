#include "macdp/coordinated.hpp"

#include <algorithm>
#include <string>

#include "macdp/errors.hpp"

namespace macdp {

CoordinatedLayout::CoordinatedLayout(int cap_k, int cap_m) : cap_k_(cap_k), cap_m_(cap_m) {
  if (cap_k < 2 || cap_m < 2) throw ValidationError("caps must be at least 2");
  slots_ = static_cast<std::size_t>(cap_k) + 1;
  size_ = slots_ * slots_ * 2 * static_cast<std::size_t>(cap_m);
}

CommonIndex CoordinatedLayout::state(StateId id) const {
  std::size_t rest = id;
  const int m = static_cast<int>(rest % cap_m_) + 1;
  rest /= cap_m_;
  const int s = static_cast<int>(rest % 2);
  rest /= 2;
  const int sl = static_cast<int>(rest % slots_);
  const int sk = static_cast<int>(rest / slots_);
  return {buffer_at(sk), buffer_at(sl), {s, m}};
}

namespace {

// Posterior values on the truncated grid, looked up per state.
struct BeliefGrid {
  BeliefGrid(const ModelParams& params, const CoordinatedLayout& layout) : cap_m(layout.cap_m()) {
    for (int k = 1; k <= layout.cap_k(); ++k) {
      z1.push_back(z_value(params.p1, BufferIndex::finite(k)));
      z2.push_back(z_value(params.p2, BufferIndex::finite(k)));
    }
    z1.push_back(1.0);
    z2.push_back(1.0);
    for (int s = 0; s < 2; ++s) {
      for (int m = 1; m <= layout.cap_m(); ++m) q.push_back(q_value(params, {s, m}));
    }
    cap_k = layout.cap_k();
  }
  double z(int device, BufferIndex b) const {
    const auto& t = device == 1 ? z1 : z2;
    return t[b.is_infinite() ? cap_k : b.k() - 1];
  }
  double busy(ChannelIndex ch) const { return q[ch.s * cap_m + ch.m - 1]; }

  int cap_k = 0;
  int cap_m;
  std::vector<double> z1, z2, q;
};

// Fixed-capacity outcome buffer; merges outcomes with equal successors.
struct OutcomeBuffer {
  std::array<CoordinatedOutcome, 8> items;
  int size = 0;

  void add(double p, const CommonIndex& next, double reward) {
    if (p == 0.0) return;
    for (int i = 0; i < size; ++i) {
      if (items[i].next == next) {
        const double total = items[i].probability + p;
        items[i].reward = (items[i].probability * items[i].reward + p * reward) / total;
        items[i].probability = total;
        return;
      }
    }
    items[size++] = {p, next, reward};
  }
};

void emit_outcomes(const ModelParams& params, const CoordinatedLayout& layout, const BeliefGrid& grid,
                   const CommonIndex& x, Prescription d, RecursionMode mode, OutcomeBuffer& out) {
  out.size = 0;
  const double q = grid.busy(x.channel);
  const double qb = 1.0 - q;
  const double z1 = grid.z(1, x.k);
  const double z2 = grid.z(2, x.l);
  const double r = params.r;
  const double c = params.c;
  const BufferIndex one = BufferIndex::finite(1);
  const BufferIndex full = BufferIndex::infinity();
  const BufferIndex k_aged = aged(x.k, layout.cap_k());
  const BufferIndex l_aged = aged(x.l, layout.cap_k());
  const ChannelIndex ch_aged = aged(x.channel, layout.cap_m());
  const ChannelIndex seen_idle{0, 1};
  const ChannelIndex seen_busy{1, 1};

  if (d.d1 == 0 && d.d2 == 0) {
    out.add(1.0, {k_aged, l_aged, ch_aged}, 0.0);
  } else if (d.d1 == 1 && d.d2 == 0) {
    out.add(1.0 - z1, {one, l_aged, ch_aged}, 0.0);
    out.add(z1 * qb, {one, l_aged, seen_idle}, r - c);
    out.add(z1 * q, {full, l_aged, seen_busy}, -c);
  } else if (d.d1 == 0 && d.d2 == 1) {
    out.add(1.0 - z2, {k_aged, one, ch_aged}, 0.0);
    out.add(z2 * qb, {k_aged, one, seen_idle}, r - c);
    out.add(z2 * q, {k_aged, full, seen_busy}, -c);
  } else {
    const double only1 = z1 * (1.0 - z2);
    const double only2 = (1.0 - z1) * z2;
    const double both = z1 * z2;
    out.add((1.0 - z1) * (1.0 - z2), {one, one, ch_aged}, 0.0);
    out.add((only1 + only2) * qb, {one, one, seen_idle}, r - c);
    out.add(both * qb, {full, full, seen_idle}, -2.0 * c);
    if (mode == RecursionMode::kAsPrinted) {
      const double any = z1 + z2 - z1 * z2;
      // Expected reward of the aggregated busy branch: -(z1 + z2) c q / (any q).
      out.add(any * q, {full, full, seen_busy}, any > 0.0 ? -(z1 + z2) * c / any : 0.0);
    } else {
      out.add(only1 * q, {full, one, seen_busy}, -c);
      out.add(only2 * q, {one, full, seen_busy}, -c);
      out.add(both * q, {full, full, seen_busy}, -2.0 * c);
    }
  }
}

}  // namespace

std::vector<CoordinatedOutcome> coordinated_outcomes(const ModelParams& params, const CoordinatedLayout& layout,
                                                     const CommonIndex& x, Prescription d, RecursionMode mode) {
  params.validate();
  const BeliefGrid grid(params, layout);
  OutcomeBuffer buf;
  emit_outcomes(params, layout, grid, x, d, mode, buf);
  return {buf.items.begin(), buf.items.begin() + buf.size};
}

CountableMdp build_prescription_mdp(const ModelParams& params, const CoordinatedLayout& layout, RecursionMode mode,
                                    const PrescriptionMenu& menu) {
  params.validate();
  const BeliefGrid grid(params, layout);
  MdpBuilder b;
  b.reserve(layout.size(), 4 * layout.size(), 12 * layout.size());
  std::vector<std::pair<ActionId, Prescription>> options;
  OutcomeBuffer buf;
  for (StateId id = 0; id < layout.size(); ++id) {
    b.add_state();
    const CommonIndex x = layout.state(id);
    options.clear();
    menu(id, options);
    for (const auto& [action, d] : options) {
      b.add_action(action);
      emit_outcomes(params, layout, grid, x, d, mode, buf);
      for (int i = 0; i < buf.size; ++i) {
        b.add_transition(buf.items[i].probability, layout.id(buf.items[i].next), buf.items[i].reward);
      }
    }
  }
  return std::move(b).build(params.beta);
}

CountableMdp build_coordinated_mdp(const ModelParams& params, int cap_k, int cap_m, RecursionMode mode) {
  const CoordinatedLayout layout(cap_k, cap_m);
  return build_prescription_mdp(params, layout, mode, [](StateId, auto& options) {
    for (ActionId a = 0; a < 4; ++a) options.emplace_back(a, kPrescriptions[a]);
  });
}

PrescriptionTable::PrescriptionTable(const CoordinatedLayout& layout, PolicyTable actions)
    : layout_(layout), actions_(std::move(actions)) {
  if (actions_.size() != layout_.size()) throw ValidationError("prescription table does not match layout");
  for (auto a : actions_) {
    if (a > 3) throw ValidationError("prescription action id out of range");
  }
}

double synchronized_value(const ModelParams& params, const CoordinatedLayout& layout, const ValueTable& v) {
  const double pi1 = params.stationary_busy();
  const BufferIndex one = BufferIndex::finite(1);
  return params.beta * ((1.0 - pi1) * v[layout.id({one, one, {0, 1}})] + pi1 * v[layout.id({one, one, {1, 1}})]);
}

double CoordinatedSolution::initial_value() const { return synchronized_value(params, layout, vi.values); }

CoordinatedSolution solve_coordinated(const ModelParams& params, int cap_k, int cap_m, RecursionMode mode,
                                      double tol) {
  CoordinatedSolution sol;
  sol.params = params;
  sol.mode = mode;
  sol.layout = CoordinatedLayout(cap_k, cap_m);
  const auto mdp = build_coordinated_mdp(params, cap_k, cap_m, mode);
  SolveOptions opts;
  opts.tol = tol;
  sol.vi = value_iteration(mdp, opts);
  sol.policy = extract_policy(mdp, sol.vi.values);
  return sol;
}

// ---------------------------------------------------------------------------

DeviceController::DeviceController(int device, std::shared_ptr<const PrescriptionTable> table)
    : device_(device),
      table_(std::move(table)),
      tracker_(table_->layout().cap_k(), table_->layout().cap_m()) {
  if (device != 1 && device != 2) throw ValidationError("device must be 1 or 2");
}

void DeviceController::reset(int initial_channel) { tracker_.reset(initial_channel); }

Prescription DeviceController::current() const {
  const auto idx = tracker_.index();
  return idx ? table_->at(*idx) : Prescription{0, 0};
}

int DeviceController::act(int own_buffer) const { return own_buffer * current()[device_]; }

void DeviceController::observe(const std::array<int, 2>& actions, Feedback feedback) {
  try {
    tracker_.update(current(), actions, feedback);
  } catch (const ContractViolation& e) {
    throw ContractViolation("device " + std::to_string(device_) + " tracker: " + e.what());
  }
}

void DecentralizedPair::reset(int initial_channel) {
  for (auto& d : devices_) d.reset(initial_channel);
}

std::array<int, 2> DecentralizedPair::act(const std::array<int, 2>& buffers) {
  return {devices_[0].act(buffers[0]), devices_[1].act(buffers[1])};
}

void DecentralizedPair::observe(const std::array<int, 2>& actions, Feedback feedback) {
  for (auto& d : devices_) d.observe(actions, feedback);
}

std::pair<DeviceController, DeviceController> decentralize(std::shared_ptr<const PrescriptionTable> table) {
  return {DeviceController(1, table), DeviceController(2, table)};
}

}  // namespace macdp
