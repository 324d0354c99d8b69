#include "macdp/pbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "macdp/errors.hpp"

namespace macdp {

DeviceStrategy::DeviceStrategy(const CoordinatedLayout& layout, std::vector<std::uint8_t> bits)
    : layout_(layout), bits_(std::move(bits)) {
  if (bits_.size() != layout_.size()) throw ValidationError("device strategy does not match layout");
  for (auto b : bits_) {
    if (b > 1) throw ValidationError("device strategy bits must be 0 or 1");
  }
}

DeviceStrategy DeviceStrategy::never(const CoordinatedLayout& layout) {
  return {layout, std::vector<std::uint8_t>(layout.size(), 0)};
}

DeviceStrategy DeviceStrategy::always(const CoordinatedLayout& layout) {
  return {layout, std::vector<std::uint8_t>(layout.size(), 1)};
}

DeviceStrategy component(const PrescriptionTable& table, int device) {
  std::vector<std::uint8_t> bits(table.layout().size());
  for (StateId id = 0; id < bits.size(); ++id) bits[id] = static_cast<std::uint8_t>(table.at(id)[device]);
  return {table.layout(), std::move(bits)};
}

PrescriptionTable combine(const DeviceStrategy& first, const DeviceStrategy& second) {
  if (!(first.layout() == second.layout())) throw ValidationError("strategies live on different layouts");
  PolicyTable actions(first.layout().size());
  for (StateId id = 0; id < actions.size(); ++id) actions[id] = action_of({first.at(id), second.at(id)});
  return {first.layout(), std::move(actions)};
}

BestResponse best_response(const ModelParams& params, const DeviceStrategy& fixed, int responder,
                           const BestResponseOptions& opts) {
  if (responder != 1 && responder != 2) throw ValidationError("responder must be 1 or 2");
  const auto& layout = fixed.layout();
  const auto mdp = build_prescription_mdp(params, layout, opts.mode, [&](StateId id, auto& menu) {
    const int other = fixed.at(id);
    for (int bit = 0; bit <= 1; ++bit) {
      menu.emplace_back(static_cast<ActionId>(bit), responder == 1 ? Prescription{bit, other} : Prescription{other, bit});
    }
  });
  SolveOptions so;
  so.tol = opts.tol;
  BestResponse br{responder, DeviceStrategy::never(layout), value_iteration(mdp, so), 0.0};

  std::vector<std::uint8_t> bits(layout.size());
  for (StateId id = 0; id < layout.size(); ++id) {
    const auto c0 = mdp.first_choice(id);
    const double q0 = mdp.q_value(c0, br.vi.values);
    const double q1 = mdp.q_value(c0 + 1, br.vi.values);
    constexpr double kTie = 1e-12;
    if (std::abs(q1 - q0) <= kTie) {
      bits[id] = opts.incumbent ? static_cast<std::uint8_t>(opts.incumbent->at(id)) : 0;
    } else {
      bits[id] = q1 > q0 ? 1 : 0;
    }
  }
  br.strategy = DeviceStrategy(layout, std::move(bits));
  br.initial_value = synchronized_value(params, layout, br.vi.values);
  return br;
}

SolveResult pair_value(const ModelParams& params, const DeviceStrategy& first, const DeviceStrategy& second,
                       RecursionMode mode, double tol) {
  const auto& layout = first.layout();
  const auto table = combine(first, second);
  const auto mdp = build_prescription_mdp(params, layout, mode, [&](StateId id, auto& menu) {
    menu.emplace_back(0, table.at(id));
  });
  SolveOptions so;
  so.tol = tol;
  return policy_evaluation(mdp, PolicyTable(layout.size(), 0), so);
}

PbpReport pbp_iteration(const ModelParams& params, DeviceStrategy first, DeviceStrategy second, const PbpOptions& opts) {
  if (opts.first_responder != 1 && opts.first_responder != 2) throw ValidationError("first responder must be 1 or 2");
  if (opts.max_rounds < 1) throw ValidationError("max_rounds must be at least 1");
  const auto& layout = first.layout();
  PbpReport rep{first, second, false, 0, {}, std::nullopt, 0.0};
  std::vector<std::pair<DeviceStrategy, DeviceStrategy>> seen{{first, second}};

  double current = synchronized_value(params, layout, pair_value(params, first, second, opts.mode, opts.tol).values);
  for (int round = 1; round <= opts.max_rounds; ++round) {
    bool changed = false;
    for (int turn = 0; turn < 2; ++turn) {
      const int responder = turn == 0 ? opts.first_responder : 3 - opts.first_responder;
      DeviceStrategy& mine = responder == 1 ? rep.first : rep.second;
      const DeviceStrategy& other = responder == 1 ? rep.second : rep.first;
      BestResponseOptions bo;
      bo.mode = opts.mode;
      bo.tol = opts.tol;
      bo.incumbent = &mine;
      auto br = best_response(params, other, responder, bo);
      const bool step_changed = !(br.strategy == mine);
      rep.trace.push_back({round, responder, current, br.initial_value, step_changed});
      current = br.initial_value;
      if (step_changed) {
        mine = std::move(br.strategy);
        changed = true;
      }
    }
    rep.rounds = round;
    if (!changed) {
      rep.converged = true;
      break;
    }
    for (std::size_t i = 0; i + 1 < seen.size(); ++i) {
      if (seen[i].first == rep.first && seen[i].second == rep.second) {
        rep.cycle = std::make_pair(static_cast<int>(i), round);
        break;
      }
    }
    if (rep.cycle) break;
    seen.emplace_back(rep.first, rep.second);
  }
  rep.final_value = current;
  return rep;
}

}  // namespace macdp
