#include "macdp/sim.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "macdp/centralized.hpp"
#include "macdp/coordinated.hpp"
#include "macdp/errors.hpp"
#include "compensated_sum.hpp"
#include "rollout.hpp"

namespace macdp {

using detail::CompensatedSum;

bool EvalReport::within(double k) const {
  if (!dp_reference) throw ValidationError("report has no DP reference");
  return std::abs(mean - *dp_reference) <= k * std_error + tail_bound;
}

std::string to_json(const EvalReport& r, int indent) {
  nlohmann::json j;
  j["mean"] = r.mean;
  j["std_error"] = r.std_error;
  j["episodes"] = r.episodes;
  j["horizon"] = r.horizon;
  j["seed"] = r.seed;
  j["tail_bound"] = r.tail_bound;
  j["dp_reference"] = r.dp_reference ? nlohmann::json(*r.dp_reference) : nlohmann::json(nullptr);
  return j.dump(indent);
}

void write_episode_csv(std::ostream& os, const EvalReport& report) {
  os << "episode,return\n";
  os.precision(17);
  for (std::size_t e = 0; e < report.episode_returns.size(); ++e) os << e << ',' << report.episode_returns[e] << '\n';
}

int default_horizon(double beta, double tol) {
  if (!(beta > 0.0 && beta < 1.0)) throw ValidationError("beta must lie in (0,1)");
  if (!(tol > 0.0 && tol < 1.0)) throw ValidationError("horizon tolerance must lie in (0,1)");
  int t = 0;
  double w = 1.0;
  while (w > tol) {
    w *= beta;
    ++t;
  }
  return t;
}

EvalReport evaluate_mc(const ModelParams& params, const ControllerFactory& factory, SystemSize size,
                       const McOptions& opts) {
  params.validate();
  if (opts.episodes < 1) throw ValidationError("episodes must be at least 1");
  if (opts.horizon < 0) throw ValidationError("horizon must be non-negative (0 selects the default)");
  EvalReport rep;
  rep.episodes = opts.episodes;
  rep.horizon = opts.horizon == 0 ? default_horizon(params.beta) : opts.horizon;
  rep.seed = opts.seed;
  rep.tail_bound = std::pow(params.beta, rep.horizon) * std::max(params.r, 2.0 * params.c) / (1.0 - params.beta);

  const CounterRng root(opts.seed);
  std::vector<double> returns(static_cast<std::size_t>(opts.episodes));
  auto controller = factory();
  for (int e = 0; e < opts.episodes; ++e) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(e));
    double ret = 0.0;
    double disc = 1.0;
    detail::rollout(params, *controller, rep.horizon, rng, size,
                    [&](int, const SystemState&, const std::array<int, 2>&, const StepOutcome& out) {
                      ret += disc * out.reward;
                      disc *= params.beta;
                    });
    returns[static_cast<std::size_t>(e)] = ret;
  }

  CompensatedSum total;
  for (double x : returns) total.add(x);
  rep.mean = total.value() / opts.episodes;
  if (opts.episodes > 1) {
    CompensatedSum sq;
    for (double x : returns) sq.add((x - rep.mean) * (x - rep.mean));
    const double var = sq.value() / (opts.episodes - 1);
    rep.std_error = std::sqrt(var / opts.episodes);
  }
  if (opts.keep_returns) rep.episode_returns = std::move(returns);
  return rep;
}

std::string to_string(SolverChoice choice) {
  switch (choice) {
    case SolverChoice::kCentralized: return "centralized";
    case SolverChoice::kCoordinated: return "coordinated";
    case SolverChoice::kPbp: return "pbp";
  }
  return "?";
}

SolverChoice parse_solver_choice(const std::string& text) {
  if (text == "centralized") return SolverChoice::kCentralized;
  if (text == "coordinated") return SolverChoice::kCoordinated;
  if (text == "pbp") return SolverChoice::kPbp;
  throw ValidationError("unknown solver '" + text + "' (expected centralized, coordinated or pbp)");
}

EvalReport compare_dp_mc(const ModelParams& params, SolverChoice choice, const CompareOptions& opts) {
  switch (choice) {
    case SolverChoice::kCentralized: {
      const auto sol = solve_centralized(params, opts.cap_m, opts.mode, opts.tol);
      const CentralizedLayout layout = sol.layout;
      const PolicyTable policy = sol.policy;
      auto rep = evaluate_mc(params, [&] { return make_centralized_controller(layout, policy); },
                             SystemSize::kOneDevice, opts.mc);
      rep.dp_reference = sol.initial_value();
      return rep;
    }
    case SolverChoice::kCoordinated: {
      const auto sol = solve_coordinated(params, opts.cap_k, opts.cap_m, opts.mode, opts.tol);
      auto table = std::make_shared<const PrescriptionTable>(sol.table());
      auto rep = evaluate_mc(params, [&] {
        auto [a, b] = decentralize(table);
        return std::make_unique<DecentralizedPair>(std::move(a), std::move(b));
      }, SystemSize::kTwoDevices, opts.mc);
      rep.dp_reference = sol.initial_value();
      return rep;
    }
    case SolverChoice::kPbp: {
      const CoordinatedLayout layout(opts.cap_k, opts.cap_m);
      PbpOptions po;
      po.mode = opts.mode;
      po.tol = opts.tol;
      po.max_rounds = opts.pbp_max_rounds;
      const auto res = pbp_iteration(params, DeviceStrategy::never(layout), DeviceStrategy::never(layout), po);
      auto table = std::make_shared<const PrescriptionTable>(combine(res.first, res.second));
      auto rep = evaluate_mc(params, [&] {
        auto [a, b] = decentralize(table);
        return std::make_unique<DecentralizedPair>(std::move(a), std::move(b));
      }, SystemSize::kTwoDevices, opts.mc);
      rep.dp_reference = synchronized_value(params, layout, pair_value(params, res.first, res.second, opts.mode, opts.tol).values);
      return rep;
    }
  }
  throw ValidationError("unknown solver choice");
}

}  // namespace macdp
