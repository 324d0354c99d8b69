// Batch front end: solvers, reproduction suites, simulation and oracles.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "macdp/belief.hpp"
#include "macdp/centralized.hpp"
#include "macdp/config.hpp"
#include "macdp/coordinated.hpp"
#include "macdp/errors.hpp"
#include "macdp/io.hpp"
#include "macdp/pattern.hpp"
#include "macdp/pbp.hpp"
#include "macdp/reference_data.hpp"
#include "macdp/sim.hpp"

using namespace macdp;
using json = nlohmann::json;

namespace {

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> save_config;
  std::optional<std::string> p1, p2, alpha0, alpha1, c, r, beta, cap_k, cap_m, mode, tol, seed, episodes, out;
};

void add_common_flags(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "Read a key = value config file first");
  app.add_option("--save-config", o.save_config, "Write the effective config to this file");
  app.add_option("--p1", o.p1, "Arrival probability of device 1");
  app.add_option("--p2", o.p2, "Arrival probability of device 2");
  app.add_option("--alpha0", o.alpha0, "P(idle -> idle)");
  app.add_option("--alpha1", o.alpha1, "P(busy -> busy)");
  app.add_option("--c", o.c, "Transmission cost");
  app.add_option("--r", o.r, "Reward of a successful transmission");
  app.add_option("--beta", o.beta, "Discount factor");
  app.add_option("--cap-k", o.cap_k, "Buffer index cap");
  app.add_option("--cap-m", o.cap_m, "Channel index cap");
  app.add_option("--mode", o.mode, "Recursion mode: printed or bayes");
  app.add_option("--tol", o.tol, "Value iteration tolerance");
  app.add_option("--seed", o.seed, "Simulation seed");
  app.add_option("--episodes", o.episodes, "Simulation episodes");
  app.add_option("--out", o.out, "Output file (default stdout)");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config_path ? load_config(*o.config_path) : RunConfig{};
  const std::pair<const char*, const std::optional<std::string>*> kv[] = {
      {"p1", &o.p1},     {"p2", &o.p2},       {"alpha0", &o.alpha0}, {"alpha1", &o.alpha1}, {"c", &o.c},
      {"r", &o.r},       {"beta", &o.beta},   {"cap_k", &o.cap_k},   {"cap_m", &o.cap_m},   {"mode", &o.mode},
      {"tol", &o.tol},   {"seed", &o.seed},   {"episodes", &o.episodes}, {"out", &o.out}};
  for (const auto& [key, value] : kv) {
    if (*value) set_config_value(cfg, key, **value);
  }
  cfg.validate();
  if (o.save_config) save_config(*o.save_config, cfg);
  return cfg;
}

// Writes to cfg.out, or stdout when unset.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(cfg.out);
  if (!os) throw ValidationError("cannot write '" + cfg.out + "'");
  os << text;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write '" + path + "'");
  body(os);
}

std::string threshold_token(const std::optional<int>& k, int cap) {
  return k ? std::to_string(*k) : ">=" + std::to_string(cap);
}

json params_json(const RunConfig& cfg) {
  return {{"p1", cfg.p1.text()}, {"p2", cfg.p2.text()}, {"alpha0", cfg.alpha0.text()}, {"alpha1", cfg.alpha1.text()},
          {"c", cfg.c.text()},   {"r", cfg.r.text()},   {"beta", cfg.beta.text()},     {"cap_k", cfg.cap_k},
          {"cap_m", cfg.cap_m}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::shared_ptr<const PrescriptionTable> solve_table(const RunConfig& cfg) {
  const auto sol = solve_coordinated(cfg.params(), cfg.cap_k, cfg.cap_m, cfg.mode, cfg.tol.value());
  return std::make_shared<const PrescriptionTable>(sol.table());
}

// ---------------------------------------------------------------------------

int cmd_solve_centralized(const RunConfig& cfg, const std::string& policy_path) {
  const auto sol = solve_centralized(cfg.params(), cfg.cap_m, cfg.mode, cfg.tol.value());
  std::ostringstream os;
  os << "p,c,k0,k1,mode\n"
     << cfg.p1.text() << ',' << cfg.c.text() << ',' << threshold_token(sol.thresholds.k0, cfg.cap_m) << ','
     << threshold_token(sol.thresholds.k1, cfg.cap_m) << ',' << to_string(cfg.mode) << '\n';
  emit(cfg, os.str());
  if (!policy_path.empty()) write_file(policy_path, [&](std::ostream& f) { write_centralized_policy_csv(f, sol); });
  std::cerr << "value iteration: " << sol.vi.iterations << " sweeps, residual " << sol.vi.residual
            << ", initial value " << sol.initial_value() << '\n';
  return 0;
}

int cmd_reproduce_table1(const RunConfig& cfg) {
  const auto& ref = threshold_reference();
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream os;
  os << "p,c,mode,k0,k1,expected_k0,expected_k1,match\n";
  json summary = json::array();
  for (const auto mode : {RecursionMode::kAsPrinted, RecursionMode::kBayesConsistent}) {
    int matched = 0;
    for (const auto& cell : ref.cells) {
      ModelParams p = ref.base;
      p.p1 = p.p2 = cell.p;
      p.c = cell.c;
      const auto sol = solve_centralized(p, cfg.cap_m, mode, cfg.tol.value());
      const bool ok = sol.thresholds.k0 == cell.k0 && sol.thresholds.k1 == cell.k1;
      matched += ok;
      os << cell.p << ',' << cell.c << ',' << to_string(mode) << ',' << threshold_token(sol.thresholds.k0, cfg.cap_m)
         << ',' << threshold_token(sol.thresholds.k1, cfg.cap_m) << ',' << cell.k0 << ',' << cell.k1 << ','
         << (ok ? "match" : "MISMATCH") << '\n';
    }
    summary.push_back({{"mode", to_string(mode)}, {"matched", matched}, {"cells", ref.cells.size()}});
    std::cerr << to_string(mode) << ": " << matched << "/" << ref.cells.size() << " cells match\n";
  }
  emit(cfg, os.str());
  std::cerr << "grid time " << seconds_since(t0) << " s\n";
  return 0;
}

int cmd_solve_decentralized(const RunConfig& cfg, const std::string& policy_path, int region, bool with_inf) {
  const auto params = cfg.params();
  const auto sol = solve_coordinated(params, cfg.cap_k, cfg.cap_m, cfg.mode, cfg.tol.value());
  if (!policy_path.empty()) write_file(policy_path, [&](std::ostream& f) { write_coordinated_policy_csv(f, sol); });

  json rep{{"params", params_json(cfg)},
           {"mode", to_string(cfg.mode)},
           {"iterations", sol.vi.iterations},
           {"initial_value", sol.initial_value()}};
  const auto* spec = pattern_reference().find(params);
  if (!spec) {
    rep["spec_name"] = nullptr;
    rep["matched"] = nullptr;
    rep["mismatches"] = json::array();
    std::cerr << "no reference pattern for these parameters; policy dump only\n";
  } else {
    PatternRegion reg;
    reg.max_buffer = std::min(region, cfg.cap_k);
    reg.max_m = std::min(region, cfg.cap_m);
    reg.include_infinity = with_inf;
    const auto match = match_pattern(sol.table(), spec->spec, reg);
    rep["spec_name"] = spec->spec.name;
    rep["matched"] = match.matched;
    rep["checked"] = match.checked;
    json mm = json::array();
    for (const auto& m : match.mismatches) {
      json expected = json::array();
      for (const auto& e : m.expected) expected.push_back(to_string(e));
      mm.push_back({{"k", to_token(m.at.k)},
                    {"l", to_token(m.at.l)},
                    {"s", m.at.channel.s},
                    {"m", m.at.channel.m},
                    {"got", to_string(m.got)},
                    {"expected", expected}});
    }
    rep["mismatches"] = mm;
    std::cerr << spec->spec.name << ": " << (match.matched ? "matches" : "does not match") << " ("
              << match.mismatches.size() << " of " << match.checked << " states differ)\n";
  }
  emit(cfg, rep.dump(2) + "\n");
  return 0;
}

DeviceStrategy fixed_strategy(const RunConfig& cfg, const std::string& source, int partner) {
  const CoordinatedLayout layout(cfg.cap_k, cfg.cap_m);
  if (source == "never") return DeviceStrategy::never(layout);
  if (source == "always") return DeviceStrategy::always(layout);
  if (source == "optimal") return component(*solve_table(cfg), partner);
  std::ifstream in(source);
  if (!in) throw ValidationError("cannot open strategy file '" + source + "'");
  return read_strategy_csv(in, layout);
}

int cmd_best_response(const RunConfig& cfg, const std::string& fixed_source, int responder,
                      const std::string& strategy_path) {
  const auto fixed = fixed_strategy(cfg, fixed_source, 3 - responder);
  BestResponseOptions opts;
  opts.mode = cfg.mode;
  opts.tol = cfg.tol.value();
  const auto br = best_response(cfg.params(), fixed, responder, opts);
  if (!strategy_path.empty()) write_file(strategy_path, [&](std::ostream& f) { write_strategy_csv(f, br.strategy); });

  // Thresholds read off the k = l = 1 slice, comparable with solve-centralized
  // when the partner never transmits.
  json th;
  for (int s = 0; s < 2; ++s) {
    json k = nullptr;
    for (int m = 1; m <= cfg.cap_m; ++m) {
      const CommonIndex x{BufferIndex::finite(1), BufferIndex::finite(1), {s, m}};
      if (br.strategy.at(x)) {
        k = m;
        break;
      }
    }
    th[s == 0 ? "k0" : "k1"] = k;
  }
  json rep{{"params", params_json(cfg)},
           {"mode", to_string(cfg.mode)},
           {"responder", responder},
           {"fixed", fixed_source},
           {"iterations", br.vi.iterations},
           {"initial_value", br.initial_value},
           {"thresholds", th}};
  emit(cfg, rep.dump(2) + "\n");
  return 0;
}

int cmd_pbp(const RunConfig& cfg, const std::string& init, int max_rounds, int first_responder) {
  const auto params = cfg.params();
  const CoordinatedLayout layout(cfg.cap_k, cfg.cap_m);
  const auto optimum = solve_coordinated(params, cfg.cap_k, cfg.cap_m, cfg.mode, cfg.tol.value());
  DeviceStrategy a = DeviceStrategy::never(layout), b = DeviceStrategy::never(layout);
  if (init == "optimal") {
    a = component(optimum.table(), 1);
    b = component(optimum.table(), 2);
  } else if (init == "always") {
    a = b = DeviceStrategy::always(layout);
  } else if (init != "never") {
    throw ValidationError("unknown --init '" + init + "' (expected never, always or optimal)");
  }
  PbpOptions opts;
  opts.mode = cfg.mode;
  opts.tol = cfg.tol.value();
  opts.max_rounds = max_rounds;
  opts.first_responder = first_responder;
  const auto rep = pbp_iteration(params, a, b, opts);

  json trace = json::array();
  for (const auto& st : rep.trace) {
    trace.push_back({{"round", st.round},
                     {"responder", st.responder},
                     {"value_before", st.value_before},
                     {"value_after", st.value_after},
                     {"changed", st.changed}});
  }
  json out{{"params", params_json(cfg)},
           {"mode", to_string(cfg.mode)},
           {"init", init},
           {"first_responder", first_responder},
           {"converged", rep.converged},
           {"rounds", rep.rounds},
           {"cycle", rep.cycle ? json{rep.cycle->first, rep.cycle->second} : json(nullptr)},
           {"final_value", rep.final_value},
           {"global_optimum_value", optimum.initial_value()},
           {"trace", trace}};
  emit(cfg, out.dump(2) + "\n");
  std::cerr << (rep.converged ? "converged" : "did not converge") << " after " << rep.rounds << " rounds, value "
            << rep.final_value << " (global optimum " << optimum.initial_value() << ")\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& solver, int horizon, const std::string& episodes_csv) {
  const auto params = cfg.params();
  McOptions mc;
  mc.episodes = cfg.episodes;
  mc.horizon = horizon;
  mc.seed = cfg.seed;
  mc.keep_returns = !episodes_csv.empty();
  EvalReport rep;
  if (solver == "never") {
    rep = evaluate_mc(params, [] { return std::make_unique<IdleController>(); }, SystemSize::kTwoDevices, mc);
  } else if (solver == "greedy") {
    rep = evaluate_mc(params, [] { return std::make_unique<GreedyController>(); }, SystemSize::kTwoDevices, mc);
  } else {
    CompareOptions co;
    co.cap_k = cfg.cap_k;
    co.cap_m = cfg.cap_m;
    co.mode = cfg.mode;
    co.tol = cfg.tol.value();
    co.mc = mc;
    rep = compare_dp_mc(params, parse_solver_choice(solver), co);
  }
  if (!episodes_csv.empty()) write_file(episodes_csv, [&](std::ostream& f) { write_episode_csv(f, rep); });
  emit(cfg, to_json(rep) + "\n");
  std::cerr << "mean " << rep.mean << " +- " << rep.std_error;
  if (rep.dp_reference) {
    std::cerr << ", DP " << *rep.dp_reference << " (" << (rep.within(3.0) ? "within" : "outside")
              << " 3 standard errors + tail bound)";
  }
  std::cerr << '\n';
  return 0;
}

int cmd_oracle_check(const RunConfig& cfg, int length, int horizon) {
  const auto params = cfg.params();
  json out{{"params", params_json(cfg)}};
  json audits = json::array();
  for (const std::optional<int> prior : {std::optional<int>{}, std::optional<int>{0}, std::optional<int>{1}}) {
    const auto a = audit_index_beliefs(params, length, prior);
    audits.push_back({{"prior", prior ? json(*prior) : json("stationary")},
                      {"max_length", length},
                      {"histories", a.histories},
                      {"rejected", a.rejected},
                      {"max_buffer_gap", a.max_buffer_gap},
                      {"max_channel_gap", a.max_channel_gap}});
  }
  out["belief_audit"] = audits;
  const auto ind = check_conditional_independence(params, horizon, ArrivalCoupling::kIndependent);
  const auto cor = check_conditional_independence(params, horizon, ArrivalCoupling::kShared);
  out["independence"] = {{"horizon", horizon},
                         {"independent_gap", ind.max_gap},
                         {"shared_arrival_gap", cor.max_gap},
                         {"histories", ind.histories}};
  emit(cfg, out.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic programs for two-device multiple access with a Markov channel"};
  app.require_subcommand(1);

  Overrides o;
  std::string policy_path, fixed_source = "never", init = "never", solver = "coordinated", episodes_csv;
  std::string strategy_path;
  int region = 12, responder = 1, max_rounds = 50, first_responder = 1, horizon = 0, length = 6, ind_horizon = 6;
  bool with_inf = false;

  auto* sc = app.add_subcommand("solve-centralized", "Single-device thresholds (k0, k1)");
  add_common_flags(*sc, o);
  sc->add_option("--policy", policy_path, "Write the policy and values as CSV");

  auto* rt = app.add_subcommand("reproduce-table1", "All 20 reference cells in both recursion modes");
  add_common_flags(*rt, o);

  auto* sd = app.add_subcommand("solve-decentralized", "Coordinator DP and reference pattern check");
  add_common_flags(*sd, o);
  sd->add_option("--policy", policy_path, "Write the prescription policy and values as CSV");
  sd->add_option("--region", region, "Check k, l, m <= region");
  sd->add_flag("--include-infinity", with_inf, "Also check the k = inf and l = inf rows");

  auto* br = app.add_subcommand("best-response", "Best response against a fixed partner");
  add_common_flags(*br, o);
  br->add_option("--fixed", fixed_source, "never, always, optimal, or a k,l,s,m,d CSV file");
  br->add_option("--responder", responder, "Responding device")->check(CLI::IsMember({1, 2}));
  br->add_option("--strategy-out", strategy_path, "Write the best response as k,l,s,m,d CSV");

  auto* pb = app.add_subcommand("pbp", "Alternating best responses");
  add_common_flags(*pb, o);
  pb->add_option("--init", init, "never, always or optimal");
  pb->add_option("--max-rounds", max_rounds, "Round limit")->check(CLI::PositiveNumber);
  pb->add_option("--first-responder", first_responder, "Device that responds first")->check(CLI::IsMember({1, 2}));

  auto* sm = app.add_subcommand("simulate", "Monte Carlo evaluation against the DP value");
  add_common_flags(*sm, o);
  sm->add_option("--solver", solver, "centralized, coordinated, pbp, never or greedy");
  sm->add_option("--horizon", horizon, "Episode length (0 = smallest T with beta^T <= 1e-4)")
      ->check(CLI::NonNegativeNumber);
  sm->add_option("--episodes-csv", episodes_csv, "Write per-episode returns");

  auto* oc = app.add_subcommand("oracle-check", "Belief index arithmetic against brute-force Bayes");
  add_common_flags(*oc, o);
  oc->add_option("--length", length, "Longest history for the belief audit")->check(CLI::Range(0, 7));
  oc->add_option("--horizon", ind_horizon, "Longest history for the independence check")->check(CLI::Range(0, 7));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig cfg = resolve(o);
    if (sc->parsed()) return cmd_solve_centralized(cfg, policy_path);
    if (rt->parsed()) return cmd_reproduce_table1(cfg);
    if (sd->parsed()) return cmd_solve_decentralized(cfg, policy_path, region, with_inf);
    if (br->parsed()) return cmd_best_response(cfg, fixed_source, responder, strategy_path);
    if (pb->parsed()) return cmd_pbp(cfg, init, max_rounds, first_responder);
    if (sm->parsed()) return cmd_simulate(cfg, solver, horizon, episodes_csv);
    if (oc->parsed()) return cmd_oracle_check(cfg, length, ind_horizon);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
