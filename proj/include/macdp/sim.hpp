#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "macdp/channel_model.hpp"
#include "macdp/pbp.hpp"
#include "macdp/recursion_mode.hpp"

namespace macdp {

struct EvalReport {
  double mean = 0.0;
  double std_error = 0.0;
  int episodes = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  /// beta^horizon * max(r, 2c) / (1 - beta): bound on the bias from
  /// truncating the infinite-horizon sum.
  double tail_bound = 0.0;
  std::optional<double> dp_reference;
  /// Filled only when requested.
  std::vector<double> episode_returns;

  /// |mean - dp_reference| <= k * std_error + tail_bound.
  bool within(double k) const;
};

std::string to_json(const EvalReport& report, int indent = 2);
/// `episode,return`
void write_episode_csv(std::ostream& os, const EvalReport& report);

/// Smallest T with beta^T <= tol (88 for beta = 0.9, tol = 1e-4).
int default_horizon(double beta, double tol = 1e-4);

using ControllerFactory = std::function<std::unique_ptr<Controller>()>;

struct McOptions {
  int episodes = 200000;
  int horizon = 0;  ///< 0 selects default_horizon(beta)
  std::uint64_t seed = 1;
  bool keep_returns = false;
};

/// Mean of sum_{t < horizon} beta^t R_t over independent episodes. Episode e
/// runs on stream CounterRng(seed).split(e), so results do not depend on
/// evaluation order. Sums are compensated.
EvalReport evaluate_mc(const ModelParams& params, const ControllerFactory& factory, SystemSize size,
                       const McOptions& opts = {});

enum class SolverChoice { kCentralized, kCoordinated, kPbp };
std::string to_string(SolverChoice choice);
SolverChoice parse_solver_choice(const std::string& text);

struct CompareOptions {
  int cap_k = 60;
  int cap_m = 60;
  RecursionMode mode = RecursionMode::kBayesConsistent;
  double tol = 1e-10;
  McOptions mc;
  /// kPbp starts from (never, never).
  int pbp_max_rounds = 50;
};

/// Solves, decentralizes when needed, simulates and attaches the DP value at
/// the synchronization point. kCentralized simulates the one-device system
/// with arrival rate p1.
EvalReport compare_dp_mc(const ModelParams& params, SolverChoice choice, const CompareOptions& opts = {});

}  // namespace macdp
