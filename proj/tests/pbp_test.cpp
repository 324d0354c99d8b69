#include <gtest/gtest.h>

#include <sstream>

#include "macdp/centralized.hpp"
#include "macdp/errors.hpp"
#include "macdp/io.hpp"
#include "macdp/pbp.hpp"

using namespace macdp;

namespace {

constexpr int kCap = 30;

ModelParams params_with(double p, double c) {
  ModelParams m;
  m.p1 = m.p2 = p;
  m.c = c;
  return m;
}

}  // namespace

TEST(DeviceStrategy, ComponentsCombineBack) {
  const CoordinatedLayout layout(4, 4);
  PolicyTable actions(layout.size());
  for (StateId id = 0; id < actions.size(); ++id) actions[id] = id % 4;
  const PrescriptionTable table(layout, actions);
  const auto a = component(table, 1), b = component(table, 2);
  EXPECT_EQ(combine(a, b), table);
  EXPECT_EQ(a.at(StateId{1}), 1);
  EXPECT_EQ(b.at(StateId{1}), 0);
  EXPECT_THROW(combine(a, DeviceStrategy::never(CoordinatedLayout(5, 4))), ValidationError);
  EXPECT_THROW(DeviceStrategy(layout, std::vector<std::uint8_t>(3, 0)), ValidationError);
  EXPECT_THROW(DeviceStrategy(layout, std::vector<std::uint8_t>(layout.size(), 2)), ValidationError);
}

TEST(BestResponse, AgainstSilentPartnerIsTheSingleDeviceThreshold) {
  for (double c : {0.2, 0.5}) {
    const ModelParams m = params_with(0.1, c);
    const CoordinatedLayout layout(kCap, kCap);
    const auto br = best_response(m, DeviceStrategy::never(layout), 1);
    const auto single = solve_centralized(m, kCap);
    ASSERT_TRUE(single.thresholds.k0 && single.thresholds.k1);
    for (StateId id = 0; id < layout.size(); ++id) {
      const auto x = layout.state(id);
      const int k_s = x.channel.s ? *single.thresholds.k1 : *single.thresholds.k0;
      ASSERT_EQ(br.strategy.at(id), x.channel.m >= k_s ? 1 : 0) << "c=" << c << " id=" << id;
    }
    EXPECT_NEAR(br.initial_value, single.initial_value(), 1e-8);
  }
}

TEST(BestResponse, OptimumIsAFixedPoint) {
  const ModelParams m = params_with(0.3, 0.3);
  const auto opt = solve_coordinated(m, kCap, kCap, RecursionMode::kBayesConsistent);
  const auto table = opt.table();
  for (int responder : {1, 2}) {
    const auto partner = component(table, 3 - responder);
    const auto br = best_response(m, partner, responder);
    for (StateId id = 0; id < opt.layout.size(); ++id) {
      ASSERT_LE(br.vi.values[id] - opt.vi.values[id], 1e-9) << "responder " << responder << " id " << id;
    }
    EXPECT_NEAR(br.initial_value, opt.initial_value(), 1e-9);
  }
  const auto pv = pair_value(m, component(table, 1), component(table, 2), RecursionMode::kBayesConsistent);
  EXPECT_NEAR(synchronized_value(m, opt.layout, pv.values), opt.initial_value(), 1e-9);
  EXPECT_THROW(best_response(m, component(table, 1), 3), ValidationError);
}

TEST(PbpIteration, FromSilenceIsMonotoneAndEndsAtAFixedPoint) {
  const ModelParams m = params_with(0.3, 0.3);
  const CoordinatedLayout layout(kCap, kCap);
  const auto rep = pbp_iteration(m, DeviceStrategy::never(layout), DeviceStrategy::never(layout));
  ASSERT_TRUE(rep.converged);
  EXPECT_FALSE(rep.cycle);
  ASSERT_FALSE(rep.trace.empty());
  EXPECT_EQ(rep.trace.front().value_before, 0.0);
  for (const auto& step : rep.trace) EXPECT_GE(step.value_after, step.value_before - 1e-9);
  EXPECT_FALSE(rep.trace.back().changed);
  EXPECT_FALSE(rep.trace[rep.trace.size() - 2].changed);

  const auto opt = solve_coordinated(m, kCap, kCap, RecursionMode::kBayesConsistent);
  EXPECT_LE(rep.final_value, opt.initial_value() + 1e-9);
  EXPECT_GT(rep.final_value, 0.0);
  const auto again = best_response(m, rep.second, 1);
  EXPECT_NEAR(again.initial_value, rep.final_value, 1e-9);
}

TEST(PbpIteration, ExpensiveChannelStopsInOneRound) {
  const ModelParams m = params_with(0.3, 1.0);
  const CoordinatedLayout layout(8, 8);
  const auto rep = pbp_iteration(m, DeviceStrategy::never(layout), DeviceStrategy::never(layout));
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.rounds, 1);
  EXPECT_EQ(rep.first, DeviceStrategy::never(layout));
  EXPECT_NEAR(rep.final_value, 0.0, 1e-12);
}

TEST(PbpIteration, RejectsBadOptions) {
  const CoordinatedLayout layout(4, 4);
  PbpOptions o;
  o.first_responder = 0;
  EXPECT_THROW(pbp_iteration(ModelParams{}, DeviceStrategy::never(layout), DeviceStrategy::never(layout), o),
               ValidationError);
  o = {};
  o.max_rounds = 0;
  EXPECT_THROW(pbp_iteration(ModelParams{}, DeviceStrategy::never(layout), DeviceStrategy::never(layout), o),
               ValidationError);
}

TEST(StrategyCsv, RoundTripAndCoverage) {
  const CoordinatedLayout layout(5, 4);
  std::vector<std::uint8_t> bits(layout.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (i * 7 + 3) % 5 < 2;
  const DeviceStrategy s(layout, bits);
  std::ostringstream os;
  write_strategy_csv(os, s);
  std::istringstream is(os.str());
  EXPECT_EQ(read_strategy_csv(is, layout), s);
  EXPECT_NE(os.str().find("inf,"), std::string::npos);

  // Drop the last row: incomplete.
  std::string text = os.str();
  text.erase(text.rfind('\n', text.size() - 2) + 1);
  std::istringstream short_is(text);
  EXPECT_THROW(read_strategy_csv(short_is, layout), ValidationError);
  // Duplicate a row.
  std::istringstream dup_is(os.str() + "1,1,0,1,0\n");
  EXPECT_THROW(read_strategy_csv(dup_is, layout), ValidationError);
}
