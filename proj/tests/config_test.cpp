#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "macdp/config.hpp"
#include "macdp/errors.hpp"

using namespace macdp;

TEST(Decimal, KeepsTextAndValue) {
  EXPECT_EQ(Decimal("0.3").text(), "0.3");
  EXPECT_DOUBLE_EQ(Decimal("0.3").value(), 0.3);
  EXPECT_DOUBLE_EQ(Decimal("1e-10").value(), 1e-10);
  EXPECT_DOUBLE_EQ(Decimal("-2").value(), -2.0);
  EXPECT_DOUBLE_EQ(Decimal(".5").value(), 0.5);
  EXPECT_EQ(Decimal::of(0.1).text(), "0.1");
  EXPECT_EQ(Decimal::of(0.1).value(), 0.1);
  for (const char* bad : {"", "abc", "0.3x", "1e", "--1", "0x10", "nan", "inf", "1,5"}) {
    EXPECT_THROW(Decimal{bad}, ValidationError) << bad;
  }
}

TEST(RunConfig, DefaultsAreValid) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  const auto p = cfg.params();
  EXPECT_DOUBLE_EQ(p.p1, 0.3);
  EXPECT_DOUBLE_EQ(p.beta, 0.9);
  EXPECT_DOUBLE_EQ(p.c, 0.3);
}

TEST(RunConfig, RoundTripsThroughText) {
  RunConfig cfg;
  set_config_value(cfg, "p1", "0.15");
  set_config_value(cfg, "alpha1", "0.6");
  set_config_value(cfg, "c", "0.45");
  set_config_value(cfg, "cap_k", "40");
  set_config_value(cfg, "mode", "printed");
  set_config_value(cfg, "tol", "1e-12");
  set_config_value(cfg, "seed", "123456789012");
  set_config_value(cfg, "out", "result.csv");
  std::ostringstream os;
  write_config(os, cfg);
  std::istringstream is(os.str());
  const RunConfig back = parse_config(is);
  EXPECT_EQ(back, cfg);
  EXPECT_EQ(back.mode, RecursionMode::kAsPrinted);
  EXPECT_EQ(back.seed, 123456789012u);
  EXPECT_EQ(back.tol.text(), "1e-12");
}

TEST(RunConfig, ParsesCommentsAndBlankLines) {
  std::istringstream is("# experiment\n\n  c = 0.2   # cheaper\nbeta=0.95\n");
  const auto cfg = parse_config(is);
  EXPECT_EQ(cfg.c.text(), "0.2");
  EXPECT_EQ(cfg.beta.text(), "0.95");
  EXPECT_EQ(cfg.p1.text(), "0.3");
}

TEST(RunConfig, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    std::istringstream is(text);
    try {
      parse_config(is);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("c = 0.2\nwidth = 3\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("c = 0.2\nwidth = 3\n").find("width"), std::string::npos);
  EXPECT_NE(message("c 0.2\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("\n\ncap_k = 2.5\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("mode = exact\n").find("line 1"), std::string::npos);
}

TEST(RunConfig, ValidateRejectsOutOfRange) {
  RunConfig cfg;
  cfg.beta = Decimal("1");
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.cap_m = 1;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.tol = Decimal("0");
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.episodes = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(RunConfig, SaveAndLoad) {
  const auto path = std::filesystem::temp_directory_path() / "macdp_config_test.cfg";
  RunConfig cfg;
  cfg.episodes = 77;
  cfg.p2 = Decimal("0.25");
  save_config(path.string(), cfg);
  EXPECT_EQ(load_config(path.string()), cfg);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), ValidationError);
}
