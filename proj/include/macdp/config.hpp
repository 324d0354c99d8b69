#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "macdp/channel_model.hpp"
#include "macdp/recursion_mode.hpp"

namespace macdp {

/// A real number kept as the decimal text it was written in, so configs
/// round-trip without binary float drift.
class Decimal {
 public:
  Decimal() : Decimal("0") {}
  /// Throws ValidationError unless text is a plain decimal such as "0.3",
  /// "-2", "1e-10".
  explicit Decimal(std::string text);
  static Decimal of(double value);

  const std::string& text() const { return text_; }
  double value() const { return value_; }
  bool operator==(const Decimal& o) const { return text_ == o.text_; }

 private:
  std::string text_;
  double value_ = 0.0;
};

struct RunConfig {
  Decimal p1{"0.3"};
  Decimal p2{"0.3"};
  Decimal alpha0{"0.75"};
  Decimal alpha1{"0.75"};
  Decimal c{"0.3"};
  Decimal r{"1"};
  Decimal beta{"0.9"};
  int cap_k = 60;
  int cap_m = 60;
  RecursionMode mode = RecursionMode::kBayesConsistent;
  Decimal tol{"1e-10"};
  std::uint64_t seed = 1;
  int episodes = 200000;
  std::string out;

  ModelParams params() const;
  /// Same ranges as ModelParams plus caps >= 2, tol > 0, episodes >= 1.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Flat `key = value` lines; `#` starts a comment. Unknown keys are errors.
/// Missing keys keep their defaults.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
void write_config(std::ostream& os, const RunConfig& cfg);
void save_config(const std::string& path, const RunConfig& cfg);

/// Applies one `key`, `value` pair (shared by the file parser and the CLI).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace macdp
