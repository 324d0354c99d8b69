#include "macdp/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>

#include "macdp/errors.hpp"

namespace macdp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(key + ": not an integer: '" + text + "'");
  }
  return v;
}

}  // namespace

Decimal::Decimal(std::string text) : text_(std::move(text)) {
  static const std::regex re(R"(-?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?)");
  if (!std::regex_match(text_, re)) throw ValidationError("not a decimal number: '" + text_ + "'");
  value_ = std::strtod(text_.c_str(), nullptr);
}

Decimal Decimal::of(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return Decimal(std::string(buf, res.ptr));
}

ModelParams RunConfig::params() const {
  ModelParams p;
  p.p1 = p1.value();
  p.p2 = p2.value();
  p.alpha0 = alpha0.value();
  p.alpha1 = alpha1.value();
  p.c = c.value();
  p.r = r.value();
  p.beta = beta.value();
  return p;
}

void RunConfig::validate() const {
  params().validate();
  if (cap_k < 2 || cap_m < 2) throw ValidationError("caps must be at least 2");
  if (!(tol.value() > 0.0)) throw ValidationError("tol must be positive");
  if (episodes < 1) throw ValidationError("episodes must be at least 1");
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "p1") cfg.p1 = Decimal(value);
  else if (key == "p2") cfg.p2 = Decimal(value);
  else if (key == "alpha0") cfg.alpha0 = Decimal(value);
  else if (key == "alpha1") cfg.alpha1 = Decimal(value);
  else if (key == "c") cfg.c = Decimal(value);
  else if (key == "r") cfg.r = Decimal(value);
  else if (key == "beta") cfg.beta = Decimal(value);
  else if (key == "cap_k") cfg.cap_k = parse_int<int>(key, value);
  else if (key == "cap_m") cfg.cap_m = parse_int<int>(key, value);
  else if (key == "mode") cfg.mode = parse_recursion_mode(value);
  else if (key == "tol") cfg.tol = Decimal(value);
  else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(key, value);
  else if (key == "episodes") cfg.episodes = parse_int<int>(key, value);
  else if (key == "out") cfg.out = value;
  else throw ValidationError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(line) + ": expected key = value");
    try {
      set_config_value(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    } catch (const ValidationError& e) {
      throw ValidationError("config line " + std::to_string(line) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& os, const RunConfig& cfg) {
  os << "p1 = " << cfg.p1.text() << '\n'
     << "p2 = " << cfg.p2.text() << '\n'
     << "alpha0 = " << cfg.alpha0.text() << '\n'
     << "alpha1 = " << cfg.alpha1.text() << '\n'
     << "c = " << cfg.c.text() << '\n'
     << "r = " << cfg.r.text() << '\n'
     << "beta = " << cfg.beta.text() << '\n'
     << "cap_k = " << cfg.cap_k << '\n'
     << "cap_m = " << cfg.cap_m << '\n'
     << "mode = " << to_string(cfg.mode) << '\n'
     << "tol = " << cfg.tol.text() << '\n'
     << "seed = " << cfg.seed << '\n'
     << "episodes = " << cfg.episodes << '\n';
  if (!cfg.out.empty()) os << "out = " << cfg.out << '\n';
}

void save_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write config '" + path + "'");
  write_config(os, cfg);
}

}  // namespace macdp
