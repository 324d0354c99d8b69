#include "macdp/reference_data.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>

#include "macdp/errors.hpp"

namespace macdp {

namespace embedded {
extern const char* const kThresholdTable;
extern const char* const kPatternTable;
}  // namespace embedded

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double to_double(const std::string& text, int line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0') {
    throw ValidationError("line " + std::to_string(line) + ": not a number: '" + text + "'");
  }
  return v;
}

int to_int(const std::string& text, int line) {
  const double v = to_double(text, line);
  if (v != std::floor(v)) throw ValidationError("line " + std::to_string(line) + ": not an integer: '" + text + "'");
  return static_cast<int>(v);
}

// "key=value key=value ..." after a leading keyword.
std::map<std::string, std::string> key_values(std::istringstream& in, int line) {
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ValidationError("line " + std::to_string(line) + ": expected key=value");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

void apply_params(ModelParams& p, const std::map<std::string, std::string>& kv, int line) {
  for (const auto& [k, v] : kv) {
    const double x = to_double(v, line);
    if (k == "beta") p.beta = x;
    else if (k == "alpha0") p.alpha0 = x;
    else if (k == "alpha1") p.alpha1 = x;
    else if (k == "r") p.r = x;
    else if (k == "c") p.c = x;
    else if (k == "p1") p.p1 = x;
    else if (k == "p2") p.p2 = x;
    else throw ValidationError("line " + std::to_string(line) + ": unknown parameter '" + k + "'");
  }
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }

}  // namespace

ThresholdReference parse_threshold_reference(std::string_view text) {
  ThresholdReference ref;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.rfind("@params", 0) == 0) {
      std::istringstream ls(s.substr(7));
      apply_params(ref.base, key_values(ls, line), line);
      continue;
    }
    if (!header) {
      if (s != "p,c,k0,k1") throw ValidationError("line " + std::to_string(line) + ": expected header p,c,k0,k1");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(s);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(trim(cell));
    if (f.size() != 4) throw ValidationError("line " + std::to_string(line) + ": expected 4 fields");
    ref.cells.push_back({to_double(f[0], line), to_double(f[1], line), to_int(f[2], line), to_int(f[3], line)});
  }
  if (ref.cells.empty()) throw ValidationError("threshold table has no rows");
  return ref;
}

PatternReferenceSet parse_pattern_reference(std::string_view text) {
  PatternReferenceSet set;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  std::optional<PatternReference> open;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    std::istringstream ls(s);
    std::string kw;
    ls >> kw;
    const std::string where = "line " + std::to_string(line) + ": ";
    if (kw == "@params") {
      apply_params(set.base, key_values(ls, line), line);
    } else if (kw == "spec") {
      if (open) throw ValidationError(where + "spec opened before the previous one was closed");
      PatternReference ref;
      ls >> ref.spec.name;
      const auto kv = key_values(ls, line);
      const auto it = kv.find("c");
      if (ref.spec.name.empty() || it == kv.end()) throw ValidationError(where + "expected 'spec <name> c=<cost>'");
      ref.c = to_double(it->second, line);
      open = std::move(ref);
    } else if (kw == "slice") {
      if (!open) throw ValidationError(where + "slice outside a spec");
      std::string s_tok, m_tok, rest;
      ls >> s_tok >> m_tok;
      std::getline(ls, rest);
      PatternSlice slice;
      if (s_tok != "s=0" && s_tok != "s=1") throw ValidationError(where + "expected s=0 or s=1");
      slice.s = s_tok == "s=1" ? 1 : 0;
      const auto dots = m_tok.find("..");
      if (m_tok.rfind("m=", 0) != 0 || dots == std::string::npos) throw ValidationError(where + "expected m=<lo>..<hi>");
      slice.m_lo = to_int(m_tok.substr(2, dots - 2), line);
      const std::string hi = m_tok.substr(dots + 2);
      if (hi != "inf") slice.m_hi = to_int(hi, line);
      slice.pattern = parse_pattern(trim(rest));
      open->spec.slices.push_back(slice);
    } else if (kw == "otherwise") {
      if (!open) throw ValidationError(where + "otherwise outside a spec");
      std::string rest;
      std::getline(ls, rest);
      open->spec.otherwise = parse_pattern(trim(rest));
      set.specs.push_back(std::move(*open));
      open.reset();
    } else {
      throw ValidationError(where + "unknown keyword '" + kw + "'");
    }
  }
  if (open) throw ValidationError("unterminated spec '" + open->spec.name + "'");
  return set;
}

const PatternReference* PatternReferenceSet::find(const ModelParams& p) const {
  const bool same_base = near(p.beta, base.beta) && near(p.alpha0, base.alpha0) && near(p.alpha1, base.alpha1) &&
                         near(p.r, base.r) && near(p.p1, base.p1) && near(p.p2, base.p2);
  if (!same_base) return nullptr;
  for (const auto& s : specs) {
    if (near(s.c, p.c)) return &s;
  }
  return nullptr;
}

const ThresholdReference& threshold_reference() {
  static const ThresholdReference ref = parse_threshold_reference(embedded::kThresholdTable);
  return ref;
}

const PatternReferenceSet& pattern_reference() {
  static const PatternReferenceSet ref = parse_pattern_reference(embedded::kPatternTable);
  return ref;
}

}  // namespace macdp
