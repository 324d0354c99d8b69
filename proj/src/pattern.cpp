#include "macdp/pattern.hpp"

#include <algorithm>
#include <cctype>

#include "macdp/errors.hpp"

namespace macdp {

namespace {

constexpr Prescription kFirst{1, 0};
constexpr Prescription kSecond{0, 1};

std::vector<Prescription> d_rule(BufferIndex k, BufferIndex l, bool reversed) {
  if (k == l) return {kFirst, kSecond};
  const bool first = (k > l) != reversed;
  return {first ? kFirst : kSecond};
}

}  // namespace

std::vector<Prescription> allowed_prescriptions(const Pattern& pattern, BufferIndex k, BufferIndex l) {
  const BufferIndex one = BufferIndex::finite(1);
  switch (pattern.kind) {
    case PatternKind::kIdle:
      return {{0, 0}};
    case PatternKind::kD:
      return d_rule(k, l, false);
    case PatternKind::kDBar:
      return d_rule(k, l, true);
    case PatternKind::kH:
      if ((l == one && k <= pattern.n) || (k == one && l <= pattern.n)) return {{1, 1}};
      return d_rule(k, l, false);
    case PatternKind::kHHat:
      if (std::max(k, l) <= pattern.n) return {{0, 0}};
      return d_rule(k, l, false);
  }
  return {};
}

const Pattern& PatternSpec::at(ChannelIndex ch) const {
  for (const auto& slice : slices) {
    if (slice.covers(ch)) return slice.pattern;
  }
  return otherwise;
}

PatternMatch match_pattern(const PrescriptionTable& table, const PatternSpec& spec, const PatternRegion& region) {
  const auto& layout = table.layout();
  if (region.max_buffer > layout.cap_k() || region.max_m > layout.cap_m()) {
    throw ValidationError("pattern region exceeds the truncation caps");
  }
  std::vector<BufferIndex> buffers;
  for (int k = 1; k <= region.max_buffer; ++k) buffers.push_back(BufferIndex::finite(k));
  if (region.include_infinity) buffers.push_back(BufferIndex::infinity());

  PatternMatch res;
  for (int s = 0; s < 2; ++s) {
    for (int m = 1; m <= region.max_m; ++m) {
      const ChannelIndex ch{s, m};
      const Pattern& pat = spec.at(ch);
      for (auto k : buffers) {
        for (auto l : buffers) {
          const CommonIndex x{k, l, ch};
          const Prescription got = table.at(x);
          auto ok = allowed_prescriptions(pat, k, l);
          ++res.checked;
          if (std::find(ok.begin(), ok.end(), got) == ok.end()) {
            res.matched = false;
            res.mismatches.push_back({x, got, std::move(ok)});
          }
        }
      }
    }
  }
  return res;
}

PrescriptionTable table_from_spec(const CoordinatedLayout& layout, const PatternSpec& spec) {
  PolicyTable actions(layout.size());
  for (StateId id = 0; id < layout.size(); ++id) {
    const CommonIndex x = layout.state(id);
    actions[id] = action_of(allowed_prescriptions(spec.at(x.channel), x.k, x.l).front());
  }
  return {layout, std::move(actions)};
}

std::string to_string(const Pattern& pattern) {
  const auto arg = [&] { return pattern.n.is_infinite() ? std::string("inf") : std::to_string(pattern.n.k()); };
  switch (pattern.kind) {
    case PatternKind::kIdle: return "idle";
    case PatternKind::kD: return "d";
    case PatternKind::kDBar: return "dbar";
    case PatternKind::kH: return "h(" + arg() + ")";
    case PatternKind::kHHat: return "hhat(" + arg() + ")";
  }
  return "?";
}

Pattern parse_pattern(const std::string& raw) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text += ch;
  }
  if (text == "idle") return {PatternKind::kIdle, BufferIndex::finite(1)};
  if (text == "d") return {PatternKind::kD, BufferIndex::finite(1)};
  if (text == "dbar") return {PatternKind::kDBar, BufferIndex::finite(1)};
  const auto open = text.find('(');
  if (open != std::string::npos && text.back() == ')') {
    const std::string head = text.substr(0, open);
    const std::string arg = text.substr(open + 1, text.size() - open - 2);
    BufferIndex n = BufferIndex::infinity();
    if (arg != "inf") {
      if (arg.empty() || !std::all_of(arg.begin(), arg.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        throw ValidationError("bad pattern argument in '" + raw + "'");
      }
      const int v = std::stoi(arg);
      if (v < 1) throw ValidationError("pattern argument must be >= 1 in '" + raw + "'");
      n = BufferIndex::finite(v);
    }
    if (head == "h") return {PatternKind::kH, n};
    if (head == "hhat") return {PatternKind::kHHat, n};
  }
  throw ValidationError("unknown pattern '" + raw + "'");
}

std::string to_string(Prescription d) {
  return "(" + std::to_string(d.d1) + "," + std::to_string(d.d2) + ")";
}

}  // namespace macdp
