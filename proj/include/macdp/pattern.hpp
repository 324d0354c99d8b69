#pragma once

#include <optional>
#include <string>
#include <vector>

#include "macdp/belief.hpp"
#include "macdp/coordinated.hpp"

namespace macdp {

/// Closed-form descriptions of coordination laws on one (s, m) slice.
///
///   kIdle   (0,0) everywhere
///   kD      d(k,l):    the device with the larger index transmits
///   kDBar   dbar(k,l): the device with the smaller index transmits
///   kH      h_n:       (1,1) on S_n = {(k,1) : k <= n} u {(1,l) : l <= n}, else d
///   kHHat   hhat_n:    (0,0) on {(k,l) : max(k,l) <= n}, else d
///
/// For d and dbar, k = l admits either (1,0) or (0,1).
enum class PatternKind { kIdle, kD, kDBar, kH, kHHat };

struct Pattern {
  PatternKind kind = PatternKind::kD;
  /// Parameter of h_n / hhat_n; may be infinity.
  BufferIndex n = BufferIndex::finite(1);
  bool operator==(const Pattern&) const = default;
};

/// Prescriptions the pattern allows at (k, l): one, or two on a d/dbar tie.
std::vector<Prescription> allowed_prescriptions(const Pattern& pattern, BufferIndex k, BufferIndex l);

/// Applies to channel indices (s, m) with m_lo <= m <= m_hi (m_hi empty means
/// unbounded).
struct PatternSlice {
  int s = 0;
  int m_lo = 1;
  std::optional<int> m_hi;
  Pattern pattern;
  bool covers(ChannelIndex ch) const { return ch.s == s && ch.m >= m_lo && (!m_hi || ch.m <= *m_hi); }
  bool operator==(const PatternSlice&) const = default;
};

/// First matching slice wins; `otherwise` covers the rest.
struct PatternSpec {
  std::string name;
  std::vector<PatternSlice> slices;
  Pattern otherwise;

  const Pattern& at(ChannelIndex ch) const;
  bool operator==(const PatternSpec&) const = default;
};

/// States checked by match_pattern: finite k, l <= max_buffer, m <= max_m,
/// plus the k = inf / l = inf rows when include_infinity is set.
struct PatternRegion {
  int max_buffer = 12;
  int max_m = 12;
  bool include_infinity = false;
};

struct PatternMismatch {
  CommonIndex at;
  Prescription got;
  std::vector<Prescription> expected;
};

struct PatternMatch {
  bool matched = true;
  std::size_t checked = 0;
  std::vector<PatternMismatch> mismatches;
};

PatternMatch match_pattern(const PrescriptionTable& table, const PatternSpec& spec, const PatternRegion& region = {});

/// A coordination law realizing `spec` on the whole layout (ties resolved
/// toward (1,0)).
PrescriptionTable table_from_spec(const CoordinatedLayout& layout, const PatternSpec& spec);

/// Compact text forms: "idle", "d", "dbar", "h(5)", "hhat(1)", "h(inf)".
std::string to_string(const Pattern& pattern);
Pattern parse_pattern(const std::string& text);
std::string to_string(Prescription d);

}  // namespace macdp
