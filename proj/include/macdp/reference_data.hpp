#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "macdp/channel_model.hpp"
#include "macdp/pattern.hpp"

namespace macdp {

/// One cell of the single-device threshold grid.
struct ThresholdCell {
  double p = 0.0;
  double c = 0.0;
  int k0 = 0;
  int k1 = 0;
};

struct ThresholdReference {
  ModelParams base;  ///< beta, alpha0, alpha1, r; p and c come from the cells
  std::vector<ThresholdCell> cells;
};

struct PatternReference {
  double c = 0.0;
  PatternSpec spec;
};

struct PatternReferenceSet {
  ModelParams base;  ///< every field except c
  std::vector<PatternReference> specs;

  /// The spec whose parameters equal `params` (1e-12), if any.
  const PatternReference* find(const ModelParams& params) const;
};

/// Parsers for the data files shipped under data/. Throw ValidationError on
/// malformed input.
ThresholdReference parse_threshold_reference(std::string_view text);
PatternReferenceSet parse_pattern_reference(std::string_view text);

/// The copies compiled into the library.
const ThresholdReference& threshold_reference();
const PatternReferenceSet& pattern_reference();

}  // namespace macdp
