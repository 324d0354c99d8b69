#pragma once

#include <string_view>

namespace macdp {

/// Which failure-branch bookkeeping the belief-space DPs use.
///
/// kAsPrinted follows the published recursions literally. kBayesConsistent
/// sends every branch to the posterior actually implied by the observation
/// model; the two differ only where a failed transmission is observed.
enum class RecursionMode { kAsPrinted, kBayesConsistent };

/// "printed" / "bayes".
std::string_view to_string(RecursionMode mode);
/// Accepts "printed" or "bayes"; throws ValidationError otherwise.
RecursionMode parse_recursion_mode(std::string_view text);

}  // namespace macdp
