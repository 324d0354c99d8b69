#include "macdp/recursion_mode.hpp"

#include <string>

#include "macdp/errors.hpp"

namespace macdp {

std::string_view to_string(RecursionMode mode) {
  return mode == RecursionMode::kAsPrinted ? "printed" : "bayes";
}

RecursionMode parse_recursion_mode(std::string_view text) {
  if (text == "printed") return RecursionMode::kAsPrinted;
  if (text == "bayes") return RecursionMode::kBayesConsistent;
  throw ValidationError("unknown recursion mode '" + std::string(text) + "' (expected printed|bayes)");
}

}  // namespace macdp
