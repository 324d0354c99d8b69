#pragma once

#include <stdexcept>
#include <string>

namespace macdp {

/// Malformed input: bad parameters, an MDP whose rows do not sum to one, an
/// unparsable config file.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A caller broke an operation's precondition at run time, e.g. a strategy
/// asked an empty buffer to transmit.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace macdp
