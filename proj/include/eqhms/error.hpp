#pragma once

#include <stdexcept>
#include <string>

namespace eqhms {

// Malformed input: bad JSON, wrong shapes, unparsable literals.  CLI exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematical precondition does not hold (val(lambda) out of range,
// degenerate critical point, non-simplicial fan, ...).  CLI exit code 2.
class HypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace eqhms
