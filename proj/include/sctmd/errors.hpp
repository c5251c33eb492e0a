#pragma once

#include <stdexcept>
#include <string>

namespace sctmd {

/// Malformed input: config files, data tables, containers, out-of-range queries.
/// The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver or kernel produced an unusable result (divergence, zero fluence).
/// The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sctmd
