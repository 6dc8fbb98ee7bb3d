#pragma once

#include <stdexcept>
#include <string>

namespace hyperperc {

// Bad input: wrong dimensions, out-of-range parameters, malformed configs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A post-condition that the library re-verifies before returning failed.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Size or sample-count guard tripped.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace hyperperc
