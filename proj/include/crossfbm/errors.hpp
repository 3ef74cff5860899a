#pragma once

#include <stdexcept>
#include <string>

namespace crossfbm {

/// A computation would exceed a configured memory or size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The path cannot support the requested ratio or estimate (e.g. zero crossings).
class DegeneratePathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or inconsistent configuration (e.g. normalization requested without a c_H value).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A resolution guard refused the run; callers may override with force.
class GuardViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crossfbm
