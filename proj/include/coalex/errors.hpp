#pragma once

#include <stdexcept>
#include <string>

namespace coalex {

// Malformed or unusable input data (bad CSV, missing column, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid run configuration (unknown method, bad flag combination, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request would exceed a hard computational cap, e.g. the attribute
// count allowed for exhaustive subset enumeration.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coalex
