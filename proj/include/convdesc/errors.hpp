#pragma once

#include <stdexcept>
#include <string>

namespace convdesc {

// Argument-level failures use std::invalid_argument directly. The types below
// cover failures that come from files or run configuration; the CLI maps each
// to its own exit code.

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace convdesc
