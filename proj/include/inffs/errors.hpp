#pragma once

#include <stdexcept>
#include <string>

namespace inffs {

/// Base class for all errors thrown by the library.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File access or data-format problems (missing files, parse failures).
class io_error : public error {
 public:
  explicit io_error(const std::string& msg) : error(msg) {}
};

/// Invalid parameters or inconsistent configuration supplied by the caller.
class usage_error : public error {
 public:
  explicit usage_error(const std::string& msg) : error(msg) {}
};

/// Degenerate numerical input or a failed numerical procedure
/// (all-zero graph, non-convergence, diverging optimizer).
class numeric_error : public error {
 public:
  explicit numeric_error(const std::string& msg) : error(msg) {}
};

}  // namespace inffs
