#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace csvor {

/// Bad input data: malformed files, label ranges, degenerate datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to produce a certified result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters passed to an operation (ranges, dimensions).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using WarningSink = std::function<void(const std::string&)>;

// Warnings go to stderr unless a sink is installed. The sink is process-wide
// and guarded by a mutex, so concurrent runs may warn safely.
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

/// Scoped sink replacement, mostly for tests that assert on warnings.
class ScopedWarningSink {
 public:
  explicit ScopedWarningSink(WarningSink sink);
  ~ScopedWarningSink();
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

 private:
  WarningSink previous_;
};

}  // namespace csvor
