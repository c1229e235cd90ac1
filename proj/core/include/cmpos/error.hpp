#ifndef CMPOS_ERROR_HPP
#define CMPOS_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmpos {

/// Malformed input data. `line` is 1-based; 0 when the error is not
/// addressable by line (e.g. a structural problem in a JSON model).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                                : message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A persisted model carries an unknown format tag or version.
class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmpos

#endif  // CMPOS_ERROR_HPP
