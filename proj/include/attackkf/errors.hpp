#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace attackkf {

/// Invalid configuration or invalid model/parameter input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input data (CSV etc). Carries the 1-based file line when known.
class DataFormatError : public std::runtime_error {
 public:
  DataFormatError(const std::string& msg, long line = -1)
      : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")"
                                     : msg),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Numerical failure (singular covariance etc). Carries the 1-based step
/// index when the failure occurred inside a recursion.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& msg, long step = -1)
      : std::runtime_error(step >= 0 ? msg + " (step " + std::to_string(step) + ")"
                                     : msg),
        step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Accumulates human-readable invariant violations.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string msg) { violations.push_back(std::move(msg)); }
  void merge(const ValidationReport& other) {
    violations.insert(violations.end(), other.violations.begin(),
                      other.violations.end());
  }
  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) {
      out += v;
      out += '\n';
    }
    return out;
  }
};

}  // namespace attackkf
