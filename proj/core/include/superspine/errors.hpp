#pragma once

#include <stdexcept>
#include <string>

namespace superspine {

//! Invalid configuration (maps to CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

//! A rejection sampler ran out of budget (maps to CLI exit status 3).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double acceptance_rate, std::size_t attempts)
      : std::runtime_error(what + " (acceptance " + std::to_string(acceptance_rate) +
                           " after " + std::to_string(attempts) + " attempts)"),
        acceptance_rate_(acceptance_rate),
        attempts_(attempts) {}
  double acceptance_rate() const noexcept { return acceptance_rate_; }
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  double acceptance_rate_;
  std::size_t attempts_;
};

//! A numerical scheme failed its own consistency checks.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace superspine
