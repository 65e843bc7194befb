#pragma once

#include <stdexcept>
#include <string>

namespace mdpf {

// Invalid user-supplied parameters or inputs (exit code 1 at the CLI).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Two particles closer than the potential table's lower bound. The pair
// potential is meaningless there, so the run cannot continue.
class ModelBreakdown : public std::runtime_error {
 public:
  ModelBreakdown(std::size_t i, std::size_t j, double r)
      : std::runtime_error("model breakdown: particles " + std::to_string(i) + " and " +
                           std::to_string(j) + " at distance " + std::to_string(r)),
        first(i),
        second(j),
        distance(r) {}

  std::size_t first;
  std::size_t second;
  double distance;
};

// Malformed, truncated or unsupported file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure that could not produce a result (rank deficiency,
// missing interface, non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdpf
