#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace saga {

// Caller broke an operation's documented precondition (dimension mismatch,
// parameter out of range, ...).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what)
      : std::invalid_argument(what) {}
};

// Operation is only defined for two-player two-action games.
class UnsupportedShape : public ContractViolation {
 public:
  explicit UnsupportedShape(const std::string& what) : ContractViolation(what) {}
};

// Payoff ties make a best-response classification ambiguous. Carries the
// cells (joint actions) whose payoffs tie.
class DegenerateGame : public std::runtime_error {
 public:
  DegenerateGame(const std::string& what, std::vector<std::array<int, 2>> cells)
      : std::runtime_error(what), cells_(std::move(cells)) {}
  const std::vector<std::array<int, 2>>& tying_cells() const { return cells_; }

 private:
  std::vector<std::array<int, 2>> cells_;
};

// Numerical failure that must not be silent (solver non-convergence,
// non-finite state, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, long step)
      : NumericalError(what + " at step " + std::to_string(step)), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// Invalid run/experiment configuration (bad learner spec, seat mismatch, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace saga
