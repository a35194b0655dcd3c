#pragma once

#include <stdexcept>
#include <string>

namespace ncres {

// Base class for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error("invalid input: " + what) {}
};

// Numerically singular linear algebra. Carries the smallest singular value estimate.
class SingularError : public Error {
 public:
  SingularError(const std::string& what, double smallest_sv)
      : Error("singular: " + what + " (smallest singular value ~ " + std::to_string(smallest_sv) + ")"),
        smallest_singular_value(smallest_sv) {}
  double smallest_singular_value;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error("no convergence: " + what + " (achieved error " + std::to_string(achieved) + ")"),
        achieved_error(achieved) {}
  double achieved_error;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double dropped)
      : Error("truncation: " + what + " (dropped mass " + std::to_string(dropped) + ")"), dropped_mass(dropped) {}
  double dropped_mass;
};

}  // namespace ncres
