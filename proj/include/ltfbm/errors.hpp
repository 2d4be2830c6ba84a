#pragma once

#include <stdexcept>
#include <string>

namespace ltfbm {

/// Parameters outside the region where a constant or limit exists
/// (for example 2H >= alpha for the Gaussian-MGF growth constant).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed arguments: bad intervals, empty grids, inconsistent sizes.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested evaluation point falls outside the sampled range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Numerical procedure stopped before reaching its tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Maximizer of a numerical Legendre transform sits on the search window edge.
class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ltfbm
