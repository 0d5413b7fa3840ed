#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace steininfo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/* Density values below this floor are treated as zero mass when forming
   ratios such as scores or log-density differences. */
inline constexpr double kDensityFloor = 1e-300;

/* Unbounded integrals are truncated this many standard deviations past the
   mean; beyond that the registered laws carry no representable mass. */
inline constexpr double kSigmaTruncation = 40.0;

// Thrown when an evaluation point lies outside a law's open support.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Thrown when an operation is not available for the given model class.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a numeric routine cannot reach its accuracy contract.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace steininfo
