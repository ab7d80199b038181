#pragma once

#include <stdexcept>
#include <string>

namespace scsp {

/// Argument outside the mathematical domain of an operation (negative scale,
/// empty kernel, point outside an image, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Derivative order outside the range for which closed forms are provided.
class unsupported_order : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Variance of a kernel whose coefficients sum to zero.
class undefined_variance : public domain_error {
 public:
  using domain_error::domain_error;
};

namespace detail {

inline void require(bool condition, const std::string& what) {
  if (!condition) throw domain_error(what);
}

inline void require_order(int alpha, int lo, int hi, const char* what) {
  if (alpha < lo || alpha > hi) {
    throw unsupported_order(std::string(what) + ": order " + std::to_string(alpha) +
                            " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace detail
}  // namespace scsp
