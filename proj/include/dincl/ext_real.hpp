#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dincl {

/// Extended real value: a finite double or one of +inf / -inf.
/// The indeterminate sum (+inf) + (-inf) is rejected, never produced silently.
class ExtReal {
 public:
  ExtReal() : v_(0.0) {}
  ExtReal(double v) : v_(v) {
    if (std::isnan(v)) throw std::invalid_argument("ExtReal: NaN is not an extended real");
  }

  static ExtReal plus_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static ExtReal minus_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  bool finite() const { return std::isfinite(v_); }
  bool is_plus_inf() const { return std::isinf(v_) && v_ > 0; }
  bool is_minus_inf() const { return std::isinf(v_) && v_ < 0; }

  /// Finite value; throws on infinities.
  double value() const {
    if (!finite()) throw std::domain_error("ExtReal: value() on infinite value");
    return v_;
  }
  /// Raw double, infinities allowed.
  double raw() const { return v_; }

  ExtReal operator-() const { return ExtReal(-v_); }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if ((a.is_plus_inf() && b.is_minus_inf()) || (a.is_minus_inf() && b.is_plus_inf()))
      throw std::domain_error("ExtReal: (+inf) + (-inf) is indeterminate");
    return ExtReal(a.v_ + b.v_);
  }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

  friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
  friend bool operator>(ExtReal a, ExtReal b) { return a.v_ > b.v_; }
  friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }
  friend bool operator>=(ExtReal a, ExtReal b) { return a.v_ >= b.v_; }
  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }

  friend std::ostream& operator<<(std::ostream& os, ExtReal a) {
    if (a.is_plus_inf()) return os << "+inf";
    if (a.is_minus_inf()) return os << "-inf";
    return os << a.v_;
  }

 private:
  double v_;
};

}  // namespace dincl
