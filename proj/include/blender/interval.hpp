#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace blender {

// Closed interval with outward rounding: every operation is evaluated in
// round-to-nearest and then widened by one ulp on each side, which covers
// the at-most-half-ulp error of a correctly rounded IEEE operation.
class Interval {
 public:
  Interval() = default;
  Interval(double v) : lo_(v), hi_(v) { check(); }  // NOLINT(implicit)
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    check();
    if (lo_ > hi_) throw std::invalid_argument("interval with lo > hi");
  }

  static Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }
  // a +- r, both ends rounded outward.
  static Interval around(double a, double r) { return Interval(down(a - r), up(a + r)); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const { return 0.5 * lo_ + 0.5 * hi_; }
  double width() const { return hi_ - lo_; }
  double rad() const { return 0.5 * (hi_ - lo_); }
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  double mig() const {
    if (lo_ <= 0.0 && hi_ >= 0.0) return 0.0;
    return std::min(std::fabs(lo_), std::fabs(hi_));
  }

  bool contains(double v) const { return lo_ <= v && v <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool subset_of(const Interval& o) const { return o.lo_ <= lo_ && hi_ <= o.hi_; }
  bool interior_of(const Interval& o) const { return o.lo_ < lo_ && hi_ < o.hi_; }
  bool disjoint(const Interval& o) const { return hi_ < o.lo_ || o.hi_ < lo_; }
  bool certainly_pos() const { return lo_ > 0.0; }
  bool certainly_neg() const { return hi_ < 0.0; }

  friend Interval operator+(const Interval& a, const Interval& b) {
    return Interval(down(a.lo_ + b.lo_), up(a.hi_ + b.hi_));
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    return Interval(down(a.lo_ - b.hi_), up(a.hi_ - b.lo_));
  }
  friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }
  friend Interval operator*(const Interval& a, const Interval& b) {
    if (is_point_zero(a) || is_point_zero(b)) return Interval(0.0);
    double p[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
    return Interval(down(*std::min_element(p, p + 4)), up(*std::max_element(p, p + 4)));
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw std::domain_error("interval division by an interval containing zero");
    double p[4] = {a.lo_ / b.lo_, a.lo_ / b.hi_, a.hi_ / b.lo_, a.hi_ / b.hi_};
    return Interval(down(*std::min_element(p, p + 4)), up(*std::max_element(p, p + 4)));
  }
  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }

  friend Interval sqr(const Interval& a) {
    double l = a.mig(), h = a.mag();
    if (l == 0.0) return Interval(0.0, up(h * h));
    return Interval(std::max(0.0, down(l * l)), up(h * h));
  }
  // Square root of the non-negative part; an interval entirely below zero is an error.
  friend Interval sqrt(const Interval& a) {
    if (a.hi_ < 0.0) throw std::domain_error("interval sqrt of a negative interval");
    double l = a.lo_ <= 0.0 ? 0.0 : std::max(0.0, down(std::sqrt(a.lo_)));
    return Interval(l, up(std::sqrt(a.hi_)));
  }
  friend Interval abs(const Interval& a) { return Interval(a.mig(), a.mag()); }
  friend Interval max(const Interval& a, const Interval& b) {
    return Interval(std::max(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
  }
  friend Interval join(const Interval& a, const Interval& b) {
    return Interval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
  }

  std::string str() const;

 private:
  static double down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
  static double up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }
  static bool is_point_zero(const Interval& a) { return a.lo_ == 0.0 && a.hi_ == 0.0; }
  void check() const {
    if (std::isnan(lo_) || std::isnan(hi_)) throw std::invalid_argument("NaN interval endpoint");
  }

  double lo_ = 0.0, hi_ = 0.0;
};

// Intersection; the caller must know the two intervals overlap.
inline Interval meet(const Interval& a, const Interval& b) {
  if (a.disjoint(b)) throw std::domain_error("meet of disjoint intervals");
  return Interval(std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

}  // namespace blender
