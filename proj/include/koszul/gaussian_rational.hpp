#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace koszul {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Exact element a + b*i of Q(i).  mpq_rational keeps numerator/denominator
/// coprime with positive denominator, so values are always reduced.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long v) : re_(v) {}  // NOLINT: implicit on purpose
  GaussianRational(Rational re) : re_(std::move(re)) {}
  GaussianRational(Rational re, Rational im)
      : re_(std::move(re)), im_(std::move(im)) {}
  static GaussianRational i() { return {Rational(0), Rational(1)}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_one() const { return re_ == 1 && im_ == 0; }
  bool is_real() const { return im_ == 0; }

  bool operator==(const GaussianRational&) const = default;

  GaussianRational operator-() const { return {Rational(-re_), Rational(-im_)}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    return *this *= o.inv();
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

  GaussianRational conj() const { return {re_, Rational(-im_)}; }

  Rational norm() const { return re_ * re_ + im_ * im_; }

  GaussianRational inv() const;

  /// Canonical text form, e.g. "0", "-3/2", "i", "-1/2i", "1+2i", "1/2-3/4i".
  std::string str() const;

  /// Parses exactly the forms produced by str() (plus leading '+').
  static std::optional<GaussianRational> parse(std::string_view s);

 private:
  Rational re_{0};
  Rational im_{0};
};

std::ostream& operator<<(std::ostream& os, const GaussianRational& q);

using Q = GaussianRational;

}  // namespace koszul
