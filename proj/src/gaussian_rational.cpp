#include "koszul/gaussian_rational.hpp"

#include <cctype>
#include <ostream>

#include "koszul/errors.hpp"

namespace koszul {

GaussianRational GaussianRational::inv() const {
  Rational n = norm();
  if (n == 0) throw Error("division by zero in Q(i)");
  return {re_ / n, -im_ / n};
}

namespace {

std::string rational_str(const Rational& r) { return r.str(); }

// digits ['/' digits], optionally preceded by a sign already consumed.
bool scan_rational(std::string_view s, size_t& pos, bool negative, Rational& out) {
  size_t start = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos == start) return false;
  BigInt num(std::string(s.substr(start, pos - start)));
  BigInt den(1);
  if (pos < s.size() && s[pos] == '/') {
    ++pos;
    size_t dstart = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == dstart) return false;
    den = BigInt(std::string(s.substr(dstart, pos - dstart)));
    if (den == 0) return false;
  }
  out = Rational(num, den);
  if (negative) out = -out;
  return true;
}

// sign? ( 'i' | rational 'i'? ).  Returns value and whether it was imaginary.
bool scan_part(std::string_view s, size_t& pos, bool sign_required, Rational& value,
               bool& imaginary) {
  bool negative = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    negative = s[pos] == '-';
    ++pos;
  } else if (sign_required) {
    return false;
  }
  if (pos < s.size() && s[pos] == 'i') {
    ++pos;
    value = negative ? Rational(-1) : Rational(1);
    imaginary = true;
    return true;
  }
  if (!scan_rational(s, pos, negative, value)) return false;
  imaginary = false;
  if (pos < s.size() && s[pos] == 'i') {
    ++pos;
    imaginary = true;
  }
  return true;
}

}  // namespace

std::string GaussianRational::str() const {
  if (is_zero()) return "0";
  std::string out;
  if (re_ != 0) out += rational_str(re_);
  if (im_ != 0) {
    std::string imabs = rational_str(im_ < 0 ? Rational(-im_) : im_);
    std::string impart = (imabs == "1") ? "i" : imabs + "i";
    if (im_ < 0)
      out += "-" + impart;
    else if (!out.empty())
      out += "+" + impart;
    else
      out += impart;
  }
  return out;
}

std::optional<GaussianRational> GaussianRational::parse(std::string_view s) {
  if (s.empty()) return std::nullopt;
  size_t pos = 0;
  Rational v1;
  bool imag1 = false;
  if (!scan_part(s, pos, false, v1, imag1)) return std::nullopt;
  if (pos == s.size()) {
    return imag1 ? GaussianRational(Rational(0), v1) : GaussianRational(v1);
  }
  // A second part must be the imaginary one, after a real first part.
  if (imag1) return std::nullopt;
  Rational v2;
  bool imag2 = false;
  if (!scan_part(s, pos, true, v2, imag2)) return std::nullopt;
  if (!imag2 || pos != s.size()) return std::nullopt;
  return GaussianRational(v1, v2);
}

std::ostream& operator<<(std::ostream& os, const GaussianRational& q) {
  return os << q.str();
}

}  // namespace koszul
