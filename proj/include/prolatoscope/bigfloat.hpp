#pragma once

// Extended-precision scalar type and the (mantissa, decimal exponent)
// representation used to carry eigenvalues far below double range.

#include <boost/multiprecision/mpfr.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "errors.hpp"

namespace prolatoscope {

using BigFloat = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>>;

inline int precision_bits_to_digits10(int bits) {
  return int(std::ceil(bits * 0.3010299956639812)) + 1;
}

// Scoped default-precision switch for BigFloat temporaries.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(int bits) : saved_(BigFloat::default_precision()) {
    if (bits < 64) throw config_error("precision_bits must be at least 64");
    BigFloat::default_precision(precision_bits_to_digits10(bits));
  }
  ~PrecisionGuard() { BigFloat::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

// value = mantissa * 10^exponent10 with mantissa in [1,10); spans magnitudes
// (10^-300 and far below) that a bare double cannot hold.
struct DecFloat {
  double mantissa = 0.0;
  long exponent10 = 0;

  double to_double() const {
    // strtod on the decimal form gives the correctly rounded double,
    // flushing to subnormal/zero when the exponent is below double range
    const std::string s = str();
    return std::strtod(s.c_str(), nullptr);
  }

  double log10_value() const { return std::log10(mantissa) + double(exponent10); }

  std::string str() const {
    char mb[40];
    auto res = std::to_chars(mb, mb + sizeof(mb), mantissa, std::chars_format::fixed, 16);
    char eb[16];
    std::snprintf(eb, sizeof(eb), "e%+03ld", exponent10);
    return std::string(mb, res.ptr) + eb;
  }

  static DecFloat from_big(const BigFloat& v) {
    if (v <= 0) throw numeric_error("DecFloat::from_big: value must be positive");
    long e = static_cast<long>(floor(log10(v)).convert_to<long long>());
    BigFloat m = v / pow(BigFloat(10), e);
    double md = m.convert_to<double>();
    if (md >= 10.0) {
      md /= 10.0;
      ++e;
    } else if (md < 1.0) {
      md *= 10.0;
      --e;
    }
    return DecFloat{md, e};
  }

  static DecFloat parse(const std::string& text) {
    auto epos = text.find_first_of("eE");
    if (epos == std::string::npos)
      throw numeric_error("DecFloat::parse: missing exponent in '" + text + "'");
    char* end = nullptr;
    double m = std::strtod(text.substr(0, epos).c_str(), &end);
    long e = std::strtol(text.c_str() + epos + 1, &end, 10);
    if (!(m > 0.0)) throw numeric_error("DecFloat::parse: mantissa must be positive in '" + text + "'");
    while (m >= 10.0) {
      m /= 10.0;
      ++e;
    }
    while (m < 1.0) {
      m *= 10.0;
      --e;
    }
    return DecFloat{m, e};
  }
};

// exact value comparison via the normalized representation
inline bool operator<(const DecFloat& a, const DecFloat& b) {
  if (a.exponent10 != b.exponent10) return a.exponent10 < b.exponent10;
  return a.mantissa < b.mantissa;
}

}  // namespace prolatoscope
