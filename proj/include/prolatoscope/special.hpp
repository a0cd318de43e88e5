#pragma once

// Scalar numeric kernels: Legendre polynomials, spherical Bessel functions,
// Gauss-Legendre quadrature. Double precision throughout; the extended-precision
// eigensolve keeps its own small Legendre-at-zero tables (see prolate.hpp).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace prolatoscope {

constexpr double kPi = 3.141592653589793238462643383279502884;

// P_0..P_kmax at s via the ascending three-term recurrence (stable on [-1,1]).
inline void legendre_array(int kmax, double s, std::vector<double>& out) {
  if (kmax < 0) throw std::invalid_argument("legendre_array: kmax must be >= 0");
  out.resize(kmax + 1);
  out[0] = 1.0;
  if (kmax == 0) return;
  out[1] = s;
  for (int k = 2; k <= kmax; ++k)
    out[k] = ((2.0 * k - 1.0) * s * out[k - 1] - (k - 1.0) * out[k - 2]) / double(k);
}

inline double legendre_P(int k, double s) {
  if (k < 0) throw std::invalid_argument("legendre_P: k must be >= 0");
  double p0 = 1.0, p1 = s;
  if (k == 0) return p0;
  for (int j = 2; j <= k; ++j) {
    double p2 = ((2.0 * j - 1.0) * s * p1 - (j - 1.0) * p0) / double(j);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

namespace detail {
// log10 of the leading small-argument magnitude x^k/(2k+1)!!, used to clip
// indices whose spherical Bessel values underflow double anyway.
inline double log10_sph_bessel_lead(int k, double ax) {
  const double ln2 = 0.6931471805599453, ln10 = 2.302585092994046;
  double lg_dfact = (std::lgamma(2.0 * k + 2.0) - k * ln2 - std::lgamma(k + 2.0)) / ln10;
  return k * std::log10(ax) - lg_dfact;
}
}  // namespace detail

// j_0..j_kmax at x. Downward (Miller) recurrence normalized against the closed
// forms of j0/j1 when kmax exceeds |x|; plain upward recurrence otherwise.
// Negative x handled through the exact parity j_k(-x) = (-1)^k j_k(x) so that
// series built from these values inherit machine-exact parity.
inline std::vector<double> sph_bessel_array(int kmax, double x) {
  if (kmax < 0) throw std::invalid_argument("sph_bessel_array: kmax must be >= 0");
  std::vector<double> j(kmax + 1, 0.0);
  const double ax = std::abs(x);
  if (ax == 0.0) {
    j[0] = 1.0;  // j_k(0) = delta_k0
    return j;
  }
  if (ax < 1e-6) {
    // two-term Taylor: x^k/(2k+1)!! * (1 - x^2/(2(2k+3)))
    double lead = 1.0;
    for (int k = 0; k <= kmax; ++k) {
      j[k] = lead * (1.0 - ax * ax / (2.0 * (2.0 * k + 3.0)));
      lead *= ax / (2.0 * k + 3.0);
    }
  } else if (kmax <= int(ax) + 1) {
    // oscillatory regime: upward recurrence is stable
    j[0] = std::sin(ax) / ax;
    if (kmax >= 1) {
      double jm = j[0];
      double jc = jm / ax - std::cos(ax) / ax;
      j[1] = jc;
      for (int k = 1; k < kmax; ++k) {
        double jn = (2.0 * k + 1.0) / ax * jc - jm;
        jm = jc;
        jc = jn;
        j[k + 1] = jc;
      }
    }
  } else {
    // Miller downward recurrence. Indices whose values underflow double are
    // left at zero; the start index sits a fixed pad above the last surviving
    // one, which bounds the dynamic range of the unnormalized pass.
    int last = kmax;
    while (last > 0 && detail::log10_sph_bessel_lead(last, ax) < -330.0) --last;
    const int start = last + 36;
    double jp = 0.0, jc = 1e-30;  // unnormalized values at start+1, start
    for (int k = start; k >= 1; --k) {
      double jm = (2.0 * k + 1.0) / ax * jc - jp;  // value at k-1
      jp = jc;
      jc = jm;
      if (k - 1 <= last) j[k - 1] = jc;
      if (std::abs(jc) > 1e250) {
        const double f = 1e-250;
        jc *= f;
        jp *= f;
        for (int i = (k - 1 > 0 ? k - 1 : 0); i <= last; ++i) j[i] *= f;
      }
    }
    // normalize at whichever closed form is farther from a zero crossing
    const double ref0 = std::sin(ax) / ax;
    const double ref1 = ref0 / ax - std::cos(ax) / ax;
    double scale;
    if (std::abs(ref0) >= std::abs(ref1) || last < 1)
      scale = ref0 / jc;  // jc holds the raw value at k=0
    else
      scale = ref1 / jp;  // jp holds the raw value at k=1
    for (int k = 0; k <= last; ++k) j[k] *= scale;
  }
  if (x < 0.0)
    for (int k = 1; k <= kmax; k += 2) j[k] = -j[k];
  return j;
}

inline double spherical_bessel_j(int k, double x) { return sph_bessel_array(k, x)[k]; }

struct Quadrature {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline Quadrature gauss_legendre(int n) {
  if (n < 2) throw std::invalid_argument("gauss_legendre: need n >= 2");
  Quadrature q;
  q.x.assign(n, 0.0);
  q.w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p1 = 0.0, pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double pa = 1.0;
      p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * pa) / double(k);
        pa = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - pa) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
      if (it == 99) throw numeric_error("gauss_legendre: Newton iteration stalled");
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.x[n - 1 - i] = x;  // i=0 is the largest root; store ascending
    q.x[i] = -x;
    q.w[n - 1 - i] = w;
    q.w[i] = w;
  }
  return q;
}

// integral of f over [a,b] using a reference-interval rule
template <class F>
double integrate(const F& f, const Quadrature& q, double a, double b) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) acc += q.w[i] * f(mid + half * q.x[i]);
  return acc * half;
}

}  // namespace prolatoscope
