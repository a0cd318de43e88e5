#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "prolatoscope/errors.hpp"
#include "prolatoscope/io.hpp"
#include "prolatoscope/prolate.hpp"
#include "prolatoscope/special.hpp"

namespace prolatoscope {

// ---------------------------------------------------------------------------
// object amplitudes on the core
// ---------------------------------------------------------------------------

struct DoubleGaussian {
  double s0 = 0.5;      // peak half-separation
  double sigma = 0.1;   // peak width
  double amplitude = 0.0;
};

struct RectSource {
  double eps = 1e-2;    // full width, centered at the origin
  double height = 0.0;
};

struct Sampled {
  std::vector<double> grid;    // strictly increasing, inside the core
  std::vector<double> values;  // linearly interpolated between samples
};

struct ObjectField {
  std::variant<DoubleGaussian, RectSource, Sampled> profile;
  double photon_budget = 0.0;  // ∫ a^2 over the core

  double eval(double s) const {
    if (std::abs(s) > 1.0) return 0.0;
    if (const auto* g = std::get_if<DoubleGaussian>(&profile)) {
      const double d1 = (s - g->s0) / g->sigma, d2 = (s + g->s0) / g->sigma;
      return g->amplitude * (std::exp(-0.5 * d1 * d1) + std::exp(-0.5 * d2 * d2));
    }
    if (const auto* r = std::get_if<RectSource>(&profile))
      return std::abs(s) <= 0.5 * r->eps ? r->height : 0.0;
    const auto& sm = std::get<Sampled>(profile);
    if (sm.grid.empty() || s < sm.grid.front() || s > sm.grid.back()) return 0.0;
    const auto it = std::upper_bound(sm.grid.begin(), sm.grid.end(), s);
    if (it == sm.grid.begin()) return sm.values.front();
    if (it == sm.grid.end()) return sm.values.back();
    const std::size_t j = std::size_t(it - sm.grid.begin());
    const double t = (s - sm.grid[j - 1]) / (sm.grid[j] - sm.grid[j - 1]);
    return (1.0 - t) * sm.values[j - 1] + t * sm.values[j];
  }

  // integration support inside the core
  std::pair<double, double> support() const {
    if (const auto* r = std::get_if<RectSource>(&profile)) return {-0.5 * r->eps, 0.5 * r->eps};
    if (const auto* sm = std::get_if<Sampled>(&profile)) {
      if (sm->grid.empty()) return {0.0, 0.0};
      return {std::max(sm->grid.front(), -1.0), std::min(sm->grid.back(), 1.0)};
    }
    return {-1.0, 1.0};
  }
};

inline ObjectField make_double_gaussian(double photons, double s0, double sigma) {
  if (!(photons > 0.0)) throw config_error("make_double_gaussian: photon budget must be positive");
  if (!(sigma > 0.0)) throw config_error("make_double_gaussian: sigma must be positive");
  if (!(s0 >= 0.0 && s0 < 1.0)) throw config_error("make_double_gaussian: s0 must lie in [0,1)");
  auto shape2 = [&](double s) {
    const double d1 = (s - s0) / sigma, d2 = (s + s0) / sigma;
    const double v = std::exp(-0.5 * d1 * d1) + std::exp(-0.5 * d2 * d2);
    return v * v;
  };
  static const Quadrature q200 = gauss_legendre(200);
  static const Quadrature q400 = gauss_legendre(400);
  const double coarse = integrate(shape2, q200, -1.0, 1.0);
  const double fine = integrate(shape2, q400, -1.0, 1.0);
  if (!(fine > 0.0) || std::abs(fine - coarse) > 1e-10 * fine)
    throw numeric_error(
        "make_double_gaussian: normalization quadrature did not converge; the peaks are too "
        "narrow for the quadrature grid, refine it or widen sigma");
  ObjectField f;
  f.profile = DoubleGaussian{s0, sigma, std::sqrt(photons / fine)};
  f.photon_budget = photons;
  return f;
}

inline ObjectField make_rect_source(double photons, double eps) {
  if (!(photons > 0.0)) throw config_error("make_rect_source: photon budget must be positive");
  if (!(eps > 0.0 && eps <= 2.0)) throw config_error("make_rect_source: width must lie in (0,2]");
  ObjectField f;
  f.profile = RectSource{eps, std::sqrt(photons / eps)};
  f.photon_budget = photons;
  return f;
}

inline ObjectField make_sampled(std::vector<double> grid, std::vector<double> values) {
  if (grid.size() != values.size() || grid.size() < 2)
    throw config_error("make_sampled: grid/value size mismatch or too short");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw config_error("make_sampled: grid must be strictly increasing");
  ObjectField f;
  f.profile = Sampled{std::move(grid), std::move(values)};
  static const Quadrature q400 = gauss_legendre(400);
  const auto [lo, hi] = f.support();
  f.photon_budget = integrate([&](double s) { const double a = f.eval(s); return a * a; }, q400, lo, hi);
  return f;
}

// ---------------------------------------------------------------------------
// coefficient vectors and sampled profiles
// ---------------------------------------------------------------------------

enum class CoeffKind { object, pupil, reconstructed };

struct CoeffVector {
  int L = 0;
  std::vector<std::complex<double>> values;
  CoeffKind kind = CoeffKind::object;
};

enum class ProfileMeaning { object, spectrum, image, reconstruction };

inline const char* meaning_name(ProfileMeaning m) {
  switch (m) {
    case ProfileMeaning::object: return "object";
    case ProfileMeaning::spectrum: return "spectrum";
    case ProfileMeaning::image: return "image";
    default: return "reconstruction";
  }
}

struct FieldProfile {
  std::vector<double> grid;
  std::vector<std::complex<double>> values;
  ProfileMeaning meaning = ProfileMeaning::object;
};

inline std::vector<double> make_uniform_grid(double a, double b, double step) {
  if (!(step > 0.0) || !(b > a)) throw config_error("make_uniform_grid: invalid range or step");
  const int n = int(std::lround((b - a) / step));
  std::vector<double> g(std::size_t(n) + 1);
  for (int i = 0; i <= n; ++i) g[std::size_t(i)] = a + i * step;
  return g;
}

inline std::vector<double> default_space_grid() { return make_uniform_grid(-1.5, 1.5, 1e-3); }
inline std::vector<double> default_core_grid() { return make_uniform_grid(-1.0, 1.0, 1e-3); }
inline std::vector<double> default_spectrum_grid() { return make_uniform_grid(-15.0, 15.0, 1e-2); }

// (-i)^k as a complex phase table
inline std::complex<double> quarter_phase(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// real sign carried by (-i)^k once the quadrature phase is absorbed per mode:
// Re for even k, Im for odd k
inline double quarter_phase_sign(int k) {
  const std::complex<double> p = quarter_phase(k);
  return p.real() + p.imag();
}

// ---------------------------------------------------------------------------
// projection and the forward model
// ---------------------------------------------------------------------------

inline CoeffVector project_coeffs(const ObjectField& object, const ProlateBasis& basis, int L) {
  if (L < 1 || L > basis.num_modes())
    throw config_error("project_coeffs: L must lie in [1, basis modes]");
  static const Quadrature q200 = gauss_legendre(200);
  static const Quadrature q400 = gauss_legendre(400);
  const auto [lo, hi] = object.support();
  if (!(hi > lo)) throw config_error("project_coeffs: object has empty support");
  std::vector<double> scratch;
  auto accumulate = [&](const Quadrature& q, std::vector<double>& out) {
    out.assign(std::size_t(L), 0.0);
    for (std::size_t i = 0; i < q.x.size(); ++i) {
      const double s = 0.5 * (hi + lo) + 0.5 * (hi - lo) * q.x[i];
      const double w = 0.5 * (hi - lo) * q.w[i] * object.eval(s);
      basis.eval_phi_all(s, scratch);
      for (int k = 0; k < L; ++k) out[std::size_t(k)] += w * scratch[std::size_t(k)];
    }
  };
  std::vector<double> coarse, fine;
  accumulate(q200, coarse);
  accumulate(q400, fine);
  double scale = 0.0, drift = 0.0;
  for (int k = 0; k < L; ++k) {
    scale = std::max(scale, std::abs(fine[std::size_t(k)]));
    drift = std::max(drift, std::abs(fine[std::size_t(k)] - coarse[std::size_t(k)]));
  }
  if (!(scale > 0.0) || drift > 1e-9 * scale)
    throw numeric_error("project_coeffs: projection quadrature did not converge on this object");
  CoeffVector c;
  c.L = L;
  c.kind = CoeffKind::object;
  c.values.reserve(std::size_t(L));
  for (int k = 0; k < L; ++k) c.values.emplace_back(fine[std::size_t(k)], 0.0);
  return c;
}

inline FieldProfile forward_spectrum(const CoeffVector& coeffs, const ProlateBasis& basis,
                                     const std::vector<double>& grid) {
  if (coeffs.kind != CoeffKind::object)
    throw config_error("forward_spectrum: expected object-side coefficients");
  FieldProfile f;
  f.grid = grid;
  f.meaning = ProfileMeaning::spectrum;
  f.values.resize(grid.size());
  std::vector<double> psis;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    basis.eval_psi_all(grid[i], psis);
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < coeffs.L; ++k)
      acc += quarter_phase(k) * coeffs.values[std::size_t(k)] * psis[std::size_t(k)];
    f.values[i] = acc;
  }
  return f;
}

// image through the hard aperture: convolution with the sinc kernel; valid on
// any grid, object support handled exactly
inline FieldProfile forward_image(const ObjectField& object, double c,
                                  const std::vector<double>& grid) {
  if (!(c > 0.0)) throw config_error("forward_image: c must be positive");
  static const Quadrature q = gauss_legendre(200);
  const auto [lo, hi] = object.support();
  FieldProfile e;
  e.grid = grid;
  e.meaning = ProfileMeaning::image;
  e.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    const double v = integrate(
        [&](double sp) {
          const double d = s - sp;
          const double kern = (d == 0.0) ? c / kPi : std::sin(c * d) / (kPi * d);
          return kern * object.eval(sp);
        },
        q, lo, hi);
    e.values[i] = {v, 0.0};
  }
  return e;
}

// same image as a damped eigenmode series; core-only since it rides on phi
inline FieldProfile forward_image_series(const CoeffVector& coeffs, const ProlateBasis& basis,
                                         const std::vector<double>& grid) {
  if (coeffs.kind != CoeffKind::object)
    throw config_error("forward_image_series: expected object-side coefficients");
  FieldProfile e;
  e.grid = grid;
  e.meaning = ProfileMeaning::image;
  e.values.resize(grid.size());
  std::vector<double> phis;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i]) > 1.0)
      throw std::domain_error("forward_image_series: series form is defined on the core only");
    basis.eval_phi_all(grid[i], phis);
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < coeffs.L; ++k)
      acc += basis.lambda(k) * coeffs.values[std::size_t(k)] * phis[std::size_t(k)];
    e.values[i] = acc;
  }
  return e;
}

inline FieldProfile reconstruct_object(const CoeffVector& coeffs, const ProlateBasis& basis, int L,
                                       const std::vector<double>& grid) {
  if (coeffs.kind == CoeffKind::pupil)
    throw config_error("reconstruct_object: expected object-side or reconstructed coefficients");
  if (L < 1 || L > coeffs.L || L > basis.num_modes())
    throw config_error("reconstruct_object: L out of range");
  FieldProfile a;
  a.grid = grid;
  a.meaning = ProfileMeaning::reconstruction;
  a.values.resize(grid.size());
  std::vector<double> phis;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i]) > 1.0)
      throw std::domain_error("reconstruct_object: reconstruction lives on the core only");
    basis.eval_phi_all(grid[i], phis);
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < L; ++k) acc += coeffs.values[std::size_t(k)] * phis[std::size_t(k)];
    a.values[i] = acc;
  }
  return a;
}

inline FieldProfile reconstruct_spectrum(const CoeffVector& coeffs, const ProlateBasis& basis,
                                         int L, const std::vector<double>& grid) {
  if (coeffs.kind == CoeffKind::pupil)
    throw config_error("reconstruct_spectrum: expected object-side or reconstructed coefficients");
  if (L < 1 || L > coeffs.L || L > basis.num_modes())
    throw config_error("reconstruct_spectrum: L out of range");
  FieldProfile f;
  f.grid = grid;
  f.meaning = ProfileMeaning::spectrum;
  f.values.resize(grid.size());
  std::vector<double> psis;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    basis.eval_psi_all(grid[i], psis);
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < L; ++k)
      acc += quarter_phase(k) * coeffs.values[std::size_t(k)] * psis[std::size_t(k)];
    f.values[i] = acc;
  }
  return f;
}

inline FieldProfile object_profile(const ObjectField& object, const std::vector<double>& grid) {
  FieldProfile p;
  p.grid = grid;
  p.meaning = ProfileMeaning::object;
  p.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) p.values[i] = {object.eval(grid[i]), 0.0};
  return p;
}

// ---------------------------------------------------------------------------
// resolution bookkeeping and deviation measures
// ---------------------------------------------------------------------------

inline double rayleigh_distance(double c) {
  if (!(c > 0.0)) throw config_error("rayleigh_distance: c must be positive");
  return kPi / c;
}

// smallest feature separation the object asks the system to resolve
inline double feature_scale(const ObjectField& object) {
  if (const auto* g = std::get_if<DoubleGaussian>(&object.profile)) return 2.0 * g->s0;
  if (const auto* r = std::get_if<RectSource>(&object.profile)) return r->eps;
  const auto [lo, hi] = object.support();
  return hi - lo;
}

inline bool beyond_rayleigh(const ObjectField& object, double c) {
  return feature_scale(object) < rayleigh_distance(c);
}

// indices of strict local maxima of the real amplitude on the sample grid
// (peak counting for real image/reconstruction profiles)
inline std::vector<std::size_t> local_maxima(const FieldProfile& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < p.values.size(); ++i) {
    const double v = p.values[i].real();
    if (v > p.values[i - 1].real() && v > p.values[i + 1].real()) out.push_back(i);
  }
  return out;
}

// relative root-mean-square deviation between two profiles on the shared grid,
// restricted to |coordinate| <= window
inline double rms_deviation(const FieldProfile& exact, const FieldProfile& approx, double window) {
  if (exact.grid.size() != approx.grid.size())
    throw config_error("rms_deviation: profiles sampled on different grids");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < exact.grid.size(); ++i) {
    if (std::abs(exact.grid[i]) > window + 1e-12) continue;
    num += std::norm(exact.values[i] - approx.values[i]);
    den += std::norm(exact.values[i]);
  }
  if (!(den > 0.0)) throw numeric_error("rms_deviation: reference profile vanishes on the window");
  return std::sqrt(num / den);
}

// widest symmetric window (in steps of 0.5) on which the deviation stays under
// the closeness threshold; 0 when even the smallest window fails
inline double closeness_window(const FieldProfile& exact, const FieldProfile& approx,
                               double threshold) {
  const double extent = std::min(std::abs(exact.grid.front()), std::abs(exact.grid.back()));
  double best = 0.0;
  for (double w = 0.5; w <= extent + 1e-9; w += 0.5) {
    if (rms_deviation(exact, approx, w) <= threshold)
      best = w;
    else
      break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// CSV export
// ---------------------------------------------------------------------------

inline std::string export_profile_csv(const FieldProfile& p, double c, int L) {
  std::ostringstream out;
  out << "# " << meaning_name(p.meaning) << "," << format_double(c) << "," << L << "\n";
  out << "coordinate,value_re,value_im\n";
  for (std::size_t i = 0; i < p.grid.size(); ++i)
    out << format_double(p.grid[i]) << "," << format_double(p.values[i].real()) << ","
        << format_double(p.values[i].imag()) << "\n";
  return out.str();
}

}  // namespace prolatoscope
