#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "prolatoscope/stochastic.hpp"

namespace prolatoscope {

// A point-spread function sampled on a grid, normalized to unit peak at s=0.
// `eval` is the continuous normalized profile; half-width bisection refines
// grid brackets with it, so it must agree with `values` on the grid.  It may
// borrow the basis used to build the profile, which must then outlive it.
struct PsfProfile {
  std::vector<double> grid;
  std::vector<double> values;
  std::function<double(double)> eval;
};

inline std::vector<double> default_psf_grid(double c) {
  const double half = 3.0 * kPi / c;
  return make_uniform_grid(-half, half, half / 1000.0);
}

// Diffraction-limited spot of the band-limiting pupil, sin(cs)/(pi s) scaled
// to unit peak.
inline PsfProfile imaging_psf(double c, const std::vector<double>& grid) {
  if (!(c > 0.0)) throw config_error("imaging_psf: bandwidth parameter c must be positive");
  if (grid.size() < 2) throw config_error("imaging_psf: grid needs at least two points");
  auto f = [c](double s) {
    const double x = c * s;
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
  };
  PsfProfile p;
  p.grid = grid;
  p.values.reserve(grid.size());
  for (double s : grid) p.values.push_back(f(s));
  p.eval = f;
  return p;
}

// Core response of the truncated-basis reconstruction to a centered point
// source: sum of phi_k(0) phi_k(s) over the first L modes (odd modes drop out
// since phi_k(0)=0), scaled to unit peak.  Borrows `basis`.
inline PsfProfile reconstruction_psf(const ProlateBasis& basis, int L,
                                     const std::vector<double>& grid) {
  if (L < 1 || L > basis.num_modes())
    throw config_error("reconstruction_psf: mode count L must lie in [1, K]");
  if (grid.size() < 2) throw config_error("reconstruction_psf: grid needs at least two points");
  std::vector<double> at_zero(std::size_t(L), 0.0);
  double peak = 0.0;
  for (int k = 0; k < L; ++k) {
    at_zero[std::size_t(k)] = basis.eval_phi(k, 0.0);
    peak += at_zero[std::size_t(k)] * at_zero[std::size_t(k)];
  }
  const ProlateBasis* b = &basis;
  auto f = [b, L, at_zero, peak](double s) {
    double acc = 0.0;
    for (int k = 0; k < L; ++k)
      if (at_zero[std::size_t(k)] != 0.0) acc += at_zero[std::size_t(k)] * b->eval_phi(k, s);
    return acc / peak;
  };
  PsfProfile p;
  p.grid = grid;
  p.values.reserve(grid.size());
  for (double s : grid) p.values.push_back(f(s));
  p.eval = f;
  return p;
}

namespace detail {

// First bracket at s >= 0 where the sampled profile falls through 1/2,
// refined by bisection on the continuous evaluator to 1e-9 in s.
inline std::optional<double> first_half_crossing(const PsfProfile& p) {
  const std::size_t n = p.grid.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (p.grid[i] < 0.0) continue;
    const double a = p.values[i];
    const double b = p.values[i + 1];
    if (a >= 0.5 && b < 0.5) {
      double lo = p.grid[i], hi = p.grid[i + 1];
      while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (p.eval(mid) >= 0.5)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline double half_width(const PsfProfile& p) {
  if (p.grid.size() < 2 || !p.eval) throw config_error("half_width: profile is empty");
  const auto w = detail::first_half_crossing(p);
  if (!w) throw numeric_error("half_width: no half-maximum crossing found within the grid");
  return *w;
}

// Reconstruction half-width on the core.  With very few modes the profile can
// stay above half maximum all the way to s=1; the width is then capped at the
// core edge and flagged instead of raising.
struct ReconWidth {
  double value = 0.0;
  bool core_edge = false;
};

inline ReconWidth reconstruction_half_width(const ProlateBasis& basis, int L) {
  const PsfProfile p = reconstruction_psf(basis, L, default_core_grid());
  const auto w = detail::first_half_crossing(p);
  if (!w) return {1.0, true};
  return {*w, false};
}

// Input-side signal-to-noise ratio of a coherent probe: the mean total photon
// number inside the core.
inline double snr_input(const ObjectField& object) { return object.photon_budget; }

// Signal-to-noise ratio of the reconstructed object built from the first L
// coefficients.  The 1/lambda_k amplification of the wing-channel vacuum noise
// sits in the denominator; squeezing the input quadrature by e^{-r} lifts the
// whole ratio by e^{2r}.
inline double snr_reconstructed(const CoeffVector& coeffs, const ProlateBasis& basis, int L,
                                const NoiseModel& model) {
  if (L < 1 || L > coeffs.L || L > basis.num_modes())
    throw config_error("snr_reconstructed: mode count L must lie in [1, min(coeffs.L, K)]");
  double num = 0.0, den = 0.0;
  for (int k = 0; k < L; ++k) {
    const double lam = basis.lambda(k);
    if (lam <= 0.0)
      throw numeric_error("snr_reconstructed: eigenvalue of mode " + std::to_string(k) +
                          " underflows double precision; use a smaller mode count L");
    const double p = std::norm(coeffs.values[std::size_t(k)]);
    num += p;
    den += p / lam;
  }
  if (num == 0.0)
    throw numeric_error("snr_reconstructed: all retained coefficients vanish, SNR undefined");
  double snr = num * num / den;
  if (model.kind == NoiseKind::squeezed) snr *= std::exp(2.0 * model.r);
  return snr;
}

inline double noise_figure(double snr_in, double snr_rec) {
  if (!(snr_rec > 0.0))
    throw config_error("noise_figure: reconstructed SNR must be positive");
  return snr_in / snr_rec;
}

// Largest usable mode count for a probe shape at a given photon budget: the
// reconstruction is declared possible for L when its SNR is at least one (the
// boundary is taken inclusively).  The squeezing gain is applied to the photon
// number up front, so a squeezed run at <N> selects exactly the same L* as a
// coherent run at e^{2r}<N>.
struct ModeSelection {
  int L_star = 0;
  bool reconstruction_possible = false;
};

inline ModeSelection select_max_modes(const ObjectField& probe, const ProlateBasis& basis,
                                      const NoiseModel& model, double photons) {
  if (!(photons >= 0.0)) throw config_error("select_max_modes: photon number must be >= 0");
  if (!(probe.photon_budget > 0.0))
    throw config_error("select_max_modes: probe object carries no photons");
  const int K = basis.num_modes();
  const CoeffVector coeffs = project_coeffs(probe, basis, K);
  const double gain =
      model.kind == NoiseKind::squeezed ? std::exp(2.0 * model.r) : 1.0;
  const double n_eff = gain * photons;
  int best = 0;
  for (int L = 1; L <= K; ++L) {
    const double rho_unit =
        snr_reconstructed(coeffs, basis, L, make_coherent()) / probe.photon_budget;
    if (n_eff * rho_unit >= 1.0) best = L;
  }
  return {best, best > 0};
}

// Ratio of the diffraction-limited half-width to the reconstruction
// half-width for L retained modes.
struct SuperresReport {
  double S = 0.0;
  double W = 0.0;
  double W_L = 0.0;
  bool core_edge = false;
};

inline SuperresReport superres_factor(double c, const ProlateBasis& basis, int L) {
  const double w = half_width(imaging_psf(c, default_psf_grid(c)));
  const ReconWidth wl = reconstruction_half_width(basis, L);
  return {w / wl.value, w, wl.value, wl.core_edge};
}

struct SweepPoint {
  double photons = 0.0;
  NoiseModel model;
  int L_star = 0;
  bool reconstruction_possible = false;
  double W = 0.0;
  double W_L = 0.0;
  double S = 0.0;
  bool core_edge = false;
};

// Super-resolution factor versus photon number for each noise model, using
// the narrow rectangular probe of width eps as the point-like test object.
// Rows are grouped by model, photon numbers in input order.  A point where
// even L=1 fails keeps W but reports W_L = S = 0 with the flag cleared.
inline std::vector<SweepPoint> sweep_S_vs_N(const std::vector<double>& photon_list,
                                            const std::vector<NoiseModel>& models,
                                            const ProlateBasis& basis, double eps = 1e-2) {
  if (photon_list.empty()) throw config_error("sweep_S_vs_N: empty photon list");
  if (models.empty()) throw config_error("sweep_S_vs_N: empty model list");
  const ObjectField probe = make_rect_source(1.0, eps);
  const double w = half_width(imaging_psf(basis.c(), default_psf_grid(basis.c())));
  std::vector<SweepPoint> out;
  out.reserve(photon_list.size() * models.size());
  for (const NoiseModel& m : models)
    for (double n : photon_list) {
      const ModeSelection sel = select_max_modes(probe, basis, m, n);
      SweepPoint p;
      p.photons = n;
      p.model = m;
      p.L_star = sel.L_star;
      p.reconstruction_possible = sel.reconstruction_possible;
      p.W = w;
      if (sel.L_star >= 1) {
        const ReconWidth wl = reconstruction_half_width(basis, sel.L_star);
        p.W_L = wl.value;
        p.S = w / wl.value;
        p.core_edge = wl.core_edge;
      }
      out.push_back(p);
    }
  return out;
}

inline std::string export_sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "N,model,r,L_star,W,W_L,S\n";
  for (const auto& p : points)
    out << format_double(p.photons) << "," << noise_kind_name(p.model.kind) << ","
        << format_double(p.model.r) << "," << p.L_star << "," << format_double(p.W) << ","
        << format_double(p.W_L) << "," << format_double(p.S) << "\n";
  return out.str();
}

inline std::string sweep_summary_json(const std::vector<SweepPoint>& points,
                                      const ProlateBasis& basis, double eps = 1e-2) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"c\": " << format_double(basis.c()) << ",\n";
  out << "  \"basis-checksum\": \"" << basis_checksum(basis) << "\",\n";
  out << "  \"probe-eps\": " << format_double(eps) << ",\n";
  out << "  \"points\": [\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    out << "    {\"N\": " << format_double(p.photons) << ", \"model\": \""
        << noise_kind_name(p.model.kind) << "\", \"r\": " << format_double(p.model.r)
        << ", \"L-star\": " << p.L_star << ", \"reconstruction-possible\": "
        << (p.reconstruction_possible ? "true" : "false") << ", \"W\": " << format_double(p.W)
        << ", \"W-L\": " << format_double(p.W_L) << ", \"S\": " << format_double(p.S) << "}"
        << (i + 1 < points.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

}  // namespace prolatoscope
