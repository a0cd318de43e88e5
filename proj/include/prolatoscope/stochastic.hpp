#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "prolatoscope/errors.hpp"
#include "prolatoscope/fieldmodel.hpp"
#include "prolatoscope/io.hpp"
#include "prolatoscope/prolate.hpp"

namespace prolatoscope {

// ---------------------------------------------------------------------------
// noise models: antinormally ordered c-number sampling
// ---------------------------------------------------------------------------

enum class NoiseKind { coherent, squeezed };

struct NoiseModel {
  NoiseKind kind = NoiseKind::coherent;
  double r = 0.0;  // squeezing parameter; amplitude quadrature variance e^{-2r}/4

  // standard deviations of the two quadratures (variance product 1/16)
  double x_std() const { return 0.5 * std::exp(-r); }
  double y_std() const { return 0.5 * std::exp(+r); }
};

inline NoiseModel make_coherent() { return NoiseModel{NoiseKind::coherent, 0.0}; }

inline NoiseModel make_squeezed(double r) {
  if (!(r >= 0.0)) throw config_error("make_squeezed: squeezing parameter must be >= 0");
  return NoiseModel{NoiseKind::squeezed, r};
}

inline const char* noise_kind_name(NoiseKind k) {
  return k == NoiseKind::coherent ? "coherent" : "squeezed";
}

// ---------------------------------------------------------------------------
// counter-based uniform/Gaussian stream
//
// Reproducibility contract: the value of draw j of trial t depends only on
// (seed, t, j), never on how many draws were made before or on which thread
// asked.  The mixing is the splitmix64 finalizer over a Weyl sequence.
// ---------------------------------------------------------------------------

namespace detail {

constexpr std::uint64_t kWeylStep = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t trial) {
  return mix64(seed + kWeylStep * (trial + 1));
}

// uniform on (0, 1], 53-bit resolution
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t v = mix64(key + kWeylStep * (counter + 1)) >> 11;
  return double(v + 1) * 0x1p-53;
}

// standard normal via the Box-Muller cosine branch; counter c owns the
// uniform pair (2c, 2c+1)
inline double gaussian_at(std::uint64_t key, std::uint64_t counter) {
  const double u1 = uniform01(key, 2 * counter);
  const double u2 = uniform01(key, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// per-trial fluctuation draws
// ---------------------------------------------------------------------------

struct NoiseDraw {
  std::vector<std::complex<double>> dalpha;  // object-mode fluctuations
  std::vector<std::complex<double>> dbeta;   // wing/vacuum-mode fluctuations
};

// Draw order is part of the determinism contract: modes ascending, the alpha
// pair before the beta pair, X before Y; mode k owns counters 4k..4k+3.
inline NoiseDraw sample_draw(const NoiseModel& model, int L, std::uint64_t seed,
                             std::uint64_t trial_index) {
  if (L < 1) throw config_error("sample_draw: mode count must be >= 1");
  const std::uint64_t key = detail::stream_key(seed, trial_index);
  const double sx = model.x_std(), sy = model.y_std();
  NoiseDraw d;
  d.dalpha.reserve(std::size_t(L));
  d.dbeta.reserve(std::size_t(L));
  for (int k = 0; k < L; ++k) {
    const std::uint64_t base = 4 * std::uint64_t(k);
    const double xa = sx * detail::gaussian_at(key, base + 0);
    const double ya = sy * detail::gaussian_at(key, base + 1);
    const double xb = sx * detail::gaussian_at(key, base + 2);
    const double yb = sy * detail::gaussian_at(key, base + 3);
    d.dalpha.emplace_back(xa, ya);
    d.dbeta.emplace_back(xb, yb);
  }
  return d;
}

// ---------------------------------------------------------------------------
// noisy reconstruction
// ---------------------------------------------------------------------------

inline CoeffVector noisy_reconstruct(const CoeffVector& coeffs, const ProlateBasis& basis, int L,
                                     const NoiseDraw& draw) {
  if (L < 1 || L > coeffs.L || L > basis.num_modes())
    throw config_error("noisy_reconstruct: L out of range");
  if (int(draw.dalpha.size()) < L || int(draw.dbeta.size()) < L)
    throw config_error("noisy_reconstruct: draw shorter than L");
  CoeffVector out;
  out.L = L;
  out.kind = CoeffKind::reconstructed;
  out.values.reserve(std::size_t(L));
  for (int k = 0; k < L; ++k) {
    const double lam = basis.lambda(k);
    if (!(lam > 0.0))
      throw numeric_error("noisy_reconstruct: eigenvalue of mode " + std::to_string(k) +
                          " underflows double precision; use a smaller mode count L");
    const double amp = std::sqrt(basis.one_minus_lambda(k) / lam);
    out.values.push_back(coeffs.values[std::size_t(k)] + draw.dalpha[std::size_t(k)] +
                         amp * draw.dbeta[std::size_t(k)]);
  }
  return out;
}

// beam-splitter unitarity on the classical means: the transmitted and
// reflected energies must add up to the input energy
inline double beamsplitter_energy_check(const std::complex<double>& a, double lambda,
                                        double one_minus_lambda) {
  const double in = std::norm(a);
  const double through = lambda * in;
  const double reflected = one_minus_lambda * in;
  return std::abs(through + reflected - in);
}

// ---------------------------------------------------------------------------
// ensembles
// ---------------------------------------------------------------------------

struct Ensemble {
  int trials = 0;
  int L = 0;
  std::uint64_t seed = 0;
  NoiseModel model;
  double c = 0.0;
  double photons = 0.0;
  CoeffVector noise_free;               // reference coefficients
  std::vector<CoeffVector> realizations;  // one reconstructed vector per trial
};

inline Ensemble run_ensemble(const CoeffVector& coeffs, const ProlateBasis& basis, int L,
                             const NoiseModel& model, int trials, std::uint64_t seed,
                             double photons) {
  if (trials < 1) throw config_error("run_ensemble: trial count must be >= 1");
  Ensemble e;
  e.trials = trials;
  e.L = L;
  e.seed = seed;
  e.model = model;
  e.c = basis.c();
  e.photons = photons;
  e.noise_free = coeffs;
  e.noise_free.values.resize(std::size_t(L));
  e.noise_free.L = L;
  e.realizations.reserve(std::size_t(trials));
  for (int t = 0; t < trials; ++t)
    e.realizations.push_back(
        noisy_reconstruct(coeffs, basis, L, sample_draw(model, L, seed, std::uint64_t(t))));
  return e;
}

inline Ensemble run_ensemble(const ObjectField& object, const ProlateBasis& basis, int L,
                             const NoiseModel& model, int trials, std::uint64_t seed) {
  return run_ensemble(project_coeffs(object, basis, L), basis, L, model, trials, seed,
                      object.photon_budget);
}

// ---------------------------------------------------------------------------
// homodyne readout: spectrum realizations
//
// The detected amplitude of mode k is the X quadrature of the phase-aligned
// coefficient, so a realization spectrum is built from Re of the coefficients
// with the (-i)^k phase folded to its real sign per mode.
// ---------------------------------------------------------------------------

inline FieldProfile realization_spectrum(const CoeffVector& coeffs, const ProlateBasis& basis,
                                         const std::vector<double>& grid) {
  FieldProfile f;
  f.grid = grid;
  f.meaning = ProfileMeaning::spectrum;
  f.values.resize(grid.size());
  std::vector<double> psis;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    basis.eval_psi_all(grid[i], psis);
    double acc = 0.0;
    for (int k = 0; k < coeffs.L; ++k)
      acc += quarter_phase_sign(k) * coeffs.values[std::size_t(k)].real() * psis[std::size_t(k)];
    f.values[i] = {acc, 0.0};
  }
  return f;
}

// ---------------------------------------------------------------------------
// photon bookkeeping
// ---------------------------------------------------------------------------

inline double photons_from_power(double power_watts, double wavelength_m, double time_s) {
  if (!(power_watts > 0.0) || !(wavelength_m > 0.0) || !(time_s > 0.0))
    throw config_error("photons_from_power: power, wavelength and time must be positive");
  const double planck = 6.62607015e-34;
  const double light_speed = 2.99792458e8;
  return power_watts * time_s * wavelength_m / (planck * light_speed);
}

// ---------------------------------------------------------------------------
// export
// ---------------------------------------------------------------------------

inline std::string export_ensemble_csv(const Ensemble& e) {
  std::ostringstream out;
  out << "trial,k,alpha_re,alpha_im\n";
  for (int t = 0; t < e.trials; ++t)
    for (int k = 0; k < e.L; ++k) {
      const auto& v = e.realizations[std::size_t(t)].values[std::size_t(k)];
      out << t << "," << k << "," << format_double(v.real()) << "," << format_double(v.imag())
          << "\n";
    }
  return out.str();
}

inline std::string ensemble_summary_json(const Ensemble& e) {
  std::ostringstream out;
  out << "{\n";
  out << "  \"seed\": " << e.seed << ",\n";
  out << "  \"model\": \"" << noise_kind_name(e.model.kind) << "\",\n";
  out << "  \"r\": " << format_double(e.model.r) << ",\n";
  out << "  \"L\": " << e.L << ",\n";
  out << "  \"trials\": " << e.trials << ",\n";
  out << "  \"photons\": " << format_double(e.photons) << ",\n";
  out << "  \"c\": " << format_double(e.c) << ",\n";
  out << "  \"modes\": [\n";
  for (int k = 0; k < e.L; ++k) {
    double mr = 0.0, mi = 0.0;
    for (const auto& trial : e.realizations) {
      mr += trial.values[std::size_t(k)].real();
      mi += trial.values[std::size_t(k)].imag();
    }
    mr /= e.trials;
    mi /= e.trials;
    double vr = 0.0, vi = 0.0;
    for (const auto& trial : e.realizations) {
      const double dr = trial.values[std::size_t(k)].real() - mr;
      const double di = trial.values[std::size_t(k)].imag() - mi;
      vr += dr * dr;
      vi += di * di;
    }
    const int denom = e.trials > 1 ? e.trials - 1 : 1;
    vr /= denom;
    vi /= denom;
    out << "    {\"k\": " << k << ", \"mean_re\": " << format_double(mr)
        << ", \"mean_im\": " << format_double(mi) << ", \"var_re\": " << format_double(vr)
        << ", \"var_im\": " << format_double(vi) << "}" << (k + 1 < e.L ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

}  // namespace prolatoscope
