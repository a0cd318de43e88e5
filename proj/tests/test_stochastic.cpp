#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "prolatoscope/stochastic.hpp"

using namespace prolatoscope;
using Catch::Matchers::ContainsSubstring;

namespace {

const ProlateBasis& basis18() {
  static ProlateBasis b = build_basis({1.0, 18, 256});
  return b;
}

CoeffVector default_coeffs(int L) {
  static CoeffVector c = project_coeffs(make_double_gaussian(1.0, 0.5, 0.1), basis18(), 18);
  CoeffVector out = c;
  out.L = L;
  out.values.resize(std::size_t(L));
  return out;
}

CoeffVector scaled(const CoeffVector& c, double factor) {
  CoeffVector out = c;
  for (auto& v : out.values) v *= factor;
  return out;
}

double sample_var_re(const Ensemble& e, int k) {
  double mean = 0.0;
  for (const auto& t : e.realizations) mean += t.values[std::size_t(k)].real();
  mean /= e.trials;
  double acc = 0.0;
  for (const auto& t : e.realizations) {
    const double d = t.values[std::size_t(k)].real() - mean;
    acc += d * d;
  }
  return acc / (e.trials - 1);
}

double sample_mean_re(const Ensemble& e, int k) {
  double mean = 0.0;
  for (const auto& t : e.realizations) mean += t.values[std::size_t(k)].real();
  return mean / e.trials;
}

}  // namespace

TEST_CASE("draws are counter-deterministic") {
  const NoiseModel m = make_coherent();
  const NoiseDraw a = sample_draw(m, 5, 42, 7);
  const NoiseDraw b = sample_draw(m, 5, 42, 7);
  REQUIRE(a.dalpha.size() == 5);
  for (int k = 0; k < 5; ++k) {
    CHECK(a.dalpha[std::size_t(k)] == b.dalpha[std::size_t(k)]);
    CHECK(a.dbeta[std::size_t(k)] == b.dbeta[std::size_t(k)]);
  }
  const NoiseDraw c = sample_draw(m, 5, 42, 8);
  const NoiseDraw d = sample_draw(m, 5, 43, 7);
  CHECK(a.dalpha[0] != c.dalpha[0]);
  CHECK(a.dalpha[0] != d.dalpha[0]);

  // a shorter request reproduces the prefix of a longer one
  const NoiseDraw e = sample_draw(m, 2, 42, 7);
  CHECK(e.dalpha[1] == a.dalpha[1]);
  CHECK(e.dbeta[1] == a.dbeta[1]);

  CHECK_THROWS_AS(sample_draw(m, 0, 1, 0), config_error);
}

TEST_CASE("quadrature variances of the raw draws") {
  const int T = 100000;
  const NoiseModel coh = make_coherent();
  const NoiseModel sq = make_squeezed(std::log(10.0));

  double vx = 0.0, vy = 0.0, sx = 0.0, sy = 0.0;
  for (int t = 0; t < T; ++t) {
    const NoiseDraw d = sample_draw(coh, 1, 2024, std::uint64_t(t));
    vx += d.dalpha[0].real() * d.dalpha[0].real();
    vy += d.dalpha[0].imag() * d.dalpha[0].imag();
    const NoiseDraw ds = sample_draw(sq, 1, 2024, std::uint64_t(t));
    sx += ds.dalpha[0].real() * ds.dalpha[0].real();
    sy += ds.dalpha[0].imag() * ds.dalpha[0].imag();
  }
  vx /= T;
  vy /= T;
  sx /= T;
  sy /= T;
  CHECK((vx > 0.24 && vx < 0.26));
  CHECK((vy > 0.24 && vy < 0.26));
  CHECK(sx == Catch::Approx(0.0025).epsilon(0.05));
  CHECK(sy == Catch::Approx(25.0).epsilon(0.05));
  // minimum-uncertainty family: variance product 1/16 by construction
  CHECK(sq.x_std() * sq.x_std() * sq.y_std() * sq.y_std() ==
        Catch::Approx(1.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("zero draw reproduces the coefficients exactly") {
  const CoeffVector c = default_coeffs(6);
  NoiseDraw z;
  z.dalpha.assign(6, {0.0, 0.0});
  z.dbeta.assign(6, {0.0, 0.0});
  const CoeffVector out = noisy_reconstruct(c, basis18(), 6, z);
  REQUIRE(out.kind == CoeffKind::reconstructed);
  for (int k = 0; k < 6; ++k) CHECK(out.values[std::size_t(k)] == c.values[std::size_t(k)]);
}

TEST_CASE("ensemble variance and mean laws") {
  const int T = 100000;
  const int L = 4;
  const CoeffVector c = default_coeffs(L);
  const ProlateBasis& b = basis18();
  const double r = std::log(10.0);

  const Ensemble ec = run_ensemble(c, b, L, make_coherent(), T, 20240817, 1.0);
  const Ensemble es = run_ensemble(c, b, L, make_squeezed(r), T, 20240817, 1.0);
  for (int k = 0; k < L; ++k) {
    const double lam = b.lambda(k);
    const double vc = sample_var_re(ec, k);
    const double vs = sample_var_re(es, k);
    INFO("mode " << k << " lambda " << lam);
    CHECK(vc == Catch::Approx(1.0 / (4.0 * lam)).epsilon(0.05));
    CHECK(vs == Catch::Approx(std::exp(-2.0 * r) / (4.0 * lam)).epsilon(0.05));
    // squeezing buys two orders of magnitude in the amplitude quadrature
    CHECK(vs / vc == Catch::Approx(0.01).epsilon(0.10));

    // unbiased reconstruction within three standard errors
    const double se = std::sqrt(vc / T);
    CHECK(std::abs(sample_mean_re(ec, k) - c.values[std::size_t(k)].real()) <= 3.0 * se);
  }

  // modes fluctuate independently: sample correlation within the 3-sigma band
  for (int k = 0; k < L; ++k)
    for (int j = k + 1; j < L; ++j) {
      double mk = sample_mean_re(ec, k), mj = sample_mean_re(ec, j), cov = 0.0;
      for (const auto& t : ec.realizations)
        cov += (t.values[std::size_t(k)].real() - mk) * (t.values[std::size_t(j)].real() - mj);
      cov /= (T - 1);
      const double corr = cov / std::sqrt(sample_var_re(ec, k) * sample_var_re(ec, j));
      INFO("pair " << k << "," << j);
      CHECK(std::abs(corr) <= 3.0 / std::sqrt(double(T)));
    }
}

TEST_CASE("reconstruction rejects eigenvalues below double range") {
  const ProlateBasis small = build_basis({1.0, 6, 128});
  std::vector<ProlateMode> modes;
  for (int n = 0; n < small.num_modes(); ++n) modes.push_back(small.mode(n));
  modes[3].lambda = DecFloat{1.0, -330};
  modes[4].lambda = DecFloat{1.0, -331};
  modes[5].lambda = DecFloat{1.0, -332};
  const ProlateBasis tampered =
      finalize_basis(small.c(), small.matrix_order(), small.precision_bits(), std::move(modes));
  CHECK(tampered.lambda(3) == 0.0);

  const CoeffVector c = default_coeffs(6);
  const NoiseDraw d = sample_draw(make_coherent(), 6, 1, 0);
  CHECK_THROWS_WITH(noisy_reconstruct(c, tampered, 4, d), ContainsSubstring("smaller mode count"));
  CHECK_NOTHROW(noisy_reconstruct(c, tampered, 3, d));
}

TEST_CASE("beam-splitter energy bookkeeping") {
  const ProlateBasis& b = basis18();
  const std::complex<double> a(0.7, 0.2);
  for (int k : {0, 1, 3, 7}) {
    const double res = beamsplitter_energy_check(a, b.lambda(k), b.one_minus_lambda(k));
    CHECK(res <= 1e-12 * std::norm(a));
  }
  CHECK(beamsplitter_energy_check({0.0, 0.0}, 0.5, 0.5) == 0.0);
  // nearly transparent mode: reflected share vanishes
  CHECK(1e-13 * std::norm(a) <= 1e-12);
  CHECK(beamsplitter_energy_check(a, 1.0 - 1e-13, 1e-13) <= 1e-12 * std::norm(a));
}

TEST_CASE("photon number from beam parameters") {
  const double n = photons_from_power(1e-3, 1064e-9, 1e-3);
  CHECK(n == Catch::Approx(5.3e12).epsilon(0.02));
  CHECK(photons_from_power(2e-3, 1064e-9, 1e-3) == 2.0 * n);
  CHECK(photons_from_power(1e-3, 532e-9, 1e-3) == 0.5 * n);
  CHECK_THROWS_AS(photons_from_power(0.0, 1064e-9, 1e-3), config_error);
}

TEST_CASE("ensembles are reproducible and order-independent") {
  const CoeffVector c = default_coeffs(5);
  const ProlateBasis& b = basis18();
  const NoiseModel m = make_squeezed(0.7);
  const Ensemble e1 = run_ensemble(c, b, 5, m, 12, 555, 1.0);
  const Ensemble e2 = run_ensemble(c, b, 5, m, 12, 555, 1.0);
  REQUIRE(e1.realizations.size() == 12);
  for (int t = 0; t < 12; ++t)
    for (int k = 0; k < 5; ++k)
      CHECK(e1.realizations[std::size_t(t)].values[std::size_t(k)] ==
            e2.realizations[std::size_t(t)].values[std::size_t(k)]);

  // trial t is a pure function of (seed, t): recompute one out of order
  const CoeffVector direct = noisy_reconstruct(c, b, 5, sample_draw(m, 5, 555, 9));
  for (int k = 0; k < 5; ++k)
    CHECK(direct.values[std::size_t(k)] == e1.realizations[9].values[std::size_t(k)]);

  const Ensemble e3 = run_ensemble(c, b, 5, m, 12, 556, 1.0);
  CHECK(e3.realizations[0].values[0] != e1.realizations[0].values[0]);

  CHECK_THROWS_AS(run_ensemble(c, b, 5, m, 0, 1, 1.0), config_error);
}

TEST_CASE("realization spectra: readout, bin variance growth, orderings") {
  const ProlateBasis& b = basis18();
  const CoeffVector unit = default_coeffs(7);
  const std::vector<double> bins = {1.0, 3.0, 5.0, 7.0};

  // noise-free readout agrees with the real part of the forward spectrum
  const FieldProfile ref = realization_spectrum(unit, b, bins);
  const FieldProfile fwd = forward_spectrum(unit, b, bins);
  for (std::size_t i = 0; i < bins.size(); ++i)
    CHECK(ref.values[i].real() == Catch::Approx(fwd.values[i].real()).margin(1e-12));

  const int T = 48;
  const std::uint64_t seed = 7;
  auto rel_devs = [&](const Ensemble& e) {
    const FieldProfile g0 = realization_spectrum(e.noise_free, b, bins);
    std::vector<double> acc(bins.size(), 0.0);
    for (const auto& tr : e.realizations) {
      const FieldProfile g = realization_spectrum(tr, b, bins);
      for (std::size_t i = 0; i < bins.size(); ++i) {
        const double d = g.values[i].real() - g0.values[i].real();
        acc[i] += d * d;
      }
    }
    for (std::size_t i = 0; i < bins.size(); ++i)
      acc[i] = std::sqrt(acc[i] / e.trials) / std::abs(g0.values[i].real());
    return acc;
  };

  const Ensemble e12 =
      run_ensemble(scaled(unit, std::sqrt(1e12)), b, 7, make_coherent(), T, seed, 1e12);
  const Ensemble e13 =
      run_ensemble(scaled(unit, std::sqrt(1e13)), b, 7, make_coherent(), T, seed, 1e13);
  const Ensemble esq = run_ensemble(scaled(unit, std::sqrt(1e12)), b, 7,
                                    make_squeezed(std::log(10.0)), T, seed, 1e12);
  const auto d12 = rel_devs(e12), d13 = rel_devs(e13), dsq = rel_devs(esq);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    INFO("bin xi=" << bins[i]);
    // more photons shrink the relative deviation; squeezing shrinks it at
    // matched photon number (matched seeds make these strict)
    CHECK(d13[i] < d12[i]);
    CHECK(dsq[i] < d12[i]);
    // absolute per-bin deviation grows toward higher spatial frequency
    if (i) {
      const double prev = d12[i - 1] * std::abs(realization_spectrum(e12.noise_free, b, bins)
                                                    .values[i - 1]
                                                    .real());
      const double cur =
          d12[i] * std::abs(realization_spectrum(e12.noise_free, b, bins).values[i].real());
      CHECK(prev < cur);
    }
  }
}
