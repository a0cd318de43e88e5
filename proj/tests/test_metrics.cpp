#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "prolatoscope/metrics.hpp"

using namespace prolatoscope;
using Catch::Matchers::ContainsSubstring;

namespace {

const ProlateBasis& basis18() {
  static ProlateBasis b = build_basis({1.0, 18, 256});
  return b;
}

const ObjectField& rect_probe() {
  static ObjectField o = make_rect_source(1.0, 1e-2);
  return o;
}

const CoeffVector& probe_coeffs() {
  static CoeffVector c = project_coeffs(rect_probe(), basis18(), 18);
  return c;
}

PsfProfile analytic_profile(std::function<double(double)> f) {
  PsfProfile p;
  p.grid = make_uniform_grid(-2.0, 2.0, 1e-2);
  for (double s : p.grid) p.values.push_back(f(s));
  p.eval = std::move(f);
  return p;
}

// root of sin(x)/x = 1/2
constexpr double kSincHalfPoint = 1.8954942670339809;

}  // namespace

TEST_CASE("imaging point-spread function") {
  const PsfProfile p = imaging_psf(1.0, default_psf_grid(1.0));
  CHECK(p.eval(0.0) == 1.0);
  CHECK(std::abs(p.eval(kPi)) < 1e-15);
  CHECK(std::abs(p.eval(2.0 * kPi)) < 1e-15);
  CHECK(p.eval(0.7) == Catch::Approx(p.eval(-0.7)).epsilon(1e-15));

  const double w1 = half_width(p);
  CHECK(w1 == Catch::Approx(kSincHalfPoint).margin(2e-9));
  CHECK(w1 == Catch::Approx(1.895).margin(1e-3));

  // argument scaling: the c=2 spot is half as wide
  const double w2 = half_width(imaging_psf(2.0, default_psf_grid(2.0)));
  CHECK(w2 == Catch::Approx(w1 / 2.0).margin(5e-9));
  CHECK(std::abs(imaging_psf(2.0, default_psf_grid(2.0)).eval(kPi / 2.0)) < 1e-15);

  CHECK_THROWS_AS(imaging_psf(0.0, default_psf_grid(1.0)), config_error);
  CHECK_THROWS_AS(imaging_psf(1.0, std::vector<double>{0.0}), config_error);
}

TEST_CASE("half-width bisection on analytic profiles") {
  const PsfProfile tri =
      analytic_profile([](double s) { return std::max(0.0, 1.0 - std::abs(s)); });
  CHECK(half_width(tri) == Catch::Approx(0.5).margin(2e-9));

  const double sigma = 0.3;
  const PsfProfile gauss = analytic_profile(
      [sigma](double s) { return std::exp(-s * s / (2.0 * sigma * sigma)); });
  CHECK(half_width(gauss) ==
        Catch::Approx(sigma * std::sqrt(2.0 * std::log(2.0))).margin(1e-6));

  const PsfProfile flat = analytic_profile([](double) { return 1.0; });
  CHECK_THROWS_WITH(half_width(flat), ContainsSubstring("no half-maximum crossing"));
  CHECK_THROWS_AS(half_width(PsfProfile{}), config_error);
}

TEST_CASE("reconstruction point-spread function and widths") {
  const ProlateBasis& b = basis18();
  const PsfProfile p7 = reconstruction_psf(b, 7, default_core_grid());
  CHECK(p7.eval(0.0) == 1.0);
  CHECK(p7.eval(0.3) == Catch::Approx(p7.eval(-0.3)).epsilon(1e-14));

  // odd modes carry no weight at the origin: L=2 is the L=1 profile
  const PsfProfile p1 = reconstruction_psf(b, 1, default_core_grid());
  const PsfProfile p2 = reconstruction_psf(b, 2, default_core_grid());
  for (std::size_t i = 0; i < p1.values.size(); i += 200) CHECK(p1.values[i] == p2.values[i]);

  const double expected[] = {1.0, 0.537544298, 0.343811082, 0.252433358, 0.199384056,
                             0.164747383};
  const int ls[] = {1, 3, 5, 7, 9, 11};
  double prev = 2.0;
  for (int i = 0; i < 6; ++i) {
    const ReconWidth w = reconstruction_half_width(b, ls[i]);
    INFO("L = " << ls[i]);
    CHECK(w.value == Catch::Approx(expected[i]).margin(2e-9));
    CHECK(w.core_edge == (ls[i] == 1));
    CHECK(w.value <= prev);
    prev = w.value;
  }
  CHECK(reconstruction_half_width(b, 7).value == Catch::Approx(0.252).margin(1e-3));

  CHECK_THROWS_AS(reconstruction_psf(b, 0, default_core_grid()), config_error);
  CHECK_THROWS_AS(reconstruction_psf(b, 19, default_core_grid()), config_error);
}

TEST_CASE("reconstruction PSF integral approaches unit mass") {
  const ProlateBasis& b = basis18();
  const auto [gx, gw] = gauss_legendre(400);
  auto deficit = [&](int L) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      double h = 0.0;
      for (int k = 0; k < L; k += 2) h += b.eval_phi(k, 0.0) * b.eval_phi(k, gx[i]);
      acc += gw[i] * h;
    }
    return std::abs(acc - 1.0);
  };
  const double d3 = deficit(3), d7 = deficit(7), d11 = deficit(11), d15 = deficit(15);
  CHECK(d3 == Catch::Approx(3.011729e-4).epsilon(1e-3));
  CHECK(d7 == Catch::Approx(7.305152e-10).epsilon(1e-3));
  CHECK(d3 > d7);
  CHECK(d7 > d11);
  // by L=11 the deficit sits at the double-precision floor
  CHECK(d11 <= 1e-13);
  CHECK(d15 <= 1e-13);
}

TEST_CASE("input SNR equals the photon budget") {
  CHECK(snr_input(make_rect_source(7.0, 0.3)) == 7.0);
  CHECK(snr_input(make_rect_source(7.0, 1e-2)) == 7.0);
  CHECK(snr_input(make_double_gaussian(1e12, 0.5, 0.1)) == 1e12);
  const std::vector<double> grid = make_uniform_grid(-1.0, 1.0, 1e-2);
  CHECK(snr_input(make_sampled(grid, std::vector<double>(grid.size(), 0.0))) == 0.0);
}

TEST_CASE("reconstructed SNR") {
  const ProlateBasis& b = basis18();
  const CoeffVector& c = probe_coeffs();
  const NoiseModel coh = make_coherent();

  const double r1 = snr_reconstructed(c, b, 1, coh);
  CHECK(r1 == Catch::Approx(b.lambda(0) * std::norm(c.values[0])).epsilon(1e-12));

  // unit-budget table for the narrow rect probe; odd modes add nothing
  const double rho[] = {3.17574933e-3, 3.17574933e-3, 2.74296228e-5, 2.74296228e-5,
                        1.87011297e-9, 1.87011297e-9, 1.53028310e-14, 1.53028310e-14,
                        3.08797651e-20};
  for (int L = 1; L <= 9; ++L) {
    INFO("L = " << L);
    CHECK(snr_reconstructed(c, b, L, coh) == Catch::Approx(rho[L - 1]).epsilon(1e-6));
  }
  CHECK(snr_reconstructed(c, b, 2, coh) == Catch::Approx(r1).epsilon(1e-12));
  CHECK(snr_reconstructed(c, b, 7, coh) < snr_reconstructed(c, b, 5, coh));

  // squeezing lifts the ratio by exactly e^{2r}
  const double r = 0.8;
  CHECK(snr_reconstructed(c, b, 5, make_squeezed(r)) ==
        snr_reconstructed(c, b, 5, coh) * std::exp(2.0 * r));

  // bounded by the retained energy, hence by the input SNR
  double energy = 0.0;
  for (int k = 0; k < 5; ++k) energy += std::norm(c.values[std::size_t(k)]);
  CHECK(snr_reconstructed(c, b, 5, coh) <= energy);
  CHECK(energy <= snr_input(rect_probe()));

  CoeffVector zero;
  zero.L = 2;
  zero.values.assign(2, {0.0, 0.0});
  zero.kind = CoeffKind::object;
  CHECK_THROWS_WITH(snr_reconstructed(zero, b, 2, coh), ContainsSubstring("vanish"));
  CHECK_THROWS_AS(snr_reconstructed(c, b, 0, coh), config_error);
  CHECK_THROWS_AS(snr_reconstructed(c, b, 19, coh), config_error);
}

TEST_CASE("noise figure") {
  const ProlateBasis& b = basis18();
  const CoeffVector& c = probe_coeffs();
  const double R = snr_input(rect_probe());

  CHECK(noise_figure(5.0, 5.0) == 1.0);
  CHECK(noise_figure(R, 1.0) == R);  // the ceiling: F_max at the L* boundary
  CHECK_THROWS_AS(noise_figure(1.0, 0.0), config_error);

  double prev = 0.0;
  for (int L = 1; L <= 9; ++L) {
    const double f = noise_figure(R, snr_reconstructed(c, b, L, make_coherent()));
    INFO("L = " << L);
    CHECK(f >= 1.0);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("mode-count selection rule") {
  const ProlateBasis& b = basis18();
  const ObjectField& probe = rect_probe();
  const NoiseModel coh = make_coherent();
  const NoiseModel sq = make_squeezed(std::log(10.0));

  const double ns[] = {1e3, 1e5, 1e7, 1e9, 1e12, 1e14, 1e15};
  const int l_coh[] = {2, 4, 4, 6, 6, 8, 8};
  const int l_sq[] = {4, 4, 6, 6, 8, 8, 8};
  for (int i = 0; i < 7; ++i) {
    INFO("N = " << ns[i]);
    const ModeSelection mc = select_max_modes(probe, b, coh, ns[i]);
    const ModeSelection ms = select_max_modes(probe, b, sq, ns[i]);
    CHECK(mc.L_star == l_coh[i]);
    CHECK(ms.L_star == l_sq[i]);
    CHECK(mc.reconstruction_possible);
    CHECK(ms.L_star >= mc.L_star);
  }

  // monotone in the photon number
  int prev = 0;
  for (double n : {1e6, 1e9, 1e12, 1e15}) {
    const int l = select_max_modes(probe, b, coh, n).L_star;
    CHECK(l >= prev);
    prev = l;
  }

  // photon-rich limit saturates at the basis size
  CHECK(select_max_modes(probe, b, coh, 1e60).L_star == b.num_modes());

  // starved: no mode reaches unit SNR
  const ModeSelection none = select_max_modes(probe, b, coh, 10.0);
  CHECK(none.L_star == 0);
  CHECK_FALSE(none.reconstruction_possible);

  // squeezing acts exactly as an e^{2r} photon boost
  for (double r : {0.35, std::log(10.0)})
    for (double n : {1e3, 3.7e7, 1e9}) {
      const ModeSelection a = select_max_modes(probe, b, make_squeezed(r), n);
      const ModeSelection bsel = select_max_modes(probe, b, coh, std::exp(2.0 * r) * n);
      CHECK(a.L_star == bsel.L_star);
    }

  CHECK_THROWS_AS(select_max_modes(probe, b, coh, -1.0), config_error);
}

TEST_CASE("super-resolution factor") {
  const ProlateBasis& b = basis18();
  const SuperresReport s7 = superres_factor(1.0, b, 7);
  CHECK(s7.S == Catch::Approx(7.508890).margin(1e-4));
  CHECK(s7.S == Catch::Approx(7.5).margin(0.1));
  CHECK(s7.W == Catch::Approx(1.895).margin(1e-3));
  CHECK(s7.W_L == Catch::Approx(0.252).margin(1e-3));
  CHECK_FALSE(s7.core_edge);

  const SuperresReport s1 = superres_factor(1.0, b, 1);
  CHECK(s1.core_edge);
  CHECK(s1.W_L == 1.0);
  CHECK(s1.S >= 1.0);

  double prev = 0.0;
  for (int L : {1, 3, 5, 7, 9, 11}) {
    const double s = superres_factor(1.0, b, L).S;
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("super-resolution sweep") {
  const ProlateBasis& b = basis18();
  const std::vector<double> ns = {1e3, 1e5, 1e7, 1e9, 1e12, 1e14, 1e15};
  const std::vector<NoiseModel> models = {make_coherent(), make_squeezed(std::log(10.0))};
  const std::vector<SweepPoint> pts = sweep_S_vs_N(ns, models, b);
  REQUIRE(pts.size() == 14);

  const int l_coh[] = {2, 4, 4, 6, 6, 8, 8};
  const int l_sq[] = {4, 4, 6, 6, 8, 8, 8};
  double prev_s = 0.0;
  for (int i = 0; i < 7; ++i) {
    INFO("row " << i);
    CHECK(pts[std::size_t(i)].model.kind == NoiseKind::coherent);
    CHECK(pts[std::size_t(i)].photons == ns[std::size_t(i)]);
    CHECK(pts[std::size_t(i)].L_star == l_coh[i]);
    CHECK(pts[std::size_t(i + 7)].model.kind == NoiseKind::squeezed);
    CHECK(pts[std::size_t(i + 7)].L_star == l_sq[i]);
    // squeezed curve sits at or above the coherent one
    CHECK(pts[std::size_t(i + 7)].S >= pts[std::size_t(i)].S);
    // coherent S non-decreasing in N
    CHECK(pts[std::size_t(i)].S >= prev_s);
    prev_s = pts[std::size_t(i)].S;
    CHECK(pts[std::size_t(i)].S == Catch::Approx(pts[std::size_t(i)].W /
                                                 pts[std::size_t(i)].W_L)
                                       .epsilon(1e-15));
  }

  // the squeezed curve is the coherent curve shifted by e^{2r} = 100 in N
  const std::vector<SweepPoint> shifted =
      sweep_S_vs_N({1e5, 1e7, 1e9, 1e11, 1e14, 1e16, 1e17}, {make_coherent()}, b);
  for (int i = 0; i < 7; ++i) {
    CHECK(shifted[std::size_t(i)].L_star == pts[std::size_t(i + 7)].L_star);
    CHECK(shifted[std::size_t(i)].S == pts[std::size_t(i + 7)].S);
  }

  // a starved point keeps the imaging width but reports no reconstruction
  const std::vector<SweepPoint> starved = sweep_S_vs_N({10.0}, {make_coherent()}, b);
  CHECK(starved[0].L_star == 0);
  CHECK_FALSE(starved[0].reconstruction_possible);
  CHECK(starved[0].W > 0.0);
  CHECK(starved[0].S == 0.0);

  const std::string csv = export_sweep_csv(pts);
  CHECK(csv.rfind("N,model,r,L_star,W,W_L,S\n", 0) == 0);
  CHECK_THAT(csv, ContainsSubstring("\n1000,coherent,0,2,"));
  CHECK_THAT(csv, ContainsSubstring(",squeezed,"));
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 15);

  const std::string json = sweep_summary_json(pts, b);
  CHECK_THAT(json, ContainsSubstring("\"basis-checksum\": \"" + basis_checksum(b) + "\""));
  CHECK_THAT(json, ContainsSubstring("\"probe-eps\": 0.01"));
  CHECK_THAT(json, ContainsSubstring("\"L-star\": 8"));
  CHECK_THAT(json, ContainsSubstring("\"c\": 1"));

  CHECK_THROWS_AS(sweep_S_vs_N({}, models, b), config_error);
  CHECK_THROWS_AS(sweep_S_vs_N(ns, {}, b), config_error);
}
