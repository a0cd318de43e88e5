#pragma once

// Linear prolate spheroidal wave functions via a Legendre-Galerkin eigenproblem
// solved in extended precision: phi_n (core-normalized), psi_n (full line),
// chi_n (wings), and eigenvalues lambda_n resolved far below double range.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bigfloat.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "special.hpp"

namespace prolatoscope {

// ---------------------------------------------------------------------------
// operator matrix
// ---------------------------------------------------------------------------

// Nonzero entries of the symmetric Legendre-basis operator commuting with the
// sinc kernel: A[k,k] and A[k,k+2] (parity-decoupled pentadiagonal structure).
struct OperatorMatrix {
  double c = 0.0;
  int order = 0;                // N: Legendre truncation length, even
  std::vector<double> diag;     // A[k,k],   k = 0..N-1
  std::vector<double> super2;   // A[k,k+2], k = 0..N-3
};

namespace detail {

template <class Real>
Real op_diag_entry(const Real& c2, int k) {
  const long num = 2l * k * (k + 1) - 1;
  const long den = (2l * k + 3) * (2l * k - 1);
  return Real(1l * k * (k + 1)) + c2 * num / den;
}

template <class Real>
Real op_super2_entry(const Real& c2, int k) {
  using std::sqrt;
  const long sq = (2l * k + 1) * (2l * k + 5);
  return c2 * ((k + 2.0) * (k + 1.0)) / ((2.0 * k + 3.0) * sqrt(Real(sq)));
}

}  // namespace detail

inline OperatorMatrix build_operator_matrix(double c, int order) {
  if (c < 0.0) throw config_error("build_operator_matrix: c must be non-negative");
  if (order < 4) throw config_error("build_operator_matrix: order must be >= 4");
  OperatorMatrix m;
  m.c = c;
  m.order = order;
  m.diag.resize(order);
  m.super2.resize(order - 2);
  const double c2 = c * c;
  for (int k = 0; k < order; ++k) m.diag[k] = detail::op_diag_entry(c2, k);
  for (int k = 0; k + 2 < order; ++k) m.super2[k] = detail::op_super2_entry(c2, k);
  return m;
}

// ---------------------------------------------------------------------------
// extended-precision eigensolve
// ---------------------------------------------------------------------------

struct EigenSolution {
  int order = 0;
  std::vector<BigFloat> chi;                 // ascending operator eigenvalues
  std::vector<std::vector<BigFloat>> gamma;  // unit Legendre coordinate vectors, length order
  std::vector<int> parity;                   // support parity of each eigenvector
};

namespace detail {

// Cyclic Jacobi on a dense symmetric matrix at the active BigFloat precision.
// a: row-major m*m, overwritten; v receives the accumulated rotations
// (eigenvector e in column e, eigenvalue on a's diagonal).
inline void jacobi_eigensolve(std::vector<BigFloat>& a, int m, std::vector<BigFloat>& v,
                              const std::string& tag) {
  v.assign(std::size_t(m) * m, BigFloat(0));
  for (int i = 0; i < m; ++i) v[std::size_t(i) * m + i] = 1;
  const BigFloat eps = pow(BigFloat(10), 3 - int(BigFloat::default_precision()));
  const int max_sweeps = 80;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    BigFloat off(0), dia(0);
    for (int p = 0; p < m; ++p) {
      dia += a[p * m + p] * a[p * m + p];
      for (int q = p + 1; q < m; ++q) off += a[p * m + q] * a[p * m + q];
    }
    if (off <= eps * eps * (dia + off)) return;
    for (int p = 0; p < m - 1; ++p) {
      for (int q = p + 1; q < m; ++q) {
        BigFloat apq = a[p * m + q];
        if (apq == 0) continue;
        BigFloat app = a[p * m + p], aqq = a[q * m + q];
        if (abs(apq) <= eps * (abs(app) + abs(aqq))) {
          a[p * m + q] = a[q * m + p] = 0;
          continue;
        }
        BigFloat theta = (aqq - app) / (2 * apq);
        BigFloat t = (theta >= 0 ? BigFloat(1) : BigFloat(-1)) / (abs(theta) + sqrt(theta * theta + 1));
        BigFloat cs = 1 / sqrt(t * t + 1), sn = t * cs;
        a[p * m + p] = app - t * apq;
        a[q * m + q] = aqq + t * apq;
        a[p * m + q] = a[q * m + p] = 0;
        for (int i = 0; i < m; ++i) {
          if (i == p || i == q) continue;
          BigFloat aip = a[i * m + p], aiq = a[i * m + q];
          a[i * m + p] = a[p * m + i] = cs * aip - sn * aiq;
          a[i * m + q] = a[q * m + i] = sn * aip + cs * aiq;
        }
        for (int i = 0; i < m; ++i) {
          BigFloat vip = v[i * m + p], viq = v[i * m + q];
          v[i * m + p] = cs * vip - sn * viq;
          v[i * m + q] = sn * vip + cs * viq;
        }
      }
    }
  }
  throw numeric_error("jacobi_eigensolve: no convergence after 80 sweeps (" + tag + ")");
}

}  // namespace detail

// Parity-split solve of the operator eigenproblem. Eigenpairs come back
// globally sorted by ascending chi, which is the prolate index order; each
// eigenvector is unit-normalized with its first nonzero coordinate positive.
inline EigenSolution solve_eigenproblem(const OperatorMatrix& m, int precision_bits) {
  if (precision_bits < 128) throw config_error("solve_eigenproblem: precision_bits must be >= 128");
  PrecisionGuard guard(precision_bits);
  const int N = m.order;
  const BigFloat c2 = BigFloat(m.c) * m.c;
  std::vector<std::pair<BigFloat, int>> order_keys;  // (chi, pair index)
  std::vector<std::vector<BigFloat>> vecs;
  std::vector<int> pars;
  for (int par = 0; par < 2; ++par) {
    std::vector<int> ks;
    for (int k = par; k < N; k += 2) ks.push_back(k);
    const int M = int(ks.size());
    std::vector<BigFloat> a(std::size_t(M) * M, BigFloat(0));
    for (int i = 0; i < M; ++i) {
      a[std::size_t(i) * M + i] = detail::op_diag_entry(c2, ks[i]);
      if (i + 1 < M) {
        BigFloat e = detail::op_super2_entry(c2, ks[i]);
        a[std::size_t(i) * M + i + 1] = e;
        a[std::size_t(i + 1) * M + i] = e;
      }
    }
    std::vector<BigFloat> v;
    detail::jacobi_eigensolve(a, M, v, par == 0 ? "even chain" : "odd chain");
    for (int e = 0; e < M; ++e) {
      std::vector<BigFloat> g(N, BigFloat(0));
      BigFloat norm2(0);
      for (int i = 0; i < M; ++i) {
        g[ks[i]] = v[std::size_t(i) * M + e];
        norm2 += g[ks[i]] * g[ks[i]];
      }
      BigFloat inv = 1 / sqrt(norm2);
      // sign convention: first nonzero coordinate (k = parity) positive
      int k0 = par;
      while (k0 < N && g[k0] == 0) k0 += 2;
      if (k0 < N && g[k0] < 0) inv = -inv;
      for (int i = 0; i < M; ++i) g[ks[i]] *= inv;
      order_keys.emplace_back(a[std::size_t(e) * M + e], int(vecs.size()));
      vecs.push_back(std::move(g));
      pars.push_back(par);
    }
  }
  std::sort(order_keys.begin(), order_keys.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  EigenSolution sol;
  sol.order = N;
  for (const auto& [chi, idx] : order_keys) {
    sol.chi.push_back(chi);
    sol.gamma.push_back(std::move(vecs[idx]));
    sol.parity.push_back(pars[idx]);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// eigenvalue extraction
// ---------------------------------------------------------------------------

// lambda_n from the value (even n) or slope (odd n) of the finite Fourier
// transform of phi_n at xi=0, where only the k=0 / k=1 Legendre terms survive.
// Avoids the catastrophic cancellation a quadrature of psi_n^2 would hit at
// lambda ~ 1e-50. Assumes the caller's PrecisionGuard is active.
inline BigFloat compute_lambda(int n, const std::vector<BigFloat>& gamma, double c) {
  const int N = int(gamma.size());
  if (n < 0 || N < 2) throw config_error("compute_lambda: bad arguments");
  const BigFloat pi = 4 * atan(BigFloat(1));
  const BigFloat cc(c);
  if (n % 2 == 0) {
    BigFloat p0(1);  // P_k(0), even k
    BigFloat phi0(0);
    for (int k = 0; k < N; k += 2) {
      phi0 += gamma[k] * sqrt((2 * k + 1) / BigFloat(2)) * p0;
      p0 *= -BigFloat(k + 1) / (k + 2);
    }
    if (phi0 == 0)
      throw numeric_error("compute_lambda: phi(0) vanished for even mode " + std::to_string(n) +
                          " (parity bookkeeping)");
    const BigFloat r = sqrt(BigFloat(2)) * gamma[0] / phi0;
    return cc / (2 * pi) * r * r;
  }
  BigFloat pm(1);  // P_{k-1}(0), tracking even index k-1
  BigFloat dphi0(0);
  for (int k = 1; k < N; k += 2) {
    dphi0 += gamma[k] * sqrt((2 * k + 1) / BigFloat(2)) * (BigFloat(k) * pm);
    pm *= -BigFloat(k) / (k + 1);
  }
  if (dphi0 == 0)
    throw numeric_error("compute_lambda: phi'(0) vanished for odd mode " + std::to_string(n) +
                        " (parity bookkeeping)");
  const BigFloat r = sqrt(BigFloat(6)) / 3 * cc * gamma[1] / dphi0;
  return cc / (2 * pi) * r * r;
}

// ---------------------------------------------------------------------------
// basis
// ---------------------------------------------------------------------------

struct BasisConfig {
  double c = 1.0;
  int num_modes = 18;
  int precision_bits = 256;
};

struct ProlateMode {
  int index = 0;
  int parity = 0;
  DecFloat lambda;
  double chi_operator_eigenvalue = 0.0;
  std::vector<double> gamma;             // double-rounded coordinates, exact zeros off-parity
  std::vector<std::string> gamma_dec;    // 42-significant-digit decimal strings
};

class ProlateBasis {
 public:
  double c() const { return c_; }
  int num_modes() const { return int(modes_.size()); }
  int matrix_order() const { return order_; }
  int precision_bits() const { return precision_bits_; }
  double trace_bound() const { return 2.0 * c_ / kPi; }

  const ProlateMode& mode(int n) const {
    check_index(n);
    return modes_[n];
  }
  double lambda(int n) const {
    check_index(n);
    return lambda_d_[n];
  }
  const DecFloat& lambda_dec(int n) const {
    check_index(n);
    return modes_[n].lambda;
  }
  double one_minus_lambda(int n) const {
    check_index(n);
    return one_minus_lambda_[n];
  }

  // phi_n(s) on the core |s| <= 1
  double eval_phi(int n, double s) const {
    check_index(n);
    if (std::abs(s) > 1.0)
      throw std::domain_error("eval_phi: |s| > 1 (phi lives on the core; use eval_chi for the wings)");
    thread_local std::vector<double> P;
    legendre_array(order_ - 1, s, P);
    return dot_coef(n, P);
  }

  // psi_n(x) anywhere on the real line
  double eval_psi(int n, double x) const {
    check_index(n);
    thread_local std::vector<double> J;
    J = sph_bessel_array(order_ - 1, c_ * std::abs(x));
    double v = psi_sum(n, J);
    if (x < 0.0 && (n & 1)) v = -v;  // exact odd parity
    return v;
  }

  // chi_n(s) on the wings |s| > 1
  double eval_chi(int n, double s) const {
    check_index(n);
    if (std::abs(s) <= 1.0) throw std::domain_error("eval_chi: defined only for |s| > 1");
    const double om = one_minus_lambda_[n];
    if (om <= 0.0)
      throw numeric_error("eval_chi: 1 - lambda underflows double for mode " + std::to_string(n));
    return eval_psi(n, s) / std::sqrt(om);
  }

  // all phi_n(s) for one s (one Legendre pass)
  void eval_phi_all(double s, std::vector<double>& out) const {
    if (std::abs(s) > 1.0) throw std::domain_error("eval_phi_all: |s| > 1");
    thread_local std::vector<double> P;
    legendre_array(order_ - 1, s, P);
    out.resize(modes_.size());
    for (std::size_t n = 0; n < modes_.size(); ++n) out[n] = dot_coef(int(n), P);
  }

  // all psi_n(x) for one x (one Bessel pass)
  void eval_psi_all(double x, std::vector<double>& out) const {
    thread_local std::vector<double> J;
    J = sph_bessel_array(order_ - 1, c_ * std::abs(x));
    out.resize(modes_.size());
    for (std::size_t n = 0; n < modes_.size(); ++n) {
      double v = psi_sum(int(n), J);
      if (x < 0.0 && (n & 1)) v = -v;
      out[n] = v;
    }
  }

 private:
  friend ProlateBasis finalize_basis(double, int, int, std::vector<ProlateMode>&&);

  void check_index(int n) const {
    if (n < 0 || n >= int(modes_.size()))
      throw std::out_of_range("mode index " + std::to_string(n) + " outside basis of " +
                              std::to_string(modes_.size()) + " modes");
  }

  double dot_coef(int n, const std::vector<double>& P) const {
    const auto& cf = coef_[n];
    double acc = 0.0;
    for (int k = 0; k < order_; ++k) acc += cf[k] * P[k];
    return acc;
  }

  double psi_sum(int n, const std::vector<double>& J) const {
    const auto& cf = coef_[n];
    double acc = 0.0;
    for (int k = n & 1; k < order_; k += 2) {
      const double term = cf[k] * J[k];
      acc += ((std::abs(n - k) / 2) % 2) ? -term : term;
    }
    return psi_scale_ * acc;
  }

  double c_ = 0.0;
  int order_ = 0;
  int precision_bits_ = 0;
  double psi_scale_ = 0.0;  // sqrt(2c/pi)
  std::vector<ProlateMode> modes_;
  std::vector<std::vector<double>> coef_;  // gamma_k * sqrt(k+1/2)
  std::vector<double> lambda_d_, one_minus_lambda_;
};

// Shared final assembly for freshly built and loaded bases: the evaluation
// state is derived from the decimal-string serialization in both cases, so a
// rebuilt basis and a cache-loaded one behave bit-identically downstream.
inline ProlateBasis finalize_basis(double c, int order, int precision_bits,
                                   std::vector<ProlateMode>&& modes) {
  if (!(c > 0.0)) throw numeric_error("basis: c must be positive");
  const int K = int(modes.size());
  if (K < 1) throw numeric_error("basis: at least one mode required");
  if (order < K + 4) throw numeric_error("basis: matrix order below K+4");
  if (order % 2) throw numeric_error("basis: matrix order must be even");
  ProlateBasis b;
  b.c_ = c;
  b.order_ = order;
  b.precision_bits_ = precision_bits;
  b.psi_scale_ = std::sqrt(2.0 * c / kPi);
  b.coef_.resize(K);
  b.lambda_d_.resize(K);
  b.one_minus_lambda_.resize(K);
  for (int n = 0; n < K; ++n) {
    ProlateMode& md = modes[n];
    if (md.index != n) throw numeric_error("basis: mode index mismatch at position " + std::to_string(n));
    if (md.parity != n % 2) throw numeric_error("basis: parity mismatch at mode " + std::to_string(n));
    if (int(md.gamma_dec.size()) != order)
      throw numeric_error("basis: gamma length mismatch at mode " + std::to_string(n));
    md.gamma.resize(order);
    double norm2 = 0.0;
    for (int k = 0; k < order; ++k) {
      md.gamma[k] = std::strtod(md.gamma_dec[k].c_str(), nullptr);
      if (k % 2 != n % 2 && md.gamma[k] != 0.0)
        throw numeric_error("basis: nonzero off-parity coordinate at mode " + std::to_string(n) +
                            ", k=" + std::to_string(k));
      norm2 += md.gamma[k] * md.gamma[k];
    }
    if (std::abs(norm2 - 1.0) > 1e-10)
      throw numeric_error("basis: coordinate vector not unit-normalized at mode " + std::to_string(n));
    if (!(md.lambda.mantissa > 0.0) || md.lambda.exponent10 > -1)
      throw numeric_error("basis: lambda outside (0,1) at mode " + std::to_string(n));
    if (n > 0 && !(md.lambda < modes[n - 1].lambda))
      throw numeric_error("basis: lambda not strictly decreasing at mode " + std::to_string(n));
    b.lambda_d_[n] = md.lambda.to_double();
    b.one_minus_lambda_[n] = std::max(1.0 - b.lambda_d_[n], 0.0);
    auto& cf = b.coef_.at(n);
    cf.resize(order);
    for (int k = 0; k < order; ++k) cf[k] = md.gamma[k] * std::sqrt(k + 0.5);
  }
  double partial_trace = 0.0;
  for (int n = 0; n < K; ++n) partial_trace += b.lambda_d_[n];
  if (partial_trace > b.trace_bound() + 1e-9)
    throw numeric_error("basis: partial eigenvalue trace exceeds 2c/pi");
  b.modes_ = std::move(modes);
  return b;
}

inline ProlateBasis build_basis(const BasisConfig& cfg) {
  if (!(cfg.c > 0.0)) throw config_error("build_basis: c must be positive");
  if (cfg.num_modes < 1) throw config_error("build_basis: num_modes must be >= 1");
  if (cfg.precision_bits < 128) throw config_error("build_basis: precision_bits must be >= 128");
  const int K = cfg.num_modes;
  int N = std::max(2 * K + 30, int(std::ceil(4.0 * cfg.c)) + 30);
  if (N % 2) ++N;
  PrecisionGuard guard(cfg.precision_bits);
  const BigFloat tail_tol = pow(BigFloat(10), -40);
  EigenSolution sol;
  for (int attempt = 0;; ++attempt) {
    OperatorMatrix m = build_operator_matrix(cfg.c, N);
    sol = solve_eigenproblem(m, cfg.precision_bits);
    for (int n = 0; n < K; ++n)
      if (sol.parity[n] != n % 2)
        throw numeric_error("build_basis: parity interleave violated at mode " + std::to_string(n));
    BigFloat tail(0);
    for (int n = 0; n < K; ++n) {
      BigFloat t1 = abs(sol.gamma[n][N - 1]);
      BigFloat t2 = abs(sol.gamma[n][N - 2]);
      if (t1 > tail) tail = t1;
      if (t2 > tail) tail = t2;
    }
    if (tail < tail_tol) break;
    if (attempt >= 2)
      throw numeric_error("build_basis: Legendre tail not converged after doubling order twice");
    N *= 2;
  }
  std::vector<BigFloat> lam(K);
  for (int n = 0; n < K; ++n) {
    lam[n] = compute_lambda(n, sol.gamma[n], cfg.c);
    if (!(lam[n] > 0 && lam[n] < 1))
      throw numeric_error("build_basis: lambda outside (0,1) at mode " + std::to_string(n));
    if (n > 0 && !(lam[n] < lam[n - 1]))
      throw numeric_error("build_basis: lambda not strictly decreasing at mode " + std::to_string(n));
  }
  std::vector<ProlateMode> modes(K);
  for (int n = 0; n < K; ++n) {
    ProlateMode& md = modes[n];
    md.index = n;
    md.parity = n % 2;
    md.lambda = DecFloat::from_big(lam[n]);
    md.chi_operator_eigenvalue = sol.chi[n].convert_to<double>();
    md.gamma_dec.resize(N);
    for (int k = 0; k < N; ++k)
      md.gamma_dec[k] =
          (k % 2 != n % 2) ? "0" : sol.gamma[n][k].str(42, std::ios_base::scientific);
  }
  return finalize_basis(cfg.c, N, cfg.precision_bits, std::move(modes));
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

inline std::string serialize_basis(const ProlateBasis& b) {
  std::ostringstream out;
  out << "PROLATOSCOPE-BASIS v1\n";
  out << "c=" << format_double(b.c()) << "\n";
  out << "K=" << b.num_modes() << "\n";
  out << "N=" << b.matrix_order() << "\n";
  out << "precision_bits=" << b.precision_bits() << "\n";
  for (int n = 0; n < b.num_modes(); ++n) {
    const ProlateMode& md = b.mode(n);
    out << "mode=" << n << " lambda=" << md.lambda.str()
        << " chi=" << format_double(md.chi_operator_eigenvalue) << "\n";
    out << "gamma=";
    for (int k = 0; k < b.matrix_order(); ++k) {
      if (k) out << ",";
      out << md.gamma_dec[k];
    }
    out << "\n";
  }
  const std::string body = out.str();
  return body + "checksum=" + to_hex16(fnv1a64(body)) + "\n";
}

inline std::string basis_checksum(const ProlateBasis& b) {
  return to_hex16(fnv1a64(serialize_basis(b)));
}

inline void save_basis(const ProlateBasis& b, const std::string& path) {
  write_text_file(path, serialize_basis(b));
}

namespace detail {

struct LineReader {
  const std::string& text;
  const std::string& path;
  std::size_t pos = 0;
  int lineno = 0;

  std::string next() {
    if (pos >= text.size())
      throw numeric_error("basis file " + path + ": unexpected end of file after line " +
                          std::to_string(lineno));
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw numeric_error("basis file " + path + ": " + what + " (line " + std::to_string(lineno) +
                        ")");
  }
};

inline std::string expect_field(LineReader& r, const std::string& key) {
  std::string line = r.next();
  if (line.rfind(key, 0) != 0) r.fail("expected '" + key + "...'");
  return line.substr(key.size());
}

}  // namespace detail

inline ProlateBasis load_basis(const std::string& path) {
  if (!file_exists(path)) throw missing_artifact_error("basis cache not found: " + path);
  const std::string text = read_text_file(path);
  detail::LineReader r{text, path};
  if (r.next() != "PROLATOSCOPE-BASIS v1") r.fail("version mismatch or not a basis file");
  const double c = std::strtod(detail::expect_field(r, "c=").c_str(), nullptr);
  const int K = std::atoi(detail::expect_field(r, "K=").c_str());
  const int N = std::atoi(detail::expect_field(r, "N=").c_str());
  const int bits = std::atoi(detail::expect_field(r, "precision_bits=").c_str());
  if (K < 1 || N < K + 4) r.fail("implausible K/N header");
  std::vector<ProlateMode> modes(K);
  for (int n = 0; n < K; ++n) {
    std::string line = r.next();
    std::istringstream ls(line);
    std::string f_mode, f_lambda, f_chi;
    if (!(ls >> f_mode >> f_lambda >> f_chi)) r.fail("malformed mode line");
    if (f_mode.rfind("mode=", 0) != 0 || f_lambda.rfind("lambda=", 0) != 0 ||
        f_chi.rfind("chi=", 0) != 0)
      r.fail("malformed mode line");
    ProlateMode& md = modes[n];
    md.index = std::atoi(f_mode.c_str() + 5);
    if (md.index != n) r.fail("mode index out of sequence");
    md.parity = n % 2;
    try {
      md.lambda = DecFloat::parse(f_lambda.substr(7));
    } catch (const numeric_error& e) {
      r.fail(e.what());
    }
    md.chi_operator_eigenvalue = std::strtod(f_chi.c_str() + 4, nullptr);
    std::string gline = detail::expect_field(r, "gamma=");
    md.gamma_dec.clear();
    std::size_t start = 0;
    while (true) {
      auto comma = gline.find(',', start);
      md.gamma_dec.push_back(gline.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (int(md.gamma_dec.size()) != N) r.fail("gamma coordinate count != N");
  }
  const std::size_t body_end = r.pos;
  std::string csline = detail::expect_field(r, "checksum=");
  const std::string expect = to_hex16(fnv1a64(text.substr(0, body_end)));
  if (csline != expect) r.fail("checksum mismatch (file corrupt)");
  try {
    return finalize_basis(c, N, bits, std::move(modes));
  } catch (const numeric_error& e) {
    throw numeric_error("basis file " + path + ": " + e.what());
  }
}

}  // namespace prolatoscope
