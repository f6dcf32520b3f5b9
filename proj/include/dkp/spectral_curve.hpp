#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dkp/errors.hpp"
#include "dkp/parallel.hpp"
#include "dkp/torus_lattice.hpp"

namespace dkp {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Relative threshold below which a curve coefficient counts as absent.
inline constexpr double kSupportThreshold = 1e-9;

/// Exponent pair (i, j) of a monomial alpha^i beta^j.
struct Exponent {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const Exponent&, const Exponent&) = default;
};

/// Row/column of W belonging to lattice site (n, m); m is the more significant index.
inline int site_index(int N, int M, long long n, long long m) { return wrap(m, M) * N + wrap(n, N); }

/// The N x N block X(m)(alpha): -A on the diagonal, -B below it, 1 above it,
/// closed cyclically by the corners -B(0,m)/alpha at (0,N-1) and alpha at (N-1,0).
inline ComplexMatrix block_X(const LatticeState& state, int m, Complex alpha) {
  if (alpha == Complex{}) throw NumericalError("X(m) is undefined at alpha = 0");
  const int N = state.N();
  ComplexMatrix x = ComplexMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    x(i, i) += -state.A(i, m);
    if (i == 0) {
      x(0, N - 1) += -state.B(0, m) / alpha;
    } else {
      x(i, i - 1) += -state.B(i, m);
    }
    if (i == N - 1) {
      x(N - 1, 0) += alpha;
    } else {
      x(i, i + 1) += 1.0;
    }
  }
  return x;
}

/// The NM x NM operator W(alpha, beta): diagonal blocks -beta*I (block 0) and
/// -I (others), block (m+1, m) equal to X(m), all indices mod M.
inline ComplexMatrix assemble_W(const LatticeState& state, Complex alpha, Complex beta) {
  if (alpha == Complex{}) throw NumericalError("W is undefined at alpha = 0");
  const int N = state.N();
  const int M = state.M();
  ComplexMatrix w = ComplexMatrix::Zero(N * M, N * M);
  for (int n = 0; n < N; ++n) w(n, n) = -beta;
  for (int k = N; k < N * M; ++k) w(k, k) = -1.0;
  for (int m = 0; m < M; ++m) {
    const int row = ((m + 1) % M) * N;
    w.block(row, m * N, N, N) += block_X(state, m, alpha);
  }
  return w;
}

inline Complex det_W(const LatticeState& state, Complex alpha, Complex beta) {
  return assemble_W(state, alpha, beta).partialPivLu().determinant();
}

/// Fields rescaled by the weights of the grading: A -> lambda A, B -> lambda^2 B.
/// det W(lambda^N alpha, lambda^M beta) on the result equals lambda^{NM} det W(alpha, beta).
inline LatticeState weighted_rescale(const LatticeState& state, Complex lambda) {
  TorusGrid a = state.A();
  TorusGrid b = state.B();
  for (auto& v : a.values()) v *= lambda;
  for (auto& v : b.values()) v *= lambda * lambda;
  return {std::move(a), std::move(b)};
}

/// Product of the block determinants det X(m)(alpha) with the sign (-1)^{N(M-1)}
/// contributed by the -I blocks. Equals det W(alpha, 0).
inline Complex block_determinant_product(const LatticeState& state, Complex alpha) {
  Complex product = ((state.N() * (state.M() - 1)) % 2 == 0) ? 1.0 : -1.0;
  for (int m = 0; m < state.M(); ++m) product *= block_X(state, m, alpha).partialPivLu().determinant();
  return product;
}

namespace detail {

inline Complex unit_root(long long k, long long order) {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(wrap(k, static_cast<int>(order))) /
                             static_cast<double>(order));
}

}  // namespace detail

/// Coefficients c(i, j) of alpha^i beta^j in det W, for i in [-M, M], j in [0, N].
class CurvePolynomial {
 public:
  CurvePolynomial(int N, int M, ComplexMatrix shifted) : N_(N), M_(M), c_(std::move(shifted)) {}

  int N() const { return N_; }
  int M() const { return M_; }

  Complex coeff(int i, int j) const {
    if (i < -M_ || i > M_ || j < 0 || j > N_) return {};
    return c_(i + M_, j);
  }

  /// Coefficients indexed by (i + M, j): the polynomial alpha^M det W.
  const ComplexMatrix& shifted() const { return c_; }

  double max_abs() const { return c_.cwiseAbs().maxCoeff(); }

  Complex evaluate(Complex alpha, Complex beta) const {
    Complex total{};
    for (int i = -M_; i <= M_; ++i) {
      Complex inner{};
      for (int j = N_; j >= 0; --j) inner = inner * beta + coeff(i, j);
      total += inner * std::pow(alpha, i);
    }
    return total;
  }

  /// Ascending coefficients in alpha of alpha^M det W at fixed beta (degree 2M).
  std::vector<Complex> alpha_coefficients(Complex beta) const {
    std::vector<Complex> out(2 * M_ + 1);
    for (int p = 0; p <= 2 * M_; ++p) {
      Complex v{};
      for (int j = N_; j >= 0; --j) v = v * beta + c_(p, j);
      out[p] = v;
    }
    return out;
  }

  /// Every (i, j) in coefficient order: i ascending, then j ascending.
  std::vector<Exponent> exponents() const {
    std::vector<Exponent> out;
    for (int i = -M_; i <= M_; ++i)
      for (int j = 0; j <= N_; ++j) out.push_back({i, j});
    return out;
  }

 private:
  int N_;
  int M_;
  ComplexMatrix c_;
};

/// Recovers the curve polynomial by sampling alpha^M det W on the
/// (2M+1) x (N+1) grid of roots of unity and applying the inverse DFT in each
/// variable. Exact up to roundoff because the bidegree is known in advance.
inline CurvePolynomial curve_polynomial(const LatticeState& state) {
  const int N = state.N();
  const int M = state.M();
  const int P = 2 * M + 1;
  const int Q = N + 1;

  ComplexMatrix samples(P, Q);
  parallel_for(static_cast<std::size_t>(P) * Q, [&](std::size_t k) {
    const int s = static_cast<int>(k) / Q;
    const int t = static_cast<int>(k) % Q;
    const Complex alpha = detail::unit_root(s, P);
    const Complex beta = detail::unit_root(t, Q);
    samples(s, t) = std::pow(alpha, M) * det_W(state, alpha, beta);
  });

  ComplexMatrix along_beta(P, Q);
  for (int s = 0; s < P; ++s) {
    for (int q = 0; q < Q; ++q) {
      Complex acc{};
      for (int t = 0; t < Q; ++t) acc += samples(s, t) * detail::unit_root(-static_cast<long long>(q) * t, Q);
      along_beta(s, q) = acc / static_cast<double>(Q);
    }
  }
  ComplexMatrix coeffs(P, Q);
  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < Q; ++q) {
      Complex acc{};
      for (int s = 0; s < P; ++s) acc += along_beta(s, q) * detail::unit_root(-static_cast<long long>(p) * s, P);
      coeffs(p, q) = acc / static_cast<double>(P);
    }
  }
  return {N, M, std::move(coeffs)};
}

/// Copy of the curve with every coefficient outside the generic support set to
/// zero. Those positions vanish identically; clearing their interpolation noise
/// matters once they are multiplied by large powers of beta.
inline CurvePolynomial restricted_to_generic_support(const CurvePolynomial& curve) {
  const int N = curve.N();
  const int M = curve.M();
  ComplexMatrix c = curve.shifted();
  for (int i = -M; i <= M; ++i)
    for (int j = 0; j <= N; ++j)
      if (j * M + std::abs(i) * N > N * M) c(i + M, j) = 0.0;
  return {N, M, std::move(c)};
}

/// Exponents whose coefficient exceeds rel_threshold * max|c|, in coefficient order.
inline std::vector<Exponent> support(const CurvePolynomial& curve, double rel_threshold = kSupportThreshold) {
  const double tau = rel_threshold * curve.max_abs();
  std::vector<Exponent> out;
  for (const auto& e : curve.exponents()) {
    if (std::abs(curve.coeff(e.i, e.j)) > tau) out.push_back(e);
  }
  return out;
}

/// The exponents a generic state can produce: the coefficient of alpha^i beta^j
/// has weighted degree NM - |i| N - j M, which must be non-negative.
inline std::vector<Exponent> generic_support(int N, int M) {
  std::vector<Exponent> out;
  for (int i = -M; i <= M; ++i)
    for (int j = 0; j <= N; ++j)
      if (j * M + std::abs(i) * N <= N * M) out.push_back({i, j});
  return out;
}

/// The three exponents present for the root-of-unity assignment of special_state.
inline std::vector<Exponent> special_support(int N, int M) { return {{-M, 0}, {0, N}, {M, 0}}; }

/// A = 0 and B((a mod N, a mod M)) = eta^a for a primitive NM-th root of unity
/// eta; the diagonal (1,1) walk visits every site once because gcd(N,M) = 1.
inline LatticeState special_state(int N, int M) {
  require_valid_dimensions(N, M);
  const int sites = N * M;
  TorusGrid a(N, M), b(N, M);
  for (int k = 0; k < sites; ++k) b(k % N, k % M) = detail::unit_root(k, sites);
  return {std::move(a), std::move(b)};
}

struct LatticePoint {
  long long x = 0;
  long long y = 0;

  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

/// Newton polygon of alpha^M det W: points (i + M, j) of the support.
struct NewtonPolygon {
  std::vector<LatticePoint> points;
  std::vector<LatticePoint> hull;  // counter-clockwise, no collinear vertices
  int interior_count = 0;
};

namespace detail {

inline long long cross(const LatticePoint& o, const LatticePoint& a, const LatticePoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace detail

/// Andrew's monotone chain.
inline std::vector<LatticePoint> convex_hull(std::vector<LatticePoint> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<LatticePoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && detail::cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && detail::cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Lattice points strictly inside a counter-clockwise convex polygon.
inline int interior_lattice_points(const std::vector<LatticePoint>& hull) {
  if (hull.size() < 3) return 0;
  long long xmin = hull[0].x, xmax = hull[0].x, ymin = hull[0].y, ymax = hull[0].y;
  for (const auto& p : hull) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  int count = 0;
  for (long long x = xmin; x <= xmax; ++x) {
    for (long long y = ymin; y <= ymax; ++y) {
      const LatticePoint q{x, y};
      bool inside = true;
      for (std::size_t e = 0; e < hull.size() && inside; ++e) {
        inside = detail::cross(hull[e], hull[(e + 1) % hull.size()], q) > 0;
      }
      if (inside) ++count;
    }
  }
  return count;
}

struct GenusReport {
  NewtonPolygon polygon;
  int expected_genus = 0;  // (N - 1) M
  bool generic = true;     // support matched the generic enumeration
  std::vector<std::string> warnings;
};

inline GenusReport newton_genus(const CurvePolynomial& curve, double rel_threshold = kSupportThreshold) {
  GenusReport report;
  const auto supp = support(curve, rel_threshold);
  for (const auto& e : supp) report.polygon.points.push_back({e.i + curve.M(), e.j});
  report.polygon.hull = convex_hull(report.polygon.points);
  report.polygon.interior_count = interior_lattice_points(report.polygon.hull);
  report.expected_genus = (curve.N() - 1) * curve.M();
  report.generic = supp == generic_support(curve.N(), curve.M());
  if (!report.generic) {
    report.warnings.push_back("non-generic support: " + std::to_string(supp.size()) + " of " +
                              std::to_string(generic_support(curve.N(), curve.M()).size()) +
                              " generic coefficients present");
  }
  return report;
}

/// The 2M alpha-values over beta = 0: for each block m, the two roots of
/// alpha * det X(m)(alpha), a quadratic in alpha.
struct BetaZeroSpectrum {
  std::vector<std::array<Complex, 3>> block_coefficients;  // ascending powers of alpha
  std::vector<std::array<Complex, 2>> roots;               // (R_m, S_m)
  bool double_root = false;                                // some pair closer than 1e-8
};

/// Both roots of c0 + c1 x + c2 x^2, avoiding cancellation.
inline std::array<Complex, 2> quadratic_roots(Complex c0, Complex c1, Complex c2) {
  if (c2 == Complex{}) throw NumericalError("quadratic has vanishing leading coefficient");
  const Complex disc = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
  const Complex plus = c1 + disc;
  const Complex minus = c1 - disc;
  const Complex q = -0.5 * (std::abs(plus) >= std::abs(minus) ? plus : minus);
  if (q == Complex{}) return {Complex{}, Complex{}};
  return {q / c2, c0 / q};
}

inline BetaZeroSpectrum beta_zero_spectrum(const LatticeState& state) {
  BetaZeroSpectrum out;
  for (int m = 0; m < state.M(); ++m) {
    std::array<Complex, 3> f;
    for (int s = 0; s < 3; ++s) {
      const Complex alpha = detail::unit_root(s, 3);
      f[s] = alpha * block_X(state, m, alpha).partialPivLu().determinant();
    }
    std::array<Complex, 3> c;
    for (int p = 0; p < 3; ++p) {
      Complex acc{};
      for (int s = 0; s < 3; ++s) acc += f[s] * detail::unit_root(-p * s, 3);
      c[p] = acc / 3.0;
    }
    const auto r = quadratic_roots(c[0], c[1], c[2]);
    const double scale = std::max({1.0, std::abs(r[0]), std::abs(r[1])});
    if (std::abs(r[0] - r[1]) < 1e-8 * scale) out.double_root = true;
    out.block_coefficients.push_back(c);
    out.roots.push_back(r);
  }
  return out;
}

}  // namespace dkp
