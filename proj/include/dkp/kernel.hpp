#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dkp/errors.hpp"
#include "dkp/polynomial_roots.hpp"
#include "dkp/spectral_curve.hpp"
#include "dkp/torus_lattice.hpp"

namespace dkp {

/// Acceptance threshold on CurvePoint::residual.
inline constexpr double kPointResidualTolerance = 1e-8;

/// A point (alpha, beta) on det W = 0.
struct CurvePoint {
  Complex alpha;
  Complex beta;
  double residual = 0.0;        // |det W| over the Hadamard bound (product of row norms)
  bool near_collision = false;  // another root within 1e-8 (relative)
};

/// |det W(alpha, beta)| divided by the product of the row 2-norms of W.
/// Always in [0, 1]; vanishes exactly on the curve.
inline double point_residual(const LatticeState& state, Complex alpha, Complex beta) {
  const ComplexMatrix w = assemble_W(state, alpha, beta);
  double log_bound = 0.0;
  for (Eigen::Index r = 0; r < w.rows(); ++r) log_bound += std::log(w.row(r).norm());
  const double det = std::abs(w.partialPivLu().determinant());
  if (det == 0.0) return 0.0;
  return std::exp(std::log(det) - log_bound);
}

/// The 2M solutions alpha of det W(alpha, beta) = 0 at fixed beta.
///
/// Coefficients outside the generic support are treated as exact zeros.
/// Throws NumericalError when the leading or trailing alpha-coefficient
/// (which generically equal c(M,0) and c(-M,0)) is below 1e-12 max|c|.
inline std::vector<CurvePoint> curve_points_at_beta(const LatticeState& state, const CurvePolynomial& curve,
                                                    Complex beta) {
  const auto coeffs = restricted_to_generic_support(curve).alpha_coefficients(beta);
  const double floor = 1e-12 * curve.max_abs();
  if (std::abs(coeffs.back()) <= floor || std::abs(coeffs.front()) <= floor) {
    throw NumericalError("degenerate beta: alpha polynomial loses degree");
  }
  const auto roots = polynomial_roots(coeffs);
  std::vector<CurvePoint> points;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    CurvePoint p{roots[k], beta, point_residual(state, roots[k], beta), false};
    for (std::size_t l = 0; l < roots.size(); ++l) {
      if (l != k && std::abs(roots[l] - roots[k]) < 1e-8 * std::max(1.0, std::abs(roots[k]))) {
        p.near_collision = true;
      }
    }
    points.push_back(p);
  }
  return points;
}

/// Kernel vector Psi of W at a curve point, normalized so that Psi(0,0) = 1.
struct KernelVector {
  int N = 0;
  int M = 0;
  Complex alpha;
  Complex beta;
  std::vector<Complex> psi;     // indexed by site_index(n, m)
  double kernel_residual = 0.0; // |W psi| / (|W|_2 |psi|)
  double singular_gap = 0.0;    // second-smallest over smallest singular value

  /// Psi on the covering lattice: Psi(n + kN, m + lM) = alpha^k beta^l Psi(n, m).
  Complex operator()(long long n, long long m) const {
    const long long k = (n - wrap(n, N)) / N;
    const long long l = (m - wrap(m, M)) / M;
    Complex v = psi[site_index(N, M, n, m)];
    if (k != 0) v *= std::pow(alpha, static_cast<int>(k));
    if (l != 0) v *= std::pow(beta, static_cast<int>(l));
    return v;
  }
};

/// Smallest right singular vector of W. Requires the smallest singular value
/// to be isolated (second-smallest at least 1e3 times larger).
inline KernelVector kernel_vector(const LatticeState& state, const CurvePoint& point) {
  const ComplexMatrix w = assemble_W(state, point.alpha, point.beta);
  Eigen::JacobiSVD<ComplexMatrix> svd(w, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const Eigen::Index n = sigma.size();
  const double smallest = sigma(n - 1);
  const double second = sigma(n - 2);
  if (!(second >= 1e3 * smallest)) {
    throw NumericalError("kernel of W is not numerically one-dimensional (sigma ratio " +
                         std::to_string(smallest > 0 ? second / smallest : 0.0) + ")");
  }
  ComplexVector v = svd.matrixV().col(n - 1);
  if (std::abs(v(0)) < 1e-12 * v.norm()) throw NumericalError("Psi(0,0) vanishes; cannot normalize");
  v /= v(0);
  v(0) = 1.0;

  KernelVector out;
  out.N = state.N();
  out.M = state.M();
  out.alpha = point.alpha;
  out.beta = point.beta;
  out.psi.assign(v.data(), v.data() + v.size());
  out.kernel_residual = (w * v).norm() / (sigma(0) * v.norm());
  out.singular_gap = smallest > 0 ? second / smallest : INFINITY;
  return out;
}

namespace detail {

inline ComplexMatrix drop_row_col(const ComplexMatrix& w, Eigen::Index row, Eigen::Index col) {
  const Eigen::Index n = w.rows();
  ComplexMatrix out(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == row) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == col) continue;
      out(rr, cc++) = w(r, c);
    }
    ++rr;
  }
  return out;
}

}  // namespace detail

/// Psi(col1) / Psi(col2) from cofactors of W along `row`: columns of the
/// adjugate span ker W, so the ratio is
///   (-1)^{row+col1} det W^{row,col1} / ((-1)^{row+col2} det W^{row,col2}).
inline Complex minor_ratio(const LatticeState& state, const CurvePoint& point, TorusIndex row, TorusIndex col1,
                           TorusIndex col2) {
  const int N = state.N();
  const int M = state.M();
  const ComplexMatrix w = assemble_W(state, point.alpha, point.beta);
  const int r = site_index(N, M, row.n, row.m);
  const int c1 = site_index(N, M, col1.n, col1.m);
  const int c2 = site_index(N, M, col2.n, col2.m);
  if (c1 == c2) return 1.0;

  const ComplexMatrix minor1 = detail::drop_row_col(w, r, c1);
  const ComplexMatrix minor2 = detail::drop_row_col(w, r, c2);
  const Complex d1 = minor1.partialPivLu().determinant();
  const Complex d2 = minor2.partialPivLu().determinant();

  double log_bound = 0.0;
  for (Eigen::Index k = 0; k < minor2.rows(); ++k) log_bound += std::log(minor2.row(k).norm());
  if (std::abs(d2) == 0.0 || std::log(std::abs(d2)) - log_bound < std::log(1e-12)) {
    throw NumericalError("denominator minor vanishes for this row; choose another row");
  }
  const double sign = ((c1 + c2) % 2 == 0) ? 1.0 : -1.0;
  return sign * d1 / d2;
}

/// Largest per-site relative violation of
///   Psi(n,m+1) = Psi(n+1,m) - A(n,m) Psi(n,m) - B(n,m) Psi(n-1,m)
/// with quasi-periodic wrap-around.
inline double recurrence_residual(const LatticeState& state, const KernelVector& psi) {
  double worst = 0.0;
  for (int m = 0; m < state.M(); ++m) {
    for (int n = 0; n < state.N(); ++n) {
      const Complex up = psi(n, m + 1);
      const Complex right = psi(n + 1, m);
      const Complex mid = state.A(n, m) * psi(n, m);
      const Complex left = state.B(n, m) * psi(n - 1, m);
      const double scale = std::max({std::abs(up), std::abs(right), std::abs(mid), std::abs(left)});
      if (scale == 0.0) continue;
      worst = std::max(worst, std::abs(up - (right - mid - left)) / scale);
    }
  }
  return worst;
}

namespace detail {

/// |x - y| relative to the larger of |x|, |y| and `floor`.
inline double rel_gap(Complex x, Complex y, double floor) {
  const double s = std::max({std::abs(x), std::abs(y), floor});
  return s == 0.0 ? 0.0 : std::abs(x - y) / s;
}

}  // namespace detail

/// Extends Psi over the covering lattice with the recurrence alone and checks
/// the monodromies: marching M rows up from row 0 must give beta * row 0, and
/// marching columns to the right from columns 0, 1 must give alpha * column 0.
/// The multipliers are taken from `point`, so an off-curve point shows up
/// as a large residual. Mismatches are relative to the compared entries but
/// never to less than |multiplier| max|Psi|, so components that vanish
/// structurally (roundoff-sized on both sides) do not count as violations.
/// Returns the worst relative mismatch.
inline double quasi_periodicity_check(const LatticeState& state, const CurvePoint& point, const KernelVector& psi) {
  const int N = state.N();
  const int M = state.M();
  const Complex alpha = point.alpha;
  const Complex beta = point.beta;
  auto base = [&](long long n, long long m) {
    const long long k = (n - wrap(n, N)) / N;
    return psi.psi[site_index(N, M, n, m)] * std::pow(alpha, static_cast<int>(k));
  };
  double psi_max = 0.0;
  for (const auto& v : psi.psi) psi_max = std::max(psi_max, std::abs(v));
  double worst = 0.0;

  // March in m: row[n] on the window n in [-M, N + M), shrinking by one per side each step.
  const int lo = -M;
  std::vector<Complex> row(N + 2 * M);
  for (int n = lo; n < N + M; ++n) row[n - lo] = base(n, 0);
  for (int m = 0; m < M; ++m) {
    std::vector<Complex> next(row.size());
    for (int n = lo + m + 1; n < N + M - m - 1; ++n) {
      const int k = n - lo;
      next[k] = row[k + 1] - state.A(n, m) * row[k] - state.B(n, m) * row[k - 1];
    }
    row = std::move(next);
  }
  for (int n = 0; n < N; ++n) {
    const Complex want = beta * psi.psi[site_index(N, M, n, 0)];
    worst = std::max(worst, detail::rel_gap(row[n - lo], want, std::abs(beta) * psi_max));
  }

  // March in n: col[m] for m in [0, M], the top entry closed by beta.
  auto column = [&](int n) {
    std::vector<Complex> c(M + 1);
    for (int m = 0; m < M; ++m) c[m] = psi.psi[site_index(N, M, n, m)];
    c[M] = beta * c[0];
    return c;
  };
  std::vector<Complex> prev = column(0);
  std::vector<Complex> cur = column(1);
  for (int n = 1; n < N; ++n) {
    std::vector<Complex> next(M + 1);
    for (int m = 0; m < M; ++m) next[m] = cur[m + 1] + state.A(n, m) * cur[m] + state.B(n, m) * prev[m];
    next[M] = beta * next[0];
    prev = std::move(cur);
    cur = std::move(next);
  }
  for (int m = 0; m < M; ++m) {
    const Complex want = alpha * psi.psi[site_index(N, M, 0, m)];
    worst = std::max(worst, detail::rel_gap(cur[m], want, std::abs(alpha) * psi_max));
  }
  return worst;
}

/// Root split at a large |beta|: the branches near P (alpha -> infinity) and
/// Q (alpha -> 0). The invariants are the branch averages of alpha^M / beta^N
/// over the large roots and alpha^M beta^N over the small roots; averaging
/// over the M conjugate branches removes the O(beta^{-1/M}) Puiseux terms.
struct BranchSplit {
  Complex beta;
  int large = 0;
  int small = 0;
  Complex large_invariant;  // mean of alpha^M / beta^N, |alpha| > 1
  Complex small_invariant;  // mean of alpha^M * beta^N, |alpha| < 1
};

inline BranchSplit asymptotic_branches(const LatticeState& state, const CurvePolynomial& curve, double modulus,
                                       double phase = 0.7) {
  BranchSplit out;
  out.beta = std::polar(modulus, phase);
  const int N = state.N();
  const int M = state.M();
  const auto points = curve_points_at_beta(state, curve, out.beta);
  // beta^N can overflow only far beyond the radii used here; form ratios in logs anyway.
  const Complex log_beta = std::log(out.beta);
  for (const auto& p : points) {
    const Complex log_alpha = std::log(p.alpha);
    if (std::abs(p.alpha) > 1.0) {
      ++out.large;
      out.large_invariant += std::exp(static_cast<double>(M) * log_alpha - static_cast<double>(N) * log_beta);
    } else {
      ++out.small;
      out.small_invariant += std::exp(static_cast<double>(M) * log_alpha + static_cast<double>(N) * log_beta);
    }
  }
  if (out.large > 0) out.large_invariant /= static_cast<double>(out.large);
  if (out.small > 0) out.small_invariant /= static_cast<double>(out.small);
  return out;
}

}  // namespace dkp
