#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dkp/errors.hpp"
#include "dkp/torus_lattice.hpp"

namespace dkp {

/// Value and derivative of sum_k coeffs[k] x^k (Horner).
inline std::pair<Complex, Complex> horner(std::span<const Complex> coeffs, Complex x) {
  Complex p{}, dp{};
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    dp = dp * x + p;
    p = p * x + coeffs[k];
  }
  return {p, dp};
}

namespace detail {

/// Parlett-Reinsch diagonal balancing (radix 2) in place. Companion matrices of
/// graded polynomials are badly scaled; balancing restores relative accuracy
/// of the small eigenvalues.
inline void balance(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

/// Eigenvalues of the balanced companion matrix, each refined by Newton steps
/// that are kept only while they reduce |p|.
inline std::vector<Complex> companion_roots(std::span<const Complex> poly) {
  const std::size_t degree = poly.size() - 1;
  const Complex lead = poly[degree];
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
  for (std::size_t k = 1; k < degree; ++k) companion(k, k - 1) = 1.0;
  for (std::size_t k = 0; k < degree; ++k) companion(k, degree - 1) = -poly[k] / lead;
  balance(companion);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue iteration failed");

  std::vector<Complex> roots;
  roots.reserve(degree);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    Complex x = solver.eigenvalues()(k);
    double best = std::abs(horner(poly, x).first);
    for (int iter = 0; iter < 8 && best > 0.0; ++iter) {
      const auto [p, dp] = horner(poly, x);
      if (dp == Complex{}) break;
      const Complex next = x - p / dp;
      const double res = std::abs(horner(poly, next).first);
      if (!(res < best)) break;
      best = res;
      x = next;
    }
    roots.push_back(x);
  }
  return roots;
}

}  // namespace detail

/// All roots of sum_k coeffs[k] x^k.
///
/// Roots with |x| >= 1 come from the polynomial itself, roots with |x| < 1 as
/// reciprocals of the roots of the reversed polynomial, so both ends keep
/// their relative accuracy when the root moduli span many decades. Falls back
/// to the direct roots when the two halves do not add up to the degree.
inline std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs) {
  std::size_t size = coeffs.size();
  while (size > 0 && coeffs[size - 1] == Complex{}) --size;
  if (size < 2) return {};
  const auto poly = coeffs.first(size);
  const std::size_t degree = size - 1;

  std::size_t zeros = 0;
  while (poly[zeros] == Complex{}) ++zeros;
  std::vector<Complex> roots(zeros, Complex{});
  const auto core = poly.subspan(zeros);
  if (core.size() < 2) return roots;

  const auto direct = detail::companion_roots(core);
  std::vector<Complex> reversed(core.rbegin(), core.rend());
  const auto inverse = detail::companion_roots(reversed);

  std::vector<Complex> split;
  for (const auto& x : direct)
    if (std::abs(x) >= 1.0) split.push_back(x);
  for (const auto& y : inverse)
    if (std::abs(y) > 1.0) split.push_back(1.0 / y);

  const auto& chosen = (split.size() == core.size() - 1) ? split : direct;
  roots.insert(roots.end(), chosen.begin(), chosen.end());
  if (roots.size() != degree) throw NumericalError("root count mismatch");
  return roots;
}

}  // namespace dkp
