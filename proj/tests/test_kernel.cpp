#include <random>

#include <gtest/gtest.h>

#include "dkp/kernel.hpp"

namespace dkp {
namespace {

constexpr std::pair<int, int> kSizes[] = {{3, 2}, {5, 2}, {4, 3}, {5, 3}};

Complex random_beta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(0.5 + 1.5 * u(rng), 2.0 * std::numbers::pi * u(rng));
}

double rel(Complex x, Complex ref) { return std::abs(x - ref) / std::abs(ref); }

TEST(CurvePoints, AllRootsAreOnTheCurve) {
  std::mt19937_64 rng(1);
  for (const auto& [N, M] : kSizes) {
    const auto s = random_state(N, M, 1);
    const auto curve = curve_polynomial(s);
    for (int trial = 0; trial < 10; ++trial) {
      const auto points = curve_points_at_beta(s, curve, random_beta(rng));
      ASSERT_EQ(points.size(), static_cast<std::size_t>(2 * M));
      for (const auto& p : points) {
        EXPECT_LT(p.residual, 1e-12) << N << "," << M;
        EXPECT_FALSE(p.near_collision);
      }
    }
  }
}

TEST(CurvePoints, DegenerateBetaRejected) {
  const auto s = random_state(3, 2, 1);
  ComplexMatrix c = ComplexMatrix::Zero(5, 4);
  c(0, 0) = 1.0;  // only alpha^{-M}: alpha polynomial has no leading term
  EXPECT_THROW(curve_points_at_beta(s, CurvePolynomial(3, 2, c), 1.0), NumericalError);
}

TEST(PointResidual, DetectsOffCurvePoints) {
  const auto s = random_state(4, 3, 1);
  const auto curve = curve_polynomial(s);
  const auto p = curve_points_at_beta(s, curve, {0.9, 0.4}).front();
  EXPECT_LT(point_residual(s, p.alpha, p.beta), 1e-12);
  EXPECT_GT(point_residual(s, p.alpha * 1.01, p.beta), 1e-6);
}

TEST(KernelVector, ResidualsAndMinorFormula) {
  std::mt19937_64 rng(42);
  for (const auto& [N, M] : kSizes) {
    const auto s = random_state(N, M, 1);
    const auto curve = curve_polynomial(s);
    std::uniform_int_distribution<int> pick_n(0, N - 1), pick_m(0, M - 1);
    for (int trial = 0; trial < 10; ++trial) {
      for (const auto& p : curve_points_at_beta(s, curve, random_beta(rng))) {
        const auto psi = kernel_vector(s, p);
        ASSERT_EQ(psi.psi[0], Complex(1.0));
        ASSERT_GE(psi.singular_gap, 1e3);
        ASSERT_LT(psi.kernel_residual, 1e-9) << N << "," << M;
        ASSERT_LT(recurrence_residual(s, psi), 1e-8) << N << "," << M;
        ASSERT_LT(quasi_periodicity_check(s, p, psi), 1e-8) << N << "," << M;

        const TorusIndex row1{pick_n(rng), pick_m(rng)};
        const TorusIndex row2{(row1.n + 1) % N, (row1.m + 1) % M};
        const TorusIndex col{pick_n(rng), pick_m(rng)};
        const TorusIndex origin{0, 0};
        const Complex svd_ratio = psi(col.n, col.m) / psi(0, 0);
        const Complex r1 = minor_ratio(s, p, row1, col, origin);
        const Complex r2 = minor_ratio(s, p, row2, col, origin);
        ASSERT_LT(std::abs(r1 - svd_ratio) / std::max(1.0, std::abs(svd_ratio)), 1e-8);
        ASSERT_LT(std::abs(r1 - r2) / std::max(1.0, std::abs(r1)), 1e-8);
      }
    }
  }
}

TEST(KernelVector, SameColumnRatioIsOne) {
  const auto s = random_state(3, 2, 1);
  const auto p = curve_points_at_beta(s, curve_polynomial(s), 1.3).front();
  EXPECT_EQ(minor_ratio(s, p, {1, 1}, {2, 0}, {2, 0}), Complex(1.0));
}

TEST(KernelVector, CoveringLatticeExtension) {
  const auto s = random_state(5, 2, 3);
  const auto p = curve_points_at_beta(s, curve_polynomial(s), {0.4, -1.1}).back();
  const auto psi = kernel_vector(s, p);
  EXPECT_LT(rel(psi(7, 1), p.alpha * psi(2, 1)), 1e-15);
  EXPECT_LT(rel(psi(-3, 5), psi(2, 1) * p.beta * p.beta / p.alpha), 1e-14);
}

TEST(KernelVector, OffCurvePointRejected) {
  const auto s = random_state(3, 2, 1);
  EXPECT_THROW(kernel_vector(s, CurvePoint{{1.0, 0.5}, {0.7, 0.2}, 1.0, false}), NumericalError);
}

TEST(QuasiPeriodicity, PerturbedAlphaIsDetected) {
  const auto s = random_state(4, 3, 1);
  const auto curve = curve_polynomial(s);
  for (const auto& p : curve_points_at_beta(s, curve, {1.1, 0.3})) {
    const auto psi = kernel_vector(s, p);
    const double on = quasi_periodicity_check(s, p, psi);
    CurvePoint off = p;
    off.alpha += 1e-3;
    const double off_residual = quasi_periodicity_check(s, off, psi);
    EXPECT_GT(off_residual, 1e-4);
    EXPECT_GT(off_residual, 1e5 * on);
  }
}

TEST(SpecialState, TrinomialRoots) {
  for (const auto& [N, M] : {std::pair{3, 2}, std::pair{5, 2}, std::pair{4, 3}}) {
    const auto s = special_state(N, M);
    const auto curve = curve_polynomial(s);
    const Complex beta = 1.0;
    // c(M,0) x^2 + c(0,N) x + c(-M,0) = 0 with x = alpha^M
    const auto xs = quadratic_roots(curve.coeff(-M, 0), curve.coeff(0, N) * std::pow(beta, N), curve.coeff(M, 0));
    std::vector<Complex> closed_form;
    for (const auto& x : xs)
      for (int k = 0; k < M; ++k)
        closed_form.push_back(std::pow(x, 1.0 / M) * std::polar(1.0, 2.0 * std::numbers::pi * k / M));

    const auto points = curve_points_at_beta(s, curve, beta);
    ASSERT_EQ(points.size(), closed_form.size());
    for (const auto& p : points) {
      double nearest = INFINITY;
      for (const auto& a : closed_form) nearest = std::min(nearest, std::abs(a - p.alpha));
      EXPECT_LT(nearest, 1e-10);
      EXPECT_LT(std::abs(det_W(s, p.alpha, beta)), 1e-9);
      const auto psi = kernel_vector(s, p);
      EXPECT_LT(quasi_periodicity_check(s, p, psi), 1e-8);
      EXPECT_LT(recurrence_residual(s, psi), 1e-8);
    }
  }
}

TEST(Branches, SplitAndLimits) {
  for (const auto& [N, M] : kSizes) {
    const auto s = random_state(N, M, 1);
    const auto curve = curve_polynomial(s);
    const auto near = asymptotic_branches(s, curve, 1e4);
    const auto far = asymptotic_branches(s, curve, 1e6);
    for (const auto& b : {near, far}) {
      EXPECT_EQ(b.large, M);
      EXPECT_EQ(b.small, M);
    }
    EXPECT_LT(rel(near.large_invariant, far.large_invariant), 0.01) << N << "," << M;
    EXPECT_LT(rel(near.small_invariant, far.small_invariant), 0.01) << N << "," << M;
    // leading balance of the Newton polygon edges
    EXPECT_LT(rel(far.large_invariant, -curve.coeff(0, N) / curve.coeff(M, 0)), 0.01);
    EXPECT_LT(rel(far.small_invariant, -curve.coeff(-M, 0) / curve.coeff(0, N)), 0.01);
  }
}

}  // namespace
}  // namespace dkp
