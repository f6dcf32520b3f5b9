#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dkp/errors.hpp"
#include "dkp/kappa.hpp"
#include "dkp/spectral_curve.hpp"
#include "dkp/torus_lattice.hpp"

namespace dkp {

struct FlowDerivative {
  TorusGrid dA;
  TorusGrid dB;
};

/// Convolution kernels of the flow for one lattice shape.
struct FlowKernels {
  SignTable kappa;
  SignTable rho;

  static FlowKernels build(int N, int M) { return {build_kappa(N, M), build_rho(N, M)}; }
};

/// Right-hand side of the lattice flow:
///   dA(n,m) = B(n,m) - B(n+1,m) + (sum_{k,l} kappa(k-n, l-m) A(k,l)) A(n,m)
///   dB(n,m) = (sum_{k,l} rho(k-n, l-m) A(k,l)) B(n,m)
inline FlowDerivative flow_rhs(const LatticeState& state, const SignTable& kappa, const SignTable& rho) {
  const int N = state.N();
  const int M = state.M();
  if (kappa.N() != N || kappa.M() != M || rho.N() != N || rho.M() != M) {
    throw ConstraintError("sign tables were built for a different lattice shape");
  }
  FlowDerivative out{TorusGrid(N, M), TorusGrid(N, M)};
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      Complex ksum{}, rsum{};
      for (int l = 0; l < M; ++l) {
        for (int k = 0; k < N; ++k) {
          const Complex a = state.A(k, l);
          ksum += static_cast<double>(kappa(k - n, l - m)) * a;
          rsum += static_cast<double>(rho(k - n, l - m)) * a;
        }
      }
      out.dA(n, m) = state.B(n, m) - state.B(n + 1, m) + ksum * state.A(n, m);
      out.dB(n, m) = rsum * state.B(n, m);
    }
  }
  return out;
}

inline FlowDerivative flow_rhs(const LatticeState& state, const FlowKernels& kernels) {
  return flow_rhs(state, kernels.kappa, kernels.rho);
}

/// All curve coefficients c(i, j), flattened with i ascending then j ascending.
inline std::vector<Complex> conserved_vector(const LatticeState& state) {
  const auto curve = curve_polynomial(state);
  std::vector<Complex> out;
  for (const auto& e : curve.exponents()) out.push_back(curve.coeff(e.i, e.j));
  return out;
}

inline Complex field_sum(const TorusGrid& grid) {
  Complex s{};
  for (const auto& v : grid.values()) s += v;
  return s;
}

inline Complex field_product(const TorusGrid& grid) {
  Complex p{1.0, 0.0};
  for (const auto& v : grid.values()) p *= v;
  return p;
}

/// Denominator floor for relative drift of structurally tiny quantities.
inline constexpr double kDriftFloor = 1e-12;

inline double relative_drift(Complex now, Complex initial) {
  return std::abs(now - initial) / std::max(std::abs(initial), kDriftFloor);
}

struct DriftSample {
  int step = 0;
  double time = 0.0;
  double max_rel_drift = 0.0;
  std::vector<Complex> coefficients;  // one per tracked exponent
};

/// Drift of the curve coefficients along an integrated trajectory.
///
/// Tracked coefficients are the generic support; the remaining positions of
/// the coefficient grid vanish identically and are monitored through
/// max_off_support (relative to max|c| at t = 0).
struct DriftReport {
  double dt = 0.0;
  int steps = 0;
  std::vector<Exponent> tracked;
  std::vector<Complex> initial;
  std::vector<DriftSample> samples;
  double max_drift = 0.0;
  double max_off_support = 0.0;
  double sum_a_drift = 0.0;
  double prod_b_drift = 0.0;
};

struct IntegrationResult {
  LatticeState final_state;
  DriftReport report;
};

namespace detail {

/// Builds the next state, reporting blow-up (non-finite values or |B| < 1e-300)
/// as a NumericalError instead of an invariant violation.
inline LatticeState checked_flow_state(TorusGrid a, TorusGrid b) {
  for (int m = 0; m < a.M(); ++m) {
    for (int n = 0; n < a.N(); ++n) {
      const double amod = std::abs(a(n, m));
      const double bmod = std::abs(b(n, m));
      if (!std::isfinite(amod) || !std::isfinite(bmod) || bmod < 1e-300) {
        throw NumericalError("flow blew up at (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
      }
    }
  }
  return {std::move(a), std::move(b)};
}

inline LatticeState flow_stage(const LatticeState& base, const FlowDerivative& d, double h) {
  TorusGrid a = base.A();
  TorusGrid b = base.B();
  for (std::size_t k = 0; k < a.size(); ++k) {
    a.values()[k] += h * d.dA.values()[k];
    b.values()[k] += h * d.dB.values()[k];
  }
  return checked_flow_state(std::move(a), std::move(b));
}

}  // namespace detail

/// One classical fourth-order Runge-Kutta step.
inline LatticeState rk4_step(const LatticeState& state, const FlowKernels& kernels, double dt) {
  const auto k1 = flow_rhs(state, kernels);
  const auto k2 = flow_rhs(detail::flow_stage(state, k1, 0.5 * dt), kernels);
  const auto k3 = flow_rhs(detail::flow_stage(state, k2, 0.5 * dt), kernels);
  const auto k4 = flow_rhs(detail::flow_stage(state, k3, dt), kernels);

  TorusGrid a = state.A();
  TorusGrid b = state.B();
  for (std::size_t k = 0; k < a.size(); ++k) {
    a.values()[k] += dt / 6.0 *
                     (k1.dA.values()[k] + 2.0 * k2.dA.values()[k] + 2.0 * k3.dA.values()[k] + k4.dA.values()[k]);
    b.values()[k] += dt / 6.0 *
                     (k1.dB.values()[k] + 2.0 * k2.dB.values()[k] + 2.0 * k3.dB.values()[k] + k4.dB.values()[k]);
  }
  return detail::checked_flow_state(std::move(a), std::move(b));
}

/// Fixed-step RK4 integration, recomputing the curve polynomial every
/// record_every steps (and always at the last step).
inline IntegrationResult integrate(const LatticeState& initial, double dt, int steps, int record_every = 1) {
  if (!(dt > 0.0) || steps < 1 || record_every < 1) {
    throw ConstraintError("integrate requires dt > 0, steps >= 1 and record_every >= 1");
  }
  const auto kernels = FlowKernels::build(initial.N(), initial.M());
  const int N = initial.N();
  const int M = initial.M();

  DriftReport report;
  report.dt = dt;
  report.steps = steps;
  report.tracked = generic_support(N, M);

  const auto curve0 = curve_polynomial(initial);
  const double scale0 = curve0.max_abs();
  for (const auto& e : report.tracked) report.initial.push_back(curve0.coeff(e.i, e.j));
  const Complex sum_a0 = field_sum(initial.A());
  const Complex prod_b0 = field_product(initial.B());

  auto record = [&](const LatticeState& s, int step) {
    const auto curve = curve_polynomial(s);
    DriftSample sample;
    sample.step = step;
    sample.time = step * dt;
    for (std::size_t k = 0; k < report.tracked.size(); ++k) {
      const auto& e = report.tracked[k];
      const Complex c = curve.coeff(e.i, e.j);
      sample.coefficients.push_back(c);
      sample.max_rel_drift = std::max(sample.max_rel_drift, relative_drift(c, report.initial[k]));
    }
    for (const auto& e : curve.exponents()) {
      if (!std::binary_search(report.tracked.begin(), report.tracked.end(), e)) {
        report.max_off_support = std::max(report.max_off_support, std::abs(curve.coeff(e.i, e.j)) / scale0);
      }
    }
    report.max_drift = std::max(report.max_drift, sample.max_rel_drift);
    report.sum_a_drift = std::max(report.sum_a_drift, relative_drift(field_sum(s.A()), sum_a0));
    report.prod_b_drift = std::max(report.prod_b_drift, relative_drift(field_product(s.B()), prod_b0));
    report.samples.push_back(std::move(sample));
  };

  record(initial, 0);
  LatticeState state = initial;
  for (int step = 1; step <= steps; ++step) {
    state = rk4_step(state, kernels, dt);
    if (step % record_every == 0 || step == steps) record(state, step);
  }
  return {std::move(state), std::move(report)};
}

}  // namespace dkp
