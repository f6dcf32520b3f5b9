#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dkp/errors.hpp"

namespace dkp {

using Complex = std::complex<double>;

/// A residue pair (n mod N, m mod M) on the lattice torus.
struct TorusIndex {
  int n = 0;
  int m = 0;

  friend bool operator==(const TorusIndex&, const TorusIndex&) = default;
};

inline int wrap(long long value, int period) {
  const long long r = value % period;
  return static_cast<int>(r < 0 ? r + period : r);
}

inline TorusIndex canonical_index(long long n, long long m, int N, int M) {
  return {wrap(n, N), wrap(m, M)};
}

/// Throws ConstraintError unless N, M >= 2 and gcd(N, M) == 1.
inline void require_valid_dimensions(int N, int M) {
  if (N < 2 || M < 2) {
    throw ConstraintError("lattice dimensions must satisfy N >= 2 and M >= 2 (got N=" +
                          std::to_string(N) + ", M=" + std::to_string(M) + ")");
  }
  if (std::gcd(N, M) != 1) {
    throw ConstraintError("lattice dimensions must be coprime: gcd(" + std::to_string(N) + ", " +
                          std::to_string(M) + ") = " + std::to_string(std::gcd(N, M)));
  }
}

/// Complex field on the N x M torus, stored m-major (m outer, n inner).
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int N, int M, Complex fill = {}) : N_(N), M_(M), data_(static_cast<std::size_t>(N) * M, fill) {}
  TorusGrid(int N, int M, std::vector<Complex> data) : N_(N), M_(M), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(N) * M) {
      throw InvariantError("grid data has " + std::to_string(data_.size()) + " entries, expected " +
                           std::to_string(N * M));
    }
  }

  int N() const { return N_; }
  int M() const { return M_; }
  std::size_t size() const { return data_.size(); }

  /// Linear position of (n, m) after wrapping onto the torus.
  std::size_t offset(long long n, long long m) const {
    return static_cast<std::size_t>(wrap(m, M_)) * N_ + wrap(n, N_);
  }

  Complex& operator()(long long n, long long m) { return data_[offset(n, m)]; }
  const Complex& operator()(long long n, long long m) const { return data_[offset(n, m)]; }

  std::vector<Complex>& values() { return data_; }
  const std::vector<Complex>& values() const { return data_; }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int N_ = 0;
  int M_ = 0;
  std::vector<Complex> data_;
};

/// Phase point of the lattice system: the periodic fields A(n,m), B(n,m).
///
/// Every constructed instance has gcd(N,M) = 1, N,M >= 2, finite entries and
/// B(n,m) != 0 everywhere.
class LatticeState {
 public:
  LatticeState(TorusGrid a, TorusGrid b) : a_(std::move(a)), b_(std::move(b)) { validate(); }

  LatticeState(int N, int M, std::vector<Complex> a, std::vector<Complex> b)
      : LatticeState(TorusGrid(N, M, std::move(a)), TorusGrid(N, M, std::move(b))) {}

  int N() const { return a_.N(); }
  int M() const { return a_.M(); }
  int sites() const { return N() * M(); }

  Complex A(long long n, long long m) const { return a_(n, m); }
  Complex B(long long n, long long m) const { return b_(n, m); }

  const TorusGrid& A() const { return a_; }
  const TorusGrid& B() const { return b_; }

  /// State shifted so that the new fields at (n,m) are the old ones at (n+dn, m+dm).
  LatticeState translated(int dn, int dm) const {
    TorusGrid a(N(), M()), b(N(), M());
    for (int m = 0; m < M(); ++m) {
      for (int n = 0; n < N(); ++n) {
        a(n, m) = a_(n + dn, m + dm);
        b(n, m) = b_(n + dn, m + dm);
      }
    }
    return {std::move(a), std::move(b)};
  }

  friend bool operator==(const LatticeState&, const LatticeState&) = default;

 private:
  void validate() const {
    if (a_.N() != b_.N() || a_.M() != b_.M()) {
      throw InvariantError("A and B grids have different shapes");
    }
    require_valid_dimensions(a_.N(), a_.M());
    for (int m = 0; m < M(); ++m) {
      for (int n = 0; n < N(); ++n) {
        const std::string site = "(n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")";
        const Complex a = a_(n, m);
        const Complex b = b_(n, m);
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
            !std::isfinite(b.imag())) {
          throw InvariantError("non-finite field value at " + site);
        }
        if (b == Complex{}) {
          throw InvariantError("B vanishes at " + site);
        }
      }
    }
  }

  TorusGrid a_;
  TorusGrid b_;
};

struct RandomStateOptions {
  double a_radius = 1.0;
  double b_min = 0.5;
  double b_max = 1.5;
};

/// Seeded generic state: A uniform in the disk |A| <= a_radius, B with modulus
/// uniform in [b_min, b_max] and uniform phase.
inline LatticeState random_state(int N, int M, std::uint64_t seed, const RandomStateOptions& opts = {}) {
  require_valid_dimensions(N, M);
  if (!(opts.a_radius >= 0.0) || !(opts.b_min > 0.0) || !(opts.b_min <= opts.b_max)) {
    throw ConstraintError("random_state requires a_radius >= 0 and 0 < b_min <= b_max");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  TorusGrid a(N, M), b(N, M);
  for (auto& v : a.values()) {
    const double r = opts.a_radius * std::sqrt(unit(rng));
    v = std::polar(r, two_pi * unit(rng));
  }
  for (auto& v : b.values()) {
    const double r = opts.b_min + (opts.b_max - opts.b_min) * unit(rng);
    v = std::polar(r, two_pi * unit(rng));
  }
  return {std::move(a), std::move(b)};
}

}  // namespace dkp
