#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dkp/errors.hpp"
#include "dkp/torus_lattice.hpp"

namespace dkp {

enum class SignKind { kappa, rho, phi };

inline std::string_view to_string(SignKind kind) {
  switch (kind) {
    case SignKind::kappa: return "kappa";
    case SignKind::rho: return "rho";
    case SignKind::phi: return "phi";
  }
  return "?";
}

/// A function Z/N x Z/M -> {-1, 0, 1}. Arguments are wrapped onto the torus.
class SignTable {
 public:
  SignTable(int N, int M, SignKind kind) : N_(N), M_(M), kind_(kind), values_(static_cast<std::size_t>(N) * M, 0) {}

  int N() const { return N_; }
  int M() const { return M_; }
  SignKind kind() const { return kind_; }

  int operator()(long long n, long long m) const { return values_[offset(n, m)]; }

  void set(long long n, long long m, int value) {
    if (value < -1 || value > 1) {
      throw InternalError(std::string(to_string(kind_)) + " value " + std::to_string(value) + " at (" +
                          std::to_string(wrap(n, N_)) + ", " + std::to_string(wrap(m, M_)) +
                          ") is outside {-1, 0, 1}");
    }
    values_[offset(n, m)] = static_cast<std::int8_t>(value);
  }

  int sum() const {
    int s = 0;
    for (auto v : values_) s += v;
    return s;
  }

 private:
  std::size_t offset(long long n, long long m) const {
    return static_cast<std::size_t>(wrap(m, M_)) * N_ + wrap(n, N_);
  }

  int N_;
  int M_;
  SignKind kind_;
  std::vector<std::int8_t> values_;
};

/// One forced jump f(n-1, m+1) - f(n, m) = jump along the (-1, 1) orbit.
struct OrbitJump {
  int n;
  int m;
  int jump;
};

/// The four jumps that define kappa; every other step of the orbit is flat.
inline constexpr std::array<OrbitJump, 4> kKappaJumps{{
    {1, -1, -1},  // kappa(0,0)  - kappa(1,-1) = -1
    {1, 0, 1},    // kappa(0,1)  - kappa(1,0)  =  1
    {0, -1, 1},   // kappa(-1,0) - kappa(0,-1) =  1
    {0, 0, -1},   // kappa(-1,1) - kappa(0,0)  = -1
}};

/// The four jumps satisfied by rho.
inline constexpr std::array<OrbitJump, 4> kRhoJumps{{
    {-1, -1, 1},  // rho(-2,0)  - rho(-1,-1) =  1
    {1, 0, 1},    // rho(0,1)   - rho(1,0)   =  1
    {0, -1, -1},  // rho(-1,0)  - rho(0,-1)  = -1
    {0, 0, -1},   // rho(-1,1)  - rho(0,0)   = -1
}};

/// Jump prescribed at (n, m) by the given relation set (0 off the four sites).
template <std::size_t K>
int orbit_jump(const std::array<OrbitJump, K>& jumps, int N, int M, long long n, long long m) {
  const TorusIndex here = canonical_index(n, m, N, M);
  int total = 0;
  for (const auto& j : jumps) {
    if (canonical_index(j.n, j.m, N, M) == here) total += j.jump;
  }
  return total;
}

/// kappa: the {-1,0,1}-valued solution of the kappa jump relations, with kappa(0,0)=0.
///
/// Built by walking the orbit of (0,0) under (n,m) -> (n-1,m+1), which covers
/// the torus because gcd(N,M)=1. The walk must close on itself after N*M
/// steps; anything else is reported as an InternalError.
inline SignTable build_kappa(int N, int M) {
  require_valid_dimensions(N, M);
  SignTable kappa(N, M, SignKind::kappa);
  int value = 0;
  long long n = 0, m = 0;
  for (int step = 0; step < N * M; ++step) {
    kappa.set(n, m, value);
    value += orbit_jump(kKappaJumps, N, M, n, m);
    n -= 1;
    m += 1;
  }
  if (canonical_index(n, m, N, M) != TorusIndex{0, 0} || value != 0) {
    throw InternalError("kappa orbit walk did not close");
  }
  return kappa;
}

/// rho(n,m) = kappa(n+1,m) + kappa(n,m) + [(n,m)=(0,0)] - [(n,m)=(-1,0)].
inline SignTable build_rho(int N, int M) {
  const SignTable kappa = build_kappa(N, M);
  SignTable rho(N, M, SignKind::rho);
  const TorusIndex origin{0, 0};
  const TorusIndex left = canonical_index(-1, 0, N, M);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const TorusIndex here{n, m};
      const int delta = (here == origin ? 1 : 0) - (here == left ? 1 : 0);
      rho.set(n, m, kappa(n + 1, m) + kappa(n, m) + delta);
    }
  }
  return rho;
}

/// phi(n,m) = -rho(-n-1,-m) - rho(-n,-m). Not used by the flow.
inline SignTable build_phi(int N, int M) {
  const SignTable rho = build_rho(N, M);
  SignTable phi(N, M, SignKind::phi);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      phi.set(n, m, -rho(-n - 1, -m) - rho(-n, -m));
    }
  }
  return phi;
}

enum class EuclidCase { case1, case2 };

/// Division steps of the Euclidean algorithm on the ordered pair (a, b) until
/// the remainder vanishes. (3,2) takes 2 steps, (2,3) takes 3.
inline int euclid_steps(int a, int b) {
  int steps = 0;
  while (b != 0) {
    const int r = a % b;
    a = b;
    b = r;
    ++steps;
  }
  return steps;
}

/// Which of the two explicit kappa constructions applies to (N, M), predicted
/// from the parity of the Euclidean step count: even -> case1, odd -> case2.
///
/// case1 means that along (-1,1), (-2,2), ... the site (1,0) is reached strictly
/// before (-1,0). For N = 2 the two sites coincide, which falls under case2.
inline EuclidCase euclid_case(int N, int M) {
  require_valid_dimensions(N, M);
  return euclid_steps(N, M) % 2 == 0 ? EuclidCase::case1 : EuclidCase::case2;
}

}  // namespace dkp
