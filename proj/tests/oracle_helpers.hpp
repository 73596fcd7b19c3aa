#pragma once

// Test-only oracles, independent of the library's linear algebra paths.

#include <array>
#include <cmath>
#include <vector>

#include "indivar/spaces.hpp"

namespace oracle {

/// Eigenvalues of a symmetric 3x3 matrix by the trigonometric closed form,
/// ascending.
inline std::array<double, 3> eig3x3_sym(const indivar::SymmetricMatrix& m) {
  const double a = m(0, 0), b = m(1, 1), c = m(2, 2);
  const double d = m(0, 1), e = m(1, 2), f = m(0, 2);
  const double p1 = d * d + e * e + f * f;
  if (p1 == 0) {
    std::array<double, 3> out{a, b, c};
    std::sort(out.begin(), out.end());
    return out;
  }
  const double q = (a + b + c) / 3.0;
  const double p2 =
      (a - q) * (a - q) + (b - q) * (b - q) + (c - q) * (c - q) + 2 * p1;
  const double p = std::sqrt(p2 / 6.0);
  // B = (A - q I)/p ; r = det(B)/2
  const double b00 = (a - q) / p, b11 = (b - q) / p, b22 = (c - q) / p;
  const double b01 = d / p, b12 = e / p, b02 = f / p;
  double r = (b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) +
              b02 * (b01 * b12 - b11 * b02)) /
             2.0;
  r = std::max(-1.0, std::min(1.0, r));
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2 * p * std::cos(phi);
  const double e3 = q + 2 * p * std::cos(phi + 2 * M_PI / 3.0);
  const double e2 = 3 * q - e1 - e3;
  std::array<double, 3> out{e3, e2, e1};
  std::sort(out.begin(), out.end());
  return out;
}

inline double quadform(const std::vector<long long>& lam,
                       const indivar::SymmetricMatrix& g) {
  double q = 0;
  const int n = g.size();
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      q += static_cast<double>(lam[k] * lam[l]) * g(k, l);
  return q;
}

/// Brute-force gap: min over all sign vectors (no symmetry tricks).
inline long long gap_brute(const std::vector<long long>& lam) {
  const int n = static_cast<int>(lam.size());
  long long best = -1;
  for (long mask = 0; mask < (1L << n); ++mask) {
    long long s = 0;
    for (int i = 0; i < n; ++i) s += ((mask >> i) & 1) ? lam[i] : -lam[i];
    s = std::llabs(s);
    if (best < 0 || s < best) best = s;
  }
  return best;
}

/// Closed-form three-point realizability: the four sign-class probabilities
/// (eps1 = +1) must all be nonnegative.
inline bool realizable3(double g12, double g13, double g23, double tol = 1e-9) {
  const double c12 = 1 - 4 * g12, c13 = 1 - 4 * g13, c23 = 1 - 4 * g23;
  for (int s2 : {+1, -1})
    for (int s3 : {+1, -1}) {
      const double p = (1 + s2 * c12 + s3 * c13 + s2 * s3 * c23) / 4.0;
      if (p < -tol) return false;
    }
  return true;
}

}  // namespace oracle
