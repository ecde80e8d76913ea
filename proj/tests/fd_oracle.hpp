#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

// Dense finite-difference oracles for the reduced radial operator
// -u'' + [(ν²-1/4)/r² + U(r)]u on (0, L) with Dirichlet ends.
namespace fd_oracle {

struct Tridiagonal {
  std::vector<double> diag;
  double off = 0.0;
  double h = 0.0;
};

inline Tridiagonal assemble(double nu, const std::function<double(double)>& U, double L, int points) {
  Tridiagonal t;
  t.h = L / (points + 1);
  t.off = -1.0 / (t.h * t.h);
  t.diag.resize(points);
  for (int i = 0; i < points; ++i) {
    const double r = (i + 1) * t.h;
    t.diag[i] = 2.0 / (t.h * t.h) + (nu * nu - 0.25) / (r * r) + U(r);
  }
  return t;
}

// Sylvester inertia: number of negative pivots of H - shift.
inline int count_below(const Tridiagonal& t, double shift = 0.0) {
  int negative = 0;
  double pivot = 0.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    pivot = i == 0 ? t.diag[0] - shift : t.diag[i] - shift - t.off * t.off / pivot;
    if (pivot < 0) ++negative;
  }
  return negative;
}

inline int count_negative(double nu, const std::function<double(double)>& U, double L = 40.0, int points = 20000) {
  return count_below(assemble(nu, U, L, points), 0.0);
}

// Eigenvector closest to `shift` by inverse iteration; returns the fraction of
// its squared norm inside r < r_inner.
inline double inner_weight(const Tridiagonal& t, double shift, double r_inner, int iterations = 60) {
  const std::size_t n = t.diag.size();
  std::vector<double> x(n, 1.0), c(n), d(n);
  for (int it = 0; it < iterations; ++it) {
    // Thomas algorithm on (H - shift) y = x.
    c[0] = t.off / (t.diag[0] - shift);
    d[0] = x[0] / (t.diag[0] - shift);
    for (std::size_t i = 1; i < n; ++i) {
      const double m = t.diag[i] - shift - t.off * c[i - 1];
      c[i] = t.off / m;
      d[i] = (x[i] - t.off * d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  double inner = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if ((i + 1) * t.h < r_inner) inner += x[i] * x[i];
  return inner;
}

// Lowest eigenvalue by bisection on the inertia count.
inline double lowest_eigenvalue(const Tridiagonal& t) {
  double lo = *std::min_element(t.diag.begin(), t.diag.end()) - 2.0 * std::abs(t.off);
  double hi = *std::max_element(t.diag.begin(), t.diag.end()) + 2.0 * std::abs(t.off);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (count_below(t, mid) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace fd_oracle
