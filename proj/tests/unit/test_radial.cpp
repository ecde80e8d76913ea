#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fd_oracle.hpp"
#include "levscat/error.hpp"
#include "levscat/radial.hpp"
#include "levscat/specfun.hpp"

using namespace levscat;
using std::numbers::pi;

namespace {

Channel channel_of(double nu, int mult = 1) { return Channel{nu * nu - 0.25, nu, mult}; }

double true_u(const RadialSolution& s, std::size_t i) { return s.u[i] * std::exp(s.log_scale[i]); }
double true_up(const RadialSolution& s, std::size_t i) { return s.uprime[i] * std::exp(s.log_scale[i]); }

// Regular solution of -u'' + (ν²-1/4)/r² u = K² u normalised to r^{ν+1/2} at the origin.
double bessel_regular(double nu, double K, double r) {
  return gamma_fn(nu + 1.0) * std::pow(2.0 / K, nu) * std::sqrt(r) * bessel_jy(nu, K * r).j;
}

}  // namespace

TEST_CASE("Frobenius start, free Euler equation") {
  const auto spec = PotentialSpec::free(3, 0.0);
  for (double nu : {0.3, 0.5, 1.0, 2.5}) {
    const double r0 = 1e-3;
    const auto [u, up] = frobenius_start(channel_of(nu), spec, 0.0, r0);
    CHECK(u == doctest::Approx(std::pow(r0, nu + 0.5)).epsilon(1e-15));
    CHECK(up == doctest::Approx((nu + 0.5) * std::pow(r0, nu - 0.5)).epsilon(1e-15));
  }
}

TEST_CASE("Frobenius start against the free Bessel solution") {
  const auto spec = PotentialSpec::free(3, 0.0);
  for (double nu : {0.3, 0.5, 1.4}) {
    for (double k : {1.0, 20.0, 50.0}) {
      const double r0 = 1e-3;
      const auto [u, up] = frobenius_start(channel_of(nu), spec, k * k, r0);
      CHECK(std::abs(u / bessel_regular(nu, k, r0) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("Frobenius coefficients match the constant-well Taylor series") {
  // u = Γ(ν+1)(2/K)^ν √r J_ν(Kr) has c_{2m} = (-K²/4)^m Γ(ν+1)/(m! Γ(ν+m+1)).
  const double V0 = 4.0;
  const auto spec = PotentialSpec::square_well(3, 0.0, V0);
  for (double nu : {0.5, 0.3, 2.0}) {
    const auto c = frobenius_coefficients(channel_of(nu), spec, 0.0, 7);
    const double quarter = -V0 / 4.0;
    double factorial = 1.0;
    for (int m = 0; 2 * m < 7; ++m) {
      if (m > 0) factorial *= m;
      const double expected = std::pow(quarter, m) * gamma_fn(nu + 1) / (factorial * gamma_fn(nu + m + 1));
      CHECK(c[2 * m] == doctest::Approx(expected).epsilon(1e-14));
      if (2 * m + 1 < 7) CHECK(c[2 * m + 1] == 0.0);
    }
    CHECK(c[2] == doctest::Approx(-V0 / (4 * nu + 4)));
  }
}

TEST_CASE("Frobenius series satisfies the ODE for a polynomial profile") {
  PotentialSpec spec;
  spec.n = 3;
  spec.w = {Segment{0.0, 1.0, {-1.0, 0.7, -2.0, 0.4}}};
  spec.g = 3.0;
  const Channel ch = channel_of(0.8);
  const double E = 1.7;
  auto u = [&](double r) { return frobenius_start(ch, spec, E, r).first; };
  for (double r : {0.05, 0.1, 0.2}) {
    const double h = 1e-3 * r;
    const double second = (u(r + h) - 2 * u(r) + u(r - h)) / (h * h);
    const double residual = -second + ((ch.nu * ch.nu - 0.25) / (r * r) + spec.coupled(r) - E) * u(r);
    CHECK(std::abs(residual) < 1e-5 * std::abs((ch.nu * ch.nu - 0.25) / (r * r) * u(r)));
  }
}

TEST_CASE("free solution at positive energy") {
  const auto spec = PotentialSpec::free(3, 0.0);
  const auto sol = integrate_channel(channel_of(0.5), spec, 1.0, 20.0);
  double ratio0 = 0.0;
  for (std::size_t i = 0; i < sol.r_grid.size(); ++i) {
    const double r = sol.r_grid[i];
    if (r < 1.0) continue;
    const double ref = std::sqrt(r) * bessel_jy(0.5, r).j;
    if (std::abs(ref) < 1e-2) continue;
    const double ratio = true_u(sol, i) / ref;
    if (ratio0 == 0.0) ratio0 = ratio;
    CHECK(std::abs(ratio / ratio0 - 1.0) < 1e-9);
  }
  CHECK(sol.nodes == 6);  // zeros of sin r in (0, 20)
  CHECK(true_u(sol, 0) > 0.0);
}

TEST_CASE("free Euler equation is reproduced") {
  const auto spec = PotentialSpec::free(3, 0.0);
  for (double nu : {0.3, 0.5, 1.4, 7.5}) {
    const auto sol = integrate_channel(channel_of(nu), spec, 0.0, 10.0);
    for (std::size_t i = 0; i < sol.r_grid.size(); ++i)
      CHECK(std::abs(true_u(sol, i) / std::pow(sol.r_grid[i], nu + 0.5) - 1.0) < 1e-10);
    CHECK(sol.nodes == 0);
  }
}

TEST_CASE("square-well log-derivative below threshold") {
  const double V0 = 4.0;
  const auto spec = PotentialSpec::square_well(3, 0.0, V0);
  for (double kappa : {0.3, 1.0, 1.7}) {
    RadialOptions o;
    o.store_grid = false;
    const auto sol = integrate_channel(channel_of(0.5), spec, -kappa * kappa, 1.0, o);
    const double K = std::sqrt(V0 - kappa * kappa);
    CHECK(sol.uprime_end() / sol.u_end() == doctest::Approx(K / std::tan(K)).epsilon(1e-9));
  }
}

TEST_CASE("deep forbidden region does not overflow") {
  const auto spec = PotentialSpec::square_well(3, 0.0, 4.0);
  RadialOptions o;
  o.store_grid = false;
  const auto sol = integrate_channel(channel_of(0.5), spec, -400.0, 30.0, o);
  CHECK(std::isfinite(sol.u_end()));
  CHECK(sol.log_scale_end() > 500.0);
  CHECK(sol.uprime_end() / sol.u_end() == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("Wronskian with exterior Bessel solutions is conserved") {
  const auto spec = PotentialSpec::square_well(3, 0.0, 6.0);
  const double k = 1.3, nu = 0.7;
  RadialOptions o;
  const auto sol = integrate_channel(channel_of(nu), spec, k * k, 6.0, o);
  double first = 0.0;
  for (std::size_t i = 0; i < sol.r_grid.size(); ++i) {
    const double r = sol.r_grid[i];
    if (r < 1.0) continue;
    const auto b = bessel_jy(nu, k * r);
    const double f = std::sqrt(r) * b.y;
    const double fp = 0.5 / std::sqrt(r) * b.y + std::sqrt(r) * k * b.yprime;
    const double w = true_u(sol, i) * fp - true_up(sol, i) * f;
    if (first == 0.0) first = w;
    CHECK(std::abs(w / first - 1.0) < 1e-9);
  }
}

TEST_CASE("zero-energy coefficients") {
  const auto free = PotentialSpec::free(3, 0.0);
  for (double nu : {0.3, 0.5, 2.0}) {
    const auto z = zero_energy_coefficients(channel_of(nu), free);
    CHECK(z.a == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(z.b) < 1e-10);
  }
  const auto critical = PotentialSpec::square_well(3, 0.0, pi * pi / 4);
  const auto z = zero_energy_coefficients(channel_of(0.5), critical);
  CHECK(std::abs(z.a) < 1e-8 * std::abs(z.b));
  CHECK(z.pairing == doctest::Approx(-2 * 0.5 * z.b).epsilon(1e-8));

  // Matching radius independence on [r_cut, 2 r_cut].
  const auto well = PotentialSpec::square_well(2, 0.09, 3.1);
  const auto base = zero_energy_coefficients(channel_of(0.3), well);
  for (double R : {1.3, 1.7, 2.0}) {
    const auto other = zero_energy_coefficients(channel_of(0.3), well, {}, R);
    CHECK(other.a == doctest::Approx(base.a).epsilon(1e-8));
    CHECK(other.b == doctest::Approx(base.b).epsilon(1e-8));
  }
  // Sign of a flips through the critical depth, decreasing in g.
  double previous = 1.0;
  for (double g = 2.3; g < 2.65; g += 0.05) {
    const double a = zero_energy_coefficients(channel_of(0.5), PotentialSpec::square_well(3, 0.0, g)).a;
    CHECK(a < previous);
    previous = a;
  }
  CHECK_THROWS_AS(zero_energy_coefficients(channel_of(1e-9), well), Error);
}

TEST_CASE("negative eigenvalue counts") {
  CHECK(count_negative_eigenvalues(channel_of(0.5), PotentialSpec::free(3, 0.0)) == 0);
  CHECK(count_negative_eigenvalues(channel_of(0.5), PotentialSpec::square_well(3, 0.0, 2.0)) == 0);
  CHECK(count_negative_eigenvalues(channel_of(0.5), PotentialSpec::square_well(3, 0.0, 4.0)) == 1);
  CHECK(count_negative_eigenvalues(channel_of(0.5), PotentialSpec::square_well(3, 0.0, 12.0)) == 1);
  CHECK(count_negative_eigenvalues(channel_of(1.5), PotentialSpec::square_well(3, 0.0, 12.0)) == 1);
  CHECK(count_negative_eigenvalues(channel_of(2.5), PotentialSpec::square_well(3, 0.0, 12.0)) == 0);
}

TEST_CASE("counts agree with the finite-difference oracle") {
  for (double nu : {0.3, 0.5, 1.0, 1.5}) {
    for (double V0 : {2.0, 4.0, 12.0, 30.0, 60.0}) {
      const auto spec = PotentialSpec::square_well(3, 0.0, V0);
      auto U = [&](double r) { return spec.coupled(r); };
      INFO("nu=" << nu << " V0=" << V0);
      CHECK(count_negative_eigenvalues(channel_of(nu), spec) == fd_oracle::count_negative(nu, U));
    }
  }
}

TEST_CASE("node count is monotone in an attractive coupling") {
  int previous = 0;
  for (double g = 0.0; g <= 80.0; g += 2.5) {
    const int count = count_negative_eigenvalues(channel_of(0.5), PotentialSpec::square_well(3, 0.0, g));
    CHECK(count >= previous);
    previous = count;
  }
  CHECK(previous == 3);  // √80 ≈ 8.94 lies between 5π/2 and 7π/2
}

TEST_CASE("collapsed step is reported") {
  RadialOptions o;
  o.rtol = 1e-30;
  try {
    integrate_channel(channel_of(0.5), PotentialSpec::square_well(3, 0.0, 4.0), 1.0, 1.0, o);
    FAIL("expected StiffnessFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StiffnessFailure);
  }
}
