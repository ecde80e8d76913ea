#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levscat/error.hpp"
#include "levscat/specfun.hpp"
#include "levscat/threshold.hpp"

using namespace levscat;
using std::numbers::pi;

namespace {

// J_μ for real μ > -1 through the reflection J_{-μ} = cos(μπ)J_μ - sin(μπ)Y_μ.
double bessel_j_any(double mu, double x) {
  if (mu >= 0) return bessel_jy(mu, x).j;
  const auto p = bessel_jy(-mu, x);
  return std::cos(-mu * pi) * p.j - std::sin(-mu * pi) * p.y;
}

// Unit square well of depth g is critical in channel ν when J_{ν-1}(√g) = 0.
double analytic_critical(double nu, double x_lo, double x_hi) {
  auto f = [nu](double x) { return bessel_j_any(nu - 1.0, x); };
  auto tol = [](double a, double b) { return std::abs(a - b) < 1e-15; };
  std::uintmax_t it = 200;
  const auto [lo, hi] = boost::math::tools::bisect(f, x_lo, x_hi, tol, it);
  const double x = 0.5 * (lo + hi);
  return x * x;
}

}  // namespace

TEST_CASE("free spec is generic") {
  const auto spec = PotentialSpec::free(3, 0.0);
  const auto report = classify_threshold(build_channels(spec, 4.0), spec);
  CHECK(report.N0 == 0);
  CHECK(report.resonances.empty());
  for (const auto& c : report.channels) CHECK(c.cls == ThresholdClass::Generic);
}

TEST_CASE("critical couplings match the analytic Bessel condition") {
  const auto half = PotentialSpec::square_well(3, 0.0, 0.0);
  const double g_half = critical_coupling(Channel{0.0, 0.5, 1}, half, 2.0, 3.0);
  CHECK(std::abs(g_half - pi * pi / 4) < 1e-12 * pi * pi / 4);

  const auto frac = PotentialSpec::square_well(2, 0.09, 0.0);
  const auto frac_channel = build_channels(frac, 0.5).channels.front();
  const double g_frac = critical_coupling(frac_channel, frac, 0.5, 3.0);
  CHECK(std::abs(g_frac - analytic_critical(0.3, 0.5, 1.7)) < 1e-11 * g_frac);

  const auto one = PotentialSpec::square_well(2, 1.0, 0.0);
  const double g_one = critical_coupling(build_channels(one, 1.2).channels.front(), one, 4.0, 7.0);
  CHECK(std::abs(g_one - 2.404825557695773 * 2.404825557695773) < 1e-11 * g_one);

  const auto big = PotentialSpec::square_well(3, 1.71, 0.0);
  const auto big_channel = build_channels(big, 1.5).channels.front();
  CHECK(big_channel.nu == doctest::Approx(1.4).epsilon(1e-14));
  const double g_big = critical_coupling(big_channel, big, 3.0, 12.0);
  CHECK(std::abs(g_big - analytic_critical(1.4, 1.5, 3.4)) < 1e-11 * g_big);

  CHECK_THROWS_AS(critical_coupling(Channel{0.0, 0.5, 1}, half, 0.5, 1.0), Error);
}

TEST_CASE("a(g) decreases through the critical coupling") {
  const auto spec = PotentialSpec::square_well(3, 0.0, 0.0);
  const Channel ch{0.0, 0.5, 1};
  const double g_star = pi * pi / 4;
  double previous = 1e300;
  for (double g = 0.97 * g_star; g <= 1.03 * g_star; g += 0.005 * g_star) {
    const double a = zero_energy_coefficients(ch, spec.with_coupling(g)).a;
    CHECK(a < previous);
    CHECK((a > 0) == (g < g_star));
    previous = a;
  }
}

TEST_CASE("half-bound state and zero eigenvalue classification") {
  const auto half = PotentialSpec::square_well(3, 0.0, 0.0);
  const double g_half = critical_coupling(Channel{0.0, 0.5, 1}, half, 2.0, 3.0);
  const auto spec = half.with_coupling(g_half);
  const auto set = build_channels(spec, 4.0);
  const auto report = classify_threshold(set, spec);
  REQUIRE(report.resonances.size() == 1);
  CHECK(report.resonances[0].sigma == 0.5);
  CHECK(report.resonances[0].mult == 1);
  CHECK(report.N0 == 0);
  CHECK(report.mu_r == 1);
  CHECK(report.j0() == doctest::Approx(0.5));
  for (double tol : {1e-9, 1e-7, 1e-5}) {
    const auto r = classify_threshold(set, spec, tol);
    CHECK(r.resonances.size() == 1);
    CHECK(r.N0 == 0);
  }

  const auto big = PotentialSpec::square_well(3, 1.71, 0.0);
  const auto big_set = build_channels(big, 3.0);
  const double g_big = critical_coupling(big_set.channels.front(), big, 3.0, 12.0);
  const auto big_report = classify_threshold(big_set, big.with_coupling(g_big));
  CHECK(big_report.N0 == 1);
  CHECK(big_report.resonances.empty());
  CHECK(big_report.j0() == 1.0);

  // Off-critical couplings are generic on both sides; the count jumps by n_ν.
  for (double factor : {0.999, 1.001}) {
    const auto r = classify_threshold(big_set, big.with_coupling(g_big * factor));
    CHECK(r.N0 == 0);
    CHECK(r.resonances.empty());
  }
  const int below = count_negative_eigenvalues(big_set.channels.front(), big.with_coupling(0.999 * g_big));
  const int above = count_negative_eigenvalues(big_set.channels.front(), big.with_coupling(1.001 * g_big));
  CHECK(above - below == 1);
  const int at = count_negative_eigenvalues(big_set.channels.front(), big.with_coupling(g_big));
  CHECK(at == below);
}

TEST_CASE("resonance normalization") {
  const auto half = PotentialSpec::square_well(3, 0.0, 0.0);
  const Channel ch{0.0, 0.5, 1};
  const double g_half = critical_coupling(ch, half, 2.0, 3.0);
  const auto spec = half.with_coupling(g_half);
  const double value = resonance_normalization(ch, spec);
  const auto z = zero_energy_coefficients(ch, spec);
  CHECK(value != 0.0);
  CHECK(value == doctest::Approx(std::sqrt(std::abs(c_nu(0.5))) * (-2 * 0.5 * z.b)).epsilon(1e-8));
  // Pairing by an independent trapezoid over the analytic interior solution
  // u = Γ(3/2)(2/K)^{1/2} √r J_{1/2}(Kr) = sin(Kr)/K, K = √g.
  const double K = std::sqrt(g_half);
  double pairing = 0.0;
  const int N = 200000;
  for (int i = 0; i <= N; ++i) {
    const double r = double(i) / N;
    const double f = -g_half * std::sin(K * r) / K * r;
    pairing += (i == 0 || i == N ? 0.5 : 1.0) * f / N;
  }
  CHECK(z.pairing == doctest::Approx(pairing).epsilon(1e-8));
  CHECK_THROWS_AS(resonance_normalization(ch, half.with_coupling(1.0)), Error);
  CHECK_THROWS_AS(resonance_normalization(Channel{0.0, 1.5, 3}, spec), Error);
}
