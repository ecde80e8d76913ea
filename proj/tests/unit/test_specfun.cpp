#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levscat/error.hpp"
#include "levscat/specfun.hpp"

using namespace levscat;
using hp = boost::multiprecision::cpp_dec_float_50;
using std::numbers::pi;

namespace {

// Ascending series for J_ν in 50-digit arithmetic.
double series_j(double nu, double x) {
  const hp half = hp(x) / 2;
  const hp q = -half * half;
  hp term = boost::multiprecision::pow(half, hp(nu)) / boost::math::tgamma(hp(nu) + 1);
  hp sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= q / (hp(k) * (hp(k) + hp(nu)));
    sum += term;
    if (abs(term) < hp("1e-45") * abs(sum)) break;
  }
  return sum.convert_to<double>();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("half-integer closed form") {
  const auto p = bessel_jy(0.5, 1.0);
  CHECK(p.j == doctest::Approx(std::sqrt(2.0 / pi) * std::sin(1.0)).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(-std::sqrt(2.0 / pi) * std::cos(1.0)).epsilon(1e-12));
  for (double x : {0.01, 0.5, 1.9, 2.1, 7.0, 30.0, 400.0}) {
    const auto q = bessel_jy(0.5, x);
    CHECK(rel(q.j, std::sqrt(2.0 / (pi * x)) * std::sin(x)) < 1e-11);
    CHECK(rel(q.y, -std::sqrt(2.0 / (pi * x)) * std::cos(x)) < 1e-11);
  }
}

TEST_CASE("J agrees with the 50-digit ascending series") {
  for (double nu : {0.0, 0.3, 0.5, 1.0, 1.4, 2.5, 7.3, 20.0, 60.0}) {
    for (double x : {1e-3, 0.1, 1.0, 1.99, 2.01, 5.0, 12.0}) {
      const double ref = series_j(nu, x);
      INFO("nu=" << nu << " x=" << x);
      if (std::abs(ref) < 1e-290) continue;
      CHECK(rel(bessel_jy(nu, x).j, ref) < 1e-10);
    }
  }
}

TEST_CASE("cross-check with an independent library away from zeros") {
  for (double nu : {0.0, 0.3, 0.7, 1.0, 3.5, 15.0, 60.0}) {
    for (double x : {0.05, 0.9, 3.3, 17.0, 150.0, 2500.0}) {
      const double bj = boost::math::cyl_bessel_j(nu, x);
      const double by = boost::math::cyl_neumann(nu, x);
      const auto p = bessel_jy(nu, x);
      INFO("nu=" << nu << " x=" << x);
      if (std::abs(bj) > 1e-3 * std::hypot(bj, by) && std::abs(bj) > 1e-290) CHECK(rel(p.j, bj) < 1e-9);
      if (std::abs(by) > 1e-3 * std::hypot(bj, by) && std::isfinite(by)) CHECK(rel(p.y, by) < 1e-9);
    }
  }
}

TEST_CASE("Wronskian identity across the box") {
  CHECK(rel(bessel_jy(0.3, 5.0).j * bessel_jy(0.3, 5.0).yprime - bessel_jy(0.3, 5.0).jprime * bessel_jy(0.3, 5.0).y,
            2.0 / (5.0 * pi)) < 1e-12);
  for (double nu : {0.0, 0.3, 0.5, 1.0, 2.5, 10.0, 60.0, 150.0, 200.0}) {
    for (double x = 1e-3; x <= 1e3; x *= 3.7) {
      const auto s = bessel_jy_scaled(nu, x);
      const double w = s.j * s.yprime - s.jprime * s.y;
      INFO("nu=" << nu << " x=" << x);
      CHECK(rel(w, 2.0 / (pi * x)) < 1e-10);
    }
  }
}

TEST_CASE("three-term recurrence") {
  for (double nu : {1.0, 1.3, 2.5, 9.0, 40.0}) {
    for (double x : {0.2, 1.5, 4.0, 25.0, 800.0}) {
      const double jm = bessel_jy(nu - 1, x).j, j0 = bessel_jy(nu, x).j, jp = bessel_jy(nu + 1, x).j;
      const double scale = std::max({std::abs(jm), std::abs(jp), std::abs(2 * nu / x * j0)});
      if (scale < 1e-290) continue;
      INFO("nu=" << nu << " x=" << x);
      CHECK(std::abs(jm + jp - 2 * nu / x * j0) / scale < 1e-9);
    }
  }
}

TEST_CASE("small-argument law") {
  for (double nu : {0.0, 0.3, 1.0, 2.7, 12.0}) {
    const double x = 1e-4;
    const double lead = std::pow(x / 2, nu) / gamma_fn(nu + 1);
    CHECK(std::abs(bessel_jy(nu, x).j / lead - 1.0) < 1e-6);
  }
}

TEST_CASE("first zero of J0 by bisection") {
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bessel_jy(0.0, mid).j > 0 ? lo : hi) = mid;
  }
  CHECK(std::abs(lo - 2.404825557695773) < 1e-12);
  CHECK(std::abs(series_j(0.0, 2.404825557695773)) < 1e-14);
}

TEST_CASE("domain box") {
  CHECK_THROWS_AS(bessel_jy(-0.1, 1.0), Error);
  CHECK_THROWS_AS(bessel_jy(201.0, 1.0), Error);
  CHECK_THROWS_AS(bessel_jy(1.0, 0.0), Error);
  CHECK_THROWS_AS(bessel_jy(1.0, 1e4), Error);
  try {
    bessel_jy(1.0, -1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainError);
  }
}

TEST_CASE("gamma") {
  CHECK(rel(gamma_fn(0.5), std::sqrt(pi)) < 1e-14);
  CHECK(rel(gamma_fn(5.0), 24.0) < 1e-14);
  CHECK(rel(gamma_fn(0.7) * gamma_fn(0.3), pi / std::sin(0.3 * pi)) < 1e-13);
  for (double x = -4.95; x <= 20.0; x += 0.173) {
    if (std::abs(x - std::round(x)) < 1e-9 && x <= 0) continue;
    const double ref = boost::math::tgamma(hp(x)).convert_to<double>();
    INFO("x=" << x);
    CHECK(rel(gamma_fn(x), ref) < 1e-12);
  }
  for (double x : {0.0, -1.0, -3.0}) {
    try {
      gamma_fn(x);
      FAIL("expected a pole");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PoleError);
    }
  }
  for (double x = -0.5; x <= 0.5; x += 0.05)
    CHECK(rel(rgamma1p_series(x), 1.0 / boost::math::tgamma(hp(1 + x)).convert_to<double>()) < 1e-14);
}

TEST_CASE("c_nu") {
  CHECK(c_nu(1.0) == std::complex<double>(-0.125, 0.0));
  const auto half = c_nu(0.5);
  CHECK(std::abs(half - std::complex<double>(0.0, 1.0)) < 1e-14);
  const hp mag = boost::math::tgamma(hp("0.7")) /
                 (hp("0.3") * boost::multiprecision::pow(hp(2), hp("1.6")) * boost::math::tgamma(hp("1.3")));
  CHECK(rel(std::abs(c_nu(0.3)), mag.convert_to<double>()) < 1e-13);
  CHECK(std::arg(c_nu(0.3)) == doctest::Approx(pi - 0.3 * pi).epsilon(1e-13));
  CHECK_THROWS_AS(c_nu(0.0), Error);
  CHECK_THROWS_AS(c_nu(1.2), Error);
}

TEST_CASE("modified Bessel functions of complex argument") {
  // Half-integer order: I_{1/2}(z) = √(2/(πz)) sinh z, K_{1/2}(z) = √(π/(2z)) e^{-z}.
  for (std::complex<double> z : {std::complex<double>(0.3, 0.0), {2.0, 1.5}, {0.01, -0.009}, {7.0, 0.0}}) {
    const auto i_ref = std::sqrt(2.0 / (pi * z)) * std::sinh(z);
    const auto k_ref = std::sqrt(pi / (2.0 * z)) * std::exp(-z);
    CHECK(std::abs(bessel_i(0.5, z) - i_ref) < 1e-12 * std::abs(i_ref));
    CHECK(std::abs(bessel_k(0.5, z) - k_ref) < 1e-11 * std::abs(k_ref));
  }
  for (double nu : {0.0, 0.3, 1.0, 2.5}) {
    for (double x : {0.01, 0.8, 5.0}) {
      CHECK(rel(bessel_i(nu, x).real(), boost::math::cyl_bessel_i(nu, x)) < 1e-12);
      CHECK(rel(bessel_k(nu, x).real(), boost::math::cyl_bessel_k(nu, x)) < 1e-11);
    }
  }
}
