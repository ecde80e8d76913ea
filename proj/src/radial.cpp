#include "levscat/radial.hpp"

#include <Eigen/Dense>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levscat/error.hpp"

namespace levscat {
namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 3>;

constexpr int kMaxSeriesTerms = 400;
constexpr long kMaxSteps = 2000000;

std::vector<double> shifted_taylor(const PotentialSpec& spec, double E) {
  std::vector<double> p = spec.coupled_taylor_at_origin();
  if (p.empty()) p.push_back(0.0);
  p[0] -= E;
  return p;
}

// Series value and derivative mantissas at r0: u = r0^{ν+1/2}·value, u' = r0^{ν+1/2}·slope.
std::pair<double, double> frobenius_mantissa(double nu, const std::vector<double>& p, double r0) {
  const double s = nu + 0.5;
  std::vector<double> c{1.0};
  double value = 1.0, slope = s / r0;
  double power = 1.0;
  int small_run = 0;
  for (int j = 1; j < kMaxSeriesTerms; ++j) {
    double cj = 0.0;
    for (std::size_t m = 0; m < p.size() && int(m) + 2 <= j; ++m) cj += p[m] * c[j - 2 - m];
    cj /= double(j) * (double(j) + 2.0 * nu);
    c.push_back(cj);
    power *= r0;
    const double term = cj * power;
    value += term;
    slope += (j + s) * term / r0;
    small_run = std::abs(term) < 1e-18 * std::abs(value) ? small_run + 1 : 0;
    if (small_run > int(p.size()) + 2) break;
  }
  return {value, slope};
}

struct Piece {
  double begin = 0.0;
  double end = 0.0;
  std::vector<double> poly;  // g·w on this piece
  double bound = 0.0;        // max |g·w| on this piece
};

std::vector<Piece> pieces(const PotentialSpec& spec, double r0, double r_end) {
  std::vector<double> cuts{r0};
  for (double b : spec.breakpoints())
    if (b > r0) cuts.push_back(b);
  if (r_end > cuts.back()) cuts.push_back(r_end);
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Piece piece{cuts[i], cuts[i + 1], {}, 0.0};
    const double mid = 0.5 * (piece.begin + piece.end);
    if (mid < spec.r_cut) {
      for (const auto& seg : spec.w) {
        if (mid >= seg.r_begin && mid < seg.r_end) {
          piece.poly = seg.poly;
          double power = 1.0;
          const double rmax = std::max(std::abs(seg.r_begin), std::abs(seg.r_end));
          for (double& c : piece.poly) {
            c *= spec.g;
            piece.bound += std::abs(c) * power;
            power *= rmax;
          }
        }
      }
    }
    out.push_back(std::move(piece));
  }
  return out;
}

double horner(const std::vector<double>& poly, double r) {
  double v = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) v = v * r + *it;
  return v;
}

}  // namespace

std::vector<double> frobenius_coefficients(const Channel& channel, const PotentialSpec& spec, double E, int count) {
  const auto p = shifted_taylor(spec, E);
  std::vector<double> c{1.0};
  for (int j = 1; j < count; ++j) {
    double cj = 0.0;
    for (std::size_t m = 0; m < p.size() && int(m) + 2 <= j; ++m) cj += p[m] * c[j - 2 - m];
    c.push_back(cj / (double(j) * (double(j) + 2.0 * channel.nu)));
  }
  return c;
}

std::pair<double, double> frobenius_start(const Channel& channel, const PotentialSpec& spec, double E, double r0) {
  const auto [value, slope] = frobenius_mantissa(channel.nu, shifted_taylor(spec, E), r0);
  const double lead = std::pow(r0, channel.nu + 0.5);
  return {lead * value, lead * slope};
}

double default_start_radius(const Channel& channel, const PotentialSpec& spec, double E) {
  const double first = spec.first_piece_end();
  const double base = 1e-3 * std::min({1.0, spec.r_cut, first});
  const double strength = spec.max_abs_coupled() + std::abs(E);
  if (strength == 0.0) return channel.nu > 1.0 ? std::max(base, 0.25 * first) : base;
  // Keep the series ratio |U - E|·r0²/(4(ν+1)) small.
  const double series_limit = 0.5 * std::sqrt((channel.nu + 1.0) / strength);
  if (channel.nu > 1.0) return std::max(std::min(base, series_limit), std::min(series_limit, 0.25 * first));
  return std::min(base, series_limit);
}

RadialSolution integrate_channel(const Channel& channel, const PotentialSpec& spec, double E, double r_end,
                                 const RadialOptions& options) {
  if (!(r_end >= spec.r_cut)) throw Error(ErrorKind::InvalidSpec, "integrate_channel needs r_end >= r_cut");
  const double nu = channel.nu;
  const double centrifugal = nu * nu - 0.25;
  const double r0 = options.r0 > 0.0 ? options.r0 : default_start_radius(channel, spec, E);
  const auto [value, slope] = frobenius_mantissa(nu, shifted_taylor(spec, E), r0);

  RadialSolution sol;
  sol.E = E;
  double log_scale = (nu + 0.5) * std::log(r0);
  State x{value, slope, 0.0};
  auto record = [&](double r) {
    sol.r_grid.push_back(r);
    sol.u.push_back(x[0]);
    sol.uprime.push_back(x[1]);
    sol.log_scale.push_back(log_scale);
  };
  record(r0);

  const double pair_exponent = nu + 0.5;
  double last_sign = x[0] > 0 ? 1.0 : -1.0;
  const double atol = options.rtol * 1e-3;
  long steps = 0;

  for (const auto& piece : pieces(spec, r0, r_end)) {
    const auto& poly = piece.poly;
    auto system = [&](const State& s, State& ds, double r) {
      const double potential = poly.empty() ? 0.0 : horner(poly, r);
      ds[0] = s[1];
      ds[1] = (centrifugal / (r * r) + potential - E) * s[0];
      ds[2] = options.with_pairing && !poly.empty() ? potential * s[0] * std::pow(r, pair_exponent) : 0.0;
    };
    auto stepper = odeint::make_controlled(atol, options.rtol, odeint::runge_kutta_fehlberg78<State>());
    const double k_local = std::sqrt(std::max(E + piece.bound, 0.0));
    const double h_cap = k_local > 0.0 ? 0.5 * std::numbers::pi / k_local : piece.end - piece.begin;
    double t = piece.begin;
    double dt = std::min({h_cap, 0.1 * std::max(t, r0), piece.end - t});
    while (t < piece.end) {
      if (++steps > kMaxSteps) {
        std::ostringstream os;
        os << "step budget exhausted at r = " << t << " (nu = " << nu << ", E = " << E << ")";
        throw Error(ErrorKind::StiffnessFailure, os.str());
      }
      double trial = std::min({dt, h_cap, piece.end - t});
      if (piece.end - (t + trial) < 1e-12 * piece.end) trial = piece.end - t;
      const bool lands = trial == piece.end - t;
      const double attempted = trial;
      const auto outcome = stepper.try_step(system, x, t, trial);
      if (outcome == odeint::fail || (!lands && attempted < 1e-13 * t)) {
        dt = trial;
        if (dt < 1e-13 * t || attempted < 1e-13 * t) {
          std::ostringstream os;
          os << "step collapsed to " << dt << " at r = " << t << " (nu = " << nu << ", E = " << E << ")";
          throw Error(ErrorKind::StiffnessFailure, os.str());
        }
        continue;
      }
      dt = trial;
      if (lands) t = piece.end;
      if (x[0] != 0.0) {
        const double sign = x[0] > 0 ? 1.0 : -1.0;
        if (sign != last_sign) ++sol.nodes;
        last_sign = sign;
      }
      const double size = std::abs(x[0]) + t * std::abs(x[1]);
      if (size > 1e3 || size < 1e-3) {
        for (double& v : x) v /= size;
        log_scale += std::log(size);
      }
      if (options.store_grid) record(t);
    }
  }
  if (sol.r_grid.back() != r_end) record(r_end);
  sol.pairing = x[2];
  return sol;
}

ZeroEnergyCoeffs zero_energy_coefficients(const Channel& channel, const PotentialSpec& spec,
                                          const RadialOptions& options, double r_match) {
  const double R = r_match > 0.0 ? r_match : spec.r_cut;
  RadialOptions opts = options;
  opts.store_grid = false;
  opts.with_pairing = true;
  const auto sol = integrate_channel(channel, spec, 0.0, R, opts);
  const double nu = channel.nu;
  const double scale = std::exp(sol.log_scale_end());
  const double u = sol.u_end() * scale, up = sol.uprime_end() * scale;
  ZeroEnergyCoeffs out;
  out.a = (up * std::pow(R, 0.5 - nu) - (0.5 - nu) * u * std::pow(R, -nu - 0.5)) / (2.0 * nu);
  out.b = ((0.5 + nu) * std::pow(R, nu - 0.5) * u - up * std::pow(R, 0.5 + nu)) / (2.0 * nu);
  out.interior_nodes = sol.nodes;
  out.pairing = sol.pairing * scale;

  // Columns scaled by R^{1/2±ν} and the derivative row by R: depends on ν only.
  Eigen::Matrix2d m;
  m << 1.0, 1.0, 0.5 + nu, 0.5 - nu;
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
  out.cond = svd.singularValues()(0) / svd.singularValues()(1);
  if (!(out.cond <= 1e8)) {
    std::ostringstream os;
    os << "zero-energy match at nu = " << nu << " has condition number " << out.cond;
    throw Error(ErrorKind::IllConditioned, os.str());
  }
  return out;
}

int count_negative_eigenvalues(const Channel& channel, const PotentialSpec& spec, const RadialOptions& options,
                               double tol_a) {
  if (!spec.has_short_range()) return 0;
  const auto z = zero_energy_coefficients(channel, spec, options);
  if (std::abs(z.a) < tol_a * (std::abs(z.a) + std::abs(z.b))) return z.interior_nodes;
  const double at_cut = z.a * std::pow(spec.r_cut, 2.0 * channel.nu) + z.b;
  const bool exterior_zero = (at_cut > 0) != (z.a > 0) && at_cut != 0.0;
  return z.interior_nodes + (exterior_zero ? 1 : 0);
}

}  // namespace levscat
