#include "levscat/scattering.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <sstream>

#include "levscat/error.hpp"
#include "levscat/specfun.hpp"

namespace levscat {
namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer_order(double nu) { return std::abs(nu - std::round(nu)) < 1e-12; }

struct Placed {
  double value;
  double clamp;  // amount added to bring the angle into its window
};

// Place an angle known mod 2π into (centre - π/2, centre + π/2], clamping
// when rounding has pushed it just outside.
Placed place(double angle, double centre) {
  const double shifted = angle + 2.0 * kPi * std::round((centre - angle) / (2.0 * kPi));
  const double clamped = std::clamp(shifted, centre - 0.5 * kPi, centre + 0.5 * kPi);
  return {shifted, clamped - shifted};
}

struct Match {
  double phi;    // angle of (A, -B), mod 2π
  double theta;  // angle of (J_ν(kR), Y_ν(kR)), mod 2π
  int nodes;
  double x;
};

Match match_exterior(const Channel& channel, const PotentialSpec& spec, double k, const RadialOptions& options,
                     double r_match) {
  const double R = r_match > 0.0 ? r_match : spec.r_cut;
  RadialOptions opts = options;
  opts.store_grid = false;
  opts.with_pairing = false;
  const auto sol = integrate_channel(channel, spec, k * k, R, opts);
  const double x = k * R;
  const auto bj = bessel_jy_scaled(channel.nu, x);
  const double sqrt_r = std::sqrt(R);
  const double fj = sqrt_r * bj.j, fjp = bj.j / (2.0 * sqrt_r) + sqrt_r * k * bj.jprime;
  const double fy = sqrt_r * bj.y, fyp = bj.y / (2.0 * sqrt_r) + sqrt_r * k * bj.yprime;
  const double u = sol.u_end(), up = sol.uprime_end();
  // A = e^{L+s}·a_m, B = e^{L-s}·b_m.
  const double a_m = 0.5 * kPi * (u * fyp - up * fy);
  const double b_m = 0.5 * kPi * (fj * up - fjp * u);
  const double growth = std::exp(2.0 * bj.log_scale);
  Match m;
  m.phi = a_m == 0.0 ? std::atan2(-b_m, 0.0) : std::atan2(-b_m, a_m * growth);
  m.theta = std::atan2(bj.y, bj.j / growth);
  m.nodes = sol.nodes;
  m.x = x;
  return m;
}

double horner(const std::vector<double>& poly, double r) {
  double v = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) v = v * r + *it;
  return v;
}

}  // namespace

BesselZeroTable::BesselZeroTable(double nu, double x_max) : nu_(nu), x_max_(x_max) {
  // j_{ν,1} > ν and consecutive zeros are more than 2.4 apart: a unit scan cannot skip one.
  double x = std::max(nu, 1e-3);
  double fx = bessel_jy_scaled(nu, x).j;
  while (x < x_max) {
    const double next = std::min(x + 1.0, x_max);
    const double fn = bessel_jy_scaled(nu, next).j;
    if ((fx > 0) != (fn > 0) && fn != 0.0) {
      auto f = [nu](double t) { return bessel_jy_scaled(nu, t).j; };
      auto tol = [](double a, double b) { return std::abs(a - b) < 1e-14 * std::max(1.0, std::abs(a)); };
      std::uintmax_t it = 100;
      const auto [lo, hi] = boost::math::tools::toms748_solve(f, x, next, fx, fn, tol, it);
      zeros_.push_back(0.5 * (lo + hi));
    } else if (fn == 0.0) {
      zeros_.push_back(next);
    }
    x = next;
    fx = fn;
  }
}

int BesselZeroTable::count_below(double x) const {
  if (x > x_max_) throw Error(ErrorKind::DomainError, "BesselZeroTable queried beyond its range");
  return int(std::lower_bound(zeros_.begin(), zeros_.end(), x) - zeros_.begin());
}

double phase_shift_mod_pi(const Channel& channel, const PotentialSpec& spec, double k, const RadialOptions& options,
                          double r_match) {
  if (!(k > 0.0)) throw Error(ErrorKind::DomainError, "phase shift needs k > 0");
  if (!spec.has_short_range()) return 0.0;
  const auto m = match_exterior(channel, spec, k, options, r_match);
  // tan δ = -B/A: reduce the angle of (A, -B) to (-π/2, π/2].
  double d = m.phi;
  while (d > 0.5 * kPi) d -= kPi;
  while (d <= -0.5 * kPi) d += kPi;
  return d;
}

double phase_shift(const Channel& channel, const PotentialSpec& spec, double k, const RadialOptions& options,
                   const BesselZeroTable* zeros) {
  if (!(k > 0.0)) throw Error(ErrorKind::DomainError, "phase shift needs k > 0");
  if (!spec.has_short_range()) return 0.0;
  const auto m = match_exterior(channel, spec, k, options, 0.0);
  int bessel_nodes;
  if (zeros != nullptr && zeros->nu() == channel.nu && m.x <= zeros->x_max()) {
    bessel_nodes = zeros->count_below(m.x);
  } else {
    bessel_nodes = BesselZeroTable(channel.nu, m.x).count_below(m.x);
  }
  const Placed theta = place(m.theta, bessel_nodes * kPi);
  const Placed total = place(m.phi + m.theta, m.nodes * kPi);
  // δ = total - theta, assembled so that small phases keep full relative precision.
  const double turns = std::round((total.value - theta.value - m.phi) / (2.0 * kPi));
  return m.phi + 2.0 * kPi * turns + (total.clamp - theta.clamp);
}

double born_phase(const Channel& channel, const PotentialSpec& spec, double k, double rel_tol) {
  if (!(k > 0.0)) throw Error(ErrorKind::DomainError, "born phase needs k > 0");
  if (!spec.has_short_range()) return 0.0;
  double sum = 0.0;
  for (const auto& seg : spec.w) {
    const double a = seg.r_begin, b = std::min(seg.r_end, spec.r_cut);
    if (b <= a) continue;
    auto f = [&](double r) {
      if (r <= 0.0) return 0.0;
      const auto p = bessel_jy_scaled(channel.nu, k * r);
      const double j = p.j * std::exp(-p.log_scale);
      return horner(seg.poly, r) * j * j * r;
    };
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, rel_tol);
  }
  return -0.5 * kPi * spec.g * sum;
}

double born_bound(const Channel& channel, const PotentialSpec& spec, double k) {
  const double strength = spec.max_abs_coupled();
  if (strength == 0.0) return 0.0;
  const double R = spec.r_cut, nu = channel.nu;
  const double crude = 0.25 * kPi * strength * R * R;
  const double log_small = 2.0 * nu * std::log(0.5 * k * R) - 2.0 * std::lgamma(nu + 1.0) +
                           std::log(0.5 * kPi * strength * R * R / (2.0 * nu + 2.0));
  return std::min(crude, std::exp(log_small));
}

std::vector<double> geometric_k_grid(double k_min, double k_max, int per_decade) {
  if (!(k_min > 0.0) || !(k_max > k_min) || per_decade < 1) throw Error(ErrorKind::DomainError, "bad k grid");
  const int steps = int(std::ceil(std::log10(k_max / k_min) * per_decade - 1e-9));
  std::vector<double> grid;
  for (int i = 0; i < steps; ++i) grid.push_back(k_min * std::pow(10.0, double(i) / per_decade));
  grid.push_back(k_max);
  return grid;
}

double PhaseCurve::levinson_drop() const {
  double gamma = 0.0;
  if (threshold_singular) gamma = channel.nu <= 1.0 ? channel.nu : 1.0;
  return kPi * (bound_states + gamma);
}

PhaseCurve phase_curve(const Channel& channel, const PotentialSpec& spec, const std::vector<double>& k_grid,
                       const PhaseOptions& options) {
  if (k_grid.empty() || !(k_grid.front() > 0.0) || !std::is_sorted(k_grid.begin(), k_grid.end()))
    throw Error(ErrorKind::DomainError, "k grid must be positive and ascending");
  PhaseCurve curve;
  curve.channel = channel;
  curve.k_grid = k_grid;
  curve.born_anchor_k = k_grid.back();
  if (!spec.has_short_range()) {
    curve.delta.assign(k_grid.size(), 0.0);
    return curve;
  }

  const BesselZeroTable zeros(channel.nu, k_grid.back() * spec.r_cut * 1.001);
  auto eval = [&](double k) { return phase_shift(channel, spec, k, options.radial, &zeros); };
  for (double k : k_grid) curve.delta.push_back(eval(k));

  long evaluations = long(k_grid.size());
  for (std::size_t i = 0; i + 1 < curve.k_grid.size();) {
    if (std::abs(curve.delta[i + 1] - curve.delta[i]) < 0.5 * kPi) {
      ++i;
      continue;
    }
    if (++evaluations > options.refine_budget || curve.k_grid[i + 1] - curve.k_grid[i] < 1e-14 * curve.k_grid[i]) {
      std::ostringstream os;
      os << "phase curve for nu = " << channel.nu << " jumps by " << curve.delta[i + 1] - curve.delta[i]
         << " near k = " << curve.k_grid[i];
      throw Error(ErrorKind::UnresolvedBranch, os.str());
    }
    const double mid = std::sqrt(curve.k_grid[i] * curve.k_grid[i + 1]);
    curve.k_grid.insert(curve.k_grid.begin() + long(i) + 1, mid);
    curve.delta.insert(curve.delta.begin() + long(i) + 1, eval(mid));
    ++curve.refinements;
  }

  const auto z = zero_energy_coefficients(channel, spec, options.radial);
  curve.a = z.a;
  curve.b = z.b;
  curve.threshold_singular = threshold_singular(z, options.tol_a);
  curve.bound_states = count_negative_eigenvalues(channel, spec, options.radial, options.tol_a);

  const double nu = channel.nu;
  const double k1 = curve.k_grid.front();
  double d1 = curve.delta.front();
  if (!curve.threshold_singular) {
    double offset;
    if (is_integer_order(nu)) {
      const double T = kPi * z.b * std::exp(2.0 * nu * std::log(0.5 * k1) - std::lgamma(nu) - std::lgamma(nu + 1.0)) / z.a;
      offset = std::atan(T);
    } else {
      const double ratio = std::tgamma(1.0 - nu) / std::tgamma(1.0 + nu);
      const double t = z.b / z.a * ratio * std::exp(2.0 * nu * std::log(0.5 * k1));
      offset = std::arg(1.0 + t * std::polar(1.0, kPi * nu));
    }
    curve.delta0_limit = d1 - offset;
  } else {
    // Leading correction of the threshold law at criticality. The integrator's own error
    // detunes a by about rtol·1e-2, which the law amplifies at small k, so both samples are
    // redone with a tighter tolerance and kept on the branch of the grid values.
    RadialOptions tight = options.radial;
    tight.rtol *= 1e-2;
    auto snap = [&](double k, double loose) {
      auto z2 = zeros;
      return loose + std::remainder(phase_shift(channel, spec, k, tight, &z2) - loose, kPi);
    };
    const double k2 = k1 * options.singular_ratio;
    const double d2 = snap(k2, eval(k2));
    d1 = snap(k1, d1);
    if (is_integer_order(nu) && std::round(nu) == 1.0) {
      // Resonant ν = 1 law: cot(δ - δ0) = (2/π)(ln k + c). Two samples fix δ0 and c;
      // the plain 1/ln k model picks the root.
      const double l1 = std::log(k1), l2 = std::log(k2);
      const double crude = (d1 * l1 - d2 * l2) / (l1 - l2);
      const double D = d2 - d1, S = (2.0 / kPi) * (l1 - l2);
      const double arg = std::cos(D) - 2.0 * std::sin(D) / S;
      curve.delta0_limit = crude;
      if (std::abs(arg) <= 1.0 && D != 0.0) {
        const double root = std::acos(arg);
        double best = std::numeric_limits<double>::infinity();
        for (double x1 : {0.5 * (root - D), 0.5 * (-root - D)}) {
          for (int turn = -1; turn <= 1; ++turn) {
            const double x = x1 + turn * kPi;
            if (std::abs(d1 - x - crude) < best) {
              best = std::abs(d1 - x - crude);
              curve.delta0_limit = d1 - x;
            }
          }
        }
      }
    } else {
      const double p = nu < 1.0 ? 2.0 - 2.0 * nu : std::min(2.0 * nu - 2.0, 2.0);
      const double w = std::pow(options.singular_ratio, p);
      curve.delta0_limit = (d2 - w * d1) / (1.0 - w);
    }
  }

  curve.born_at_anchor = born_phase(channel, spec, curve.born_anchor_k, options.quad_tol);
  curve.anchor_consistent =
      std::abs(curve.delta.back() - curve.born_at_anchor) < 0.05 * std::abs(curve.born_at_anchor) + 1e-4;
  return curve;
}

}  // namespace levscat
