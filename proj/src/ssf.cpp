#include "levscat/ssf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "levscat/error.hpp"
#include "levscat/parallel.hpp"
#include "levscat/specfun.hpp"

namespace levscat {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest |U| R² over the support; the centrifugal barrier dominates it when ν² - 1/4 exceeds this.
double well_strength(const PotentialSpec& spec) { return spec.max_abs_coupled() * spec.r_cut * spec.r_cut; }

bool perturbative(const Channel& ch, const PotentialSpec& spec) {
  return ch.nu * ch.nu - 0.25 > well_strength(spec);
}

// ∫ p(r)·r^m dr over [a, b] for a polynomial p.
double poly_moment(const std::vector<double>& p, int m, double a, double b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const int e = int(i) + m + 1;
    sum += p[i] * (std::pow(b, e) - std::pow(a, e)) / e;
  }
  return sum;
}

std::vector<double> poly_square(const std::vector<double>& p) {
  if (p.empty()) return {};
  std::vector<double> out(2 * p.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) out[i + j] += p[i] * p[j];
  return out;
}

}  // namespace

SSFOptions SSFOptions::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::DomainError, "tol-scale must be positive");
  SSFOptions o = *this;
  o.radial.rtol *= s;
  o.quad_tol *= s;
  o.born_drop *= s;
  o.k_min *= s;
  // The top of the window moves out as 1/s: the fit bias from the ripple shrinks with it.
  o.fit_lo /= s;
  o.fit_hi /= s;
  o.k_max = std::sqrt(o.fit_hi);
  return o;
}

SSFOptions SSFOptions::with_tol_scale(double s) { return SSFOptions{}.scaled(s); }

PhaseOptions SSFOptions::phase_options() const {
  PhaseOptions p;
  p.radial = radial;
  p.radial.store_grid = false;
  p.tol_a = tol_a;
  p.quad_tol = quad_tol;
  p.singular_ratio = singular_ratio;
  return p;
}

std::vector<double> SSFOptions::k_grid() const { return geometric_k_grid(k_min, k_max, per_decade); }

double born_truncation_nu(const PotentialSpec& spec, const SSFOptions& options) {
  if (!spec.has_short_range()) return 0.0;
  // born_bound is increasing in ν up to about kR/2 and decreasing after.
  const double start = std::max(1.0, 0.5 * options.k_max * spec.r_cut);
  for (double nu = start;; nu += 0.25) {
    if (born_bound(Channel{0.0, nu, 1}, spec, options.k_max) < options.born_drop) return nu;
    if (nu > 1e5) throw Error(ErrorKind::TruncationTooCoarse, "Born bound never drops below the threshold");
  }
}

SSFCurve build_ssf(const ChannelSet& channels, const PotentialSpec& spec, const std::vector<double>& lambda_grid,
                   const SSFOptions& options) {
  if (lambda_grid.size() < 3 || !(lambda_grid.front() > 0.0) || !std::is_sorted(lambda_grid.begin(), lambda_grid.end()))
    throw Error(ErrorKind::DomainError, "lambda grid needs at least three positive ascending points");
  SSFCurve curve;
  curve.n = spec.n;
  curve.lambda_grid = lambda_grid;
  const std::size_t m = lambda_grid.size();
  curve.xi.assign(m, 0.0);
  curve.xiprime.assign(m, 0.0);

  std::vector<double> k(m);
  for (std::size_t i = 0; i < m; ++i) k[i] = std::sqrt(lambda_grid[i]);

  // Above ν = k_max·R every J_ν(kr)² with r ≤ R grows with k, so the largest Born phase on
  // the grid is the one at k_max.
  std::vector<Channel> kept;
  for (const auto& ch : channels.channels) {
    double largest = std::numeric_limits<double>::infinity();
    if (ch.nu > k.back() * spec.r_cut && perturbative(ch, spec)) {
      largest = born_bound(ch, spec, k.back());
      if (largest >= 1e-30) largest = std::abs(born_phase(ch, spec, k.back(), options.quad_tol));
    }
    if (largest < options.born_drop) {
      curve.dropped.push_back(ch);
      curve.truncation_bound += ch.mult * largest / kPi;
    } else {
      kept.push_back(ch);
    }
  }
  // Channels above the set's ν range are all dropped; add their tail until it stops mattering.
  if (spec.has_short_range()) {
    double nu = channels.channels.empty() ? 0.0 : channels.channels.back().nu;
    for (int step = 1; step < 100000; ++step) {
      const double next = nu + step;
      const double bound = born_bound(Channel{0.0, next, 1}, spec, k.back());
      // Multiplicities grow at most like ν^{n-2}; bound each unit step of ν by that many channels.
      const double mult = std::max(2.0, 2.0 * std::pow(next + 1.0, std::max(spec.n - 2, 0)));
      const double term = mult * bound / kPi;
      curve.truncation_bound += term;
      if (term < 1e-16 && next > 0.5 * k.back() * spec.r_cut) break;
    }
  }
  if (curve.truncation_bound > options.truncation_limit) {
    std::ostringstream os;
    os << "dropped channels may carry " << curve.truncation_bound << " > " << options.truncation_limit;
    throw Error(ErrorKind::TruncationTooCoarse, os.str());
  }

  const PhaseOptions popts = options.phase_options();
  curve.curves = parallel_map<PhaseCurve>(kept.size(), options.threads, [&](std::size_t c) {
    const Channel& ch = kept[c];
    // Skip momenta where the phase is below 1e-14 and nothing singular can happen.
    std::size_t first = 0;
    if (perturbative(ch, spec))
      while (first + 2 < m && born_bound(ch, spec, k[first]) < 1e-14) ++first;
    std::vector<double> sub(k.begin() + long(first), k.end());
    PhaseCurve pc = phase_curve(ch, spec, sub, popts);
    // Back onto the common grid: refinement only inserted points.
    std::vector<double> delta(m, 0.0);
    std::size_t j = 0;
    for (std::size_t i = first; i < m; ++i) {
      while (pc.k_grid[j] != k[i]) ++j;
      delta[i] = pc.delta[j];
    }
    if (first > 0 && !pc.threshold_singular && pc.bound_states == 0) pc.delta0_limit = 0.0;
    pc.k_grid = k;
    pc.delta = std::move(delta);
    return pc;
  });

  // Dropped channels are below the Born threshold, where the first Born phase is accurate to
  // second order; adding it back removes the truncation bias without solving their ODEs.
  const auto tails = parallel_map<std::vector<double>>(curve.dropped.size(), options.threads, [&](std::size_t c) {
    const Channel& ch = curve.dropped[c];
    std::vector<double> tail(m, 0.0);
    for (std::size_t i = m; i-- > 0;) {
      if (ch.mult * born_bound(ch, spec, k[i]) / kPi < 1e-18) break;
      tail[i] = ch.mult * born_phase(ch, spec, k[i], options.quad_tol) / kPi;
    }
    return tail;
  });
  for (const auto& tail : tails)
    for (std::size_t i = 0; i < m; ++i) curve.xi[i] += tail[i];
  curve.born_tail = 0.0;
  for (const auto& tail : tails) curve.born_tail += tail.back();

  for (const auto& pc : curve.curves) {
    const double w = pc.channel.mult / kPi;
    for (std::size_t i = 0; i < m; ++i) curve.xi[i] += w * pc.delta[i];
    curve.xi_zero += w * pc.delta0_limit;
  }

  // Three-point differences in x = ln λ, one-sided at the ends.
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = std::log(lambda_grid[i]);
  for (std::size_t i = 0; i < m; ++i) {
    double dfdx;
    if (i == 0) {
      dfdx = (curve.xi[1] - curve.xi[0]) / (x[1] - x[0]);
    } else if (i + 1 == m) {
      dfdx = (curve.xi[i] - curve.xi[i - 1]) / (x[i] - x[i - 1]);
    } else {
      const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
      dfdx = -h2 / (h1 * (h1 + h2)) * curve.xi[i - 1] + (h2 - h1) / (h1 * h2) * curve.xi[i] +
             h1 / (h2 * (h1 + h2)) * curve.xi[i + 1];
    }
    curve.xiprime[i] = dfdx / lambda_grid[i];
  }
  return curve;
}

namespace {

double antiderivative(double lam, double p) {
  return std::abs(p + 1.0) < 1e-12 ? std::log(lam) : std::pow(lam, p + 1.0) / (p + 1.0);
}

}  // namespace

double CounterTerms::smooth(double lambda) const {
  double sum = constant;
  for (std::size_t i = 0; i < c.size(); ++i) sum += c[i] * antiderivative(lambda, exponent[i]);
  return sum;
}

CounterTerms fit_counterterms(const SSFCurve& curve, double lo, double hi) {
  CounterTerms ct;
  const int terms = curve.n / 2 + 1;
  for (int j = 1; j <= terms; ++j) {
    ct.j.push_back(j);
    ct.exponent.push_back(0.5 * curve.n - j - 1.0);
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < curve.lambda_grid.size(); ++i)
    if (curve.lambda_grid[i] >= lo * (1.0 - 1e-12) && curve.lambda_grid[i] <= hi * (1.0 + 1e-12)) rows.push_back(i);
  if (int(rows.size()) <= terms + 1) throw Error(ErrorKind::PoorFit, "too few samples in the counterterm window");

  // The fit is done on the antiderivative: ξ(λ) = C + Σ c_j B_j(λ) with B_j' = λ^{p_j}, so the
  // data are not differentiated and the square-well ripple in ξ' averages out. Rows are
  // scaled by the leading B_1 (relative weights) times a Hann taper in ln λ, which keeps
  // the ripple from leaking into the coefficients through the window edges.
  Eigen::MatrixXd A(rows.size(), terms + 1);
  Eigen::VectorXd y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double lam = curve.lambda_grid[rows[r]];
    const double t = std::log(lam / lo) / std::log(hi / lo);
    const double taper = std::max(std::pow(std::sin(kPi * t), 2), 1e-3);
    const double scale = std::max(std::abs(antiderivative(lam, ct.exponent[0])), 1.0) / taper;
    for (int j = 0; j < terms; ++j) A(long(r), j) = antiderivative(lam, ct.exponent[j]) / scale;
    A(long(r), terms) = 1.0 / scale;
    y(long(r)) = curve.xi[rows[r]] / scale;
  }
  // Column equilibration keeps the normal matrix usable across λ^{-2} … λ^{1/2}.
  Eigen::VectorXd colscale = A.colwise().norm().transpose();
  for (int j = 0; j <= terms; ++j)
    if (colscale(j) == 0.0) colscale(j) = 1.0;
  const Eigen::MatrixXd As = A * colscale.cwiseInverse().asDiagonal();
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
  const Eigen::VectorXd cs = qr.solve(y);
  const Eigen::VectorXd resid = y - As * cs;
  const double rss = resid.squaredNorm();
  const double ynorm = y.squaredNorm();
  ct.relative_residual = ynorm > 0.0 ? std::sqrt(rss / ynorm) : 0.0;

  const long dof = long(rows.size()) - terms - 1;
  const Eigen::MatrixXd normal = As.transpose() * As;
  const Eigen::MatrixXd cov = normal.inverse() * (rss / double(dof));
  for (int j = 0; j < terms; ++j) {
    ct.c.push_back(cs(j) / colscale(j));
    ct.sigma.push_back(std::sqrt(std::max(cov(j, j), 0.0)) / colscale(j));
  }
  ct.constant = cs(terms) / colscale(terms);
  if (ct.relative_residual > 1e-2) {
    std::ostringstream os;
    os << "counterterm fit leaves relative residual " << ct.relative_residual;
    throw Error(ErrorKind::PoorFit, os.str());
  }
  return ct;
}

double beta_heat(const PotentialSpec& spec) {
  if (spec.n % 2 != 0) throw Error(ErrorKind::OddDimension, "no constant heat term in odd dimension");
  double sum = 0.0;
  if (spec.n == 2) {
    // -(1/4π)·2π ∫ V r dr
    for (const auto& seg : spec.w) sum += poly_moment(seg.poly, 1, seg.r_begin, std::min(seg.r_end, spec.r_cut));
    return -0.5 * spec.g * sum;
  }
  if (spec.n == 4) {
    if (!spec.q.is_constant()) throw Error(ErrorKind::UnsupportedAngular, "n = 4 needs a constant tail");
    // (1/32π²)·2π² ∫ (2 q0 V r + V² r³) dr
    const double q0 = spec.q.mean();
    for (const auto& seg : spec.w) {
      const double b = std::min(seg.r_end, spec.r_cut);
      sum += 2.0 * q0 * spec.g * poly_moment(seg.poly, 1, seg.r_begin, b);
      sum += spec.g * spec.g * poly_moment(poly_square(seg.poly), 3, seg.r_begin, b);
    }
    return sum / 16.0;
  }
  throw Error(ErrorKind::DomainError, "heat constant implemented for n = 2 and n = 4 only");
}

double low_energy_exponent(const SSFCurve& curve, double lambda_lo, double lambda_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < curve.lambda_grid.size(); ++i) {
    const double lam = curve.lambda_grid[i];
    if (lam < lambda_lo * (1 - 1e-12) || lam > lambda_hi * (1 + 1e-12)) continue;
    const double d = std::abs(curve.xiprime[i]);
    if (!(d > 0.0)) continue;
    const double xv = std::log(lam), yv = std::log(d);
    sx += xv;
    sy += yv;
    sxx += xv * xv;
    sxy += xv * yv;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

LevinsonReport levinson_check(const PotentialSpec& spec, const ChannelSet& channels, const SSFOptions& options,
                              SSFCurve* curve_out) {
  spec.check();
  if (std::abs(options.k_max * options.k_max - options.fit_hi) > 1e-9 * options.fit_hi)
    throw Error(ErrorKind::DomainError, "k_max^2 must equal the top of the fit window");
  if (!(options.fit_lo >= 25.0) || !(options.fit_lo < options.fit_hi))
    throw Error(ErrorKind::DomainError, "fit window must satisfy 25 <= lo < hi");
  std::vector<double> lambda_grid;
  for (double k : options.k_grid()) lambda_grid.push_back(k * k);
  const SSFCurve curve = build_ssf(channels, spec, lambda_grid, options);
  const CounterTerms ct = fit_counterterms(curve, options.fit_lo, options.fit_hi);

  LevinsonReport rep;
  rep.n = spec.n;
  rep.counterterms = ct;
  rep.xi_top = curve.xi.back();
  rep.xi_zero = curve.xi_zero;
  rep.truncation_bound = curve.truncation_bound;
  const double Lambda = lambda_grid.back();
  double subtract = 0.0, fit_var = 0.0;
  for (std::size_t j = 0; j < ct.c.size(); ++j) {
    const double p = 0.5 * spec.n - ct.j[j];
    if (std::abs(p) < 1e-12) continue;
    const double gj = std::pow(Lambda, p) / p;
    subtract += ct.c[j] * gj;
    fit_var += gj * gj * ct.sigma[j] * ct.sigma[j];
  }
  rep.fit_error = std::sqrt(fit_var);
  // The raw top value carries the ripple of a non-smooth well; the fitted model does not.
  rep.xi_smooth = ct.smooth(Lambda);
  rep.lhs = rep.xi_smooth - rep.xi_zero - subtract;
  rep.beta = spec.n % 2 == 0 ? beta_heat(spec) : 0.0;

  bool singular = false, singular_one = false;
  for (const auto& pc : curve.curves) {
    rep.N_minus += pc.bound_states * pc.channel.mult;
    LevinsonChannel lc;
    lc.nu = pc.channel.nu;
    lc.mult = pc.channel.mult;
    lc.delta_zero = pc.delta0_limit;
    lc.delta_top = pc.delta.back();
    lc.expected_drop = pc.levinson_drop();
    lc.bound_states = pc.bound_states;
    if (pc.threshold_singular) {
      singular = true;
      if (std::abs(pc.channel.nu - 1.0) < 1e-9) singular_one = true;
      lc.cls = pc.channel.nu <= 1.0 ? ThresholdClass::Resonance : ThresholdClass::Eigenvalue;
      if (lc.cls == ThresholdClass::Eigenvalue) rep.N0 += pc.channel.mult;
      else rep.resonances.push_back({pc.channel.nu, pc.channel.mult});
    }
    rep.extrapolation_error += pc.channel.mult * std::abs(pc.delta0_limit - pc.delta.front()) / kPi;
    rep.channels.push_back(lc);
  }
  std::sort(rep.resonances.begin(), rep.resonances.end(),
            [](const ResonanceEntry& x, const ResonanceEntry& y) { return x.sigma < y.sigma; });
  for (const auto& r : rep.resonances) rep.resonance_sum += r.sigma * r.mult;
  rep.rhs = -(rep.N_minus + rep.N0 + rep.resonance_sum) + rep.beta;
  rep.residual = rep.lhs - rep.rhs;
  rep.error_estimate = rep.truncation_bound + rep.fit_error + rep.extrapolation_error;
  rep.tolerance = options.tolerance > 0.0 ? options.tolerance : singular_one ? 5e-2 : singular ? 2e-2 : 1e-2;
  rep.within_tolerance = std::abs(rep.residual) <= rep.tolerance;
  rep.low_energy_exponent = low_energy_exponent(curve, options.lambda_min, 100.0 * options.lambda_min);
  if (curve_out) *curve_out = curve;
  return rep;
}

LevinsonReport levinson_check(const PotentialSpec& spec, const SSFOptions& options, SSFCurve* curve) {
  spec.check();
  // Build well past the cut so the dropped tail is summed channel by channel.
  SSFOptions deep = options;
  deep.born_drop = 1e-20;
  // Orders past the Bessel box are left to the tail bound.
  const double nu_max = std::min(born_truncation_nu(spec, deep) + 1.0, kMaxBesselOrder - 1.0);
  const ChannelSet channels = build_channels(spec, nu_max);
  return levinson_check(spec, channels, options, curve);
}

}  // namespace levscat
