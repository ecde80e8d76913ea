#include "levscat/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "levscat/error.hpp"

namespace levscat {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1.0e-300;
constexpr double kRescale = 1.0e250;
constexpr int kMaxIterations = 200000;

// Maclaurin coefficients of 1/Γ(1+x) (Abramowitz & Stegun 6.1.34, shifted by one).
constexpr std::array<double, 26> kRecipGamma1p = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

// Γ1 = (1/Γ(1-μ) - 1/Γ(1+μ)) / (2μ) and Γ2 = (1/Γ(1-μ) + 1/Γ(1+μ)) / 2, |μ| ≤ 1/2.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  double even = 0.0, odd = 0.0;
  double power = 1.0;
  for (std::size_t k = 0; k < kRecipGamma1p.size(); ++k) {
    if (k % 2 == 0)
      even += kRecipGamma1p[k] * power;
    else
      odd += kRecipGamma1p[k] * power;
    power *= mu;
  }
  // odd holds Σ_{k odd} a_k μ^k; divide by μ analytically.
  double odd_over_mu = 0.0;
  power = 1.0;
  for (std::size_t k = 1; k < kRecipGamma1p.size(); k += 2) {
    odd_over_mu += kRecipGamma1p[k] * power;
    power *= mu * mu;
  }
  gampl = even + odd;
  gammi = even - odd;
  gam1 = -odd_over_mu;
  gam2 = even;
}

[[noreturn]] void domain_error(double nu, double x) {
  std::ostringstream os;
  os << "bessel_jy(nu=" << nu << ", x=" << x << ") outside nu in [0, " << kMaxBesselOrder
     << "], x in (0, " << kMaxBesselArgument << ")";
  throw Error(ErrorKind::DomainError, os.str());
}

double signed_exp(double mantissa, double log_shift) {
  if (mantissa == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(mantissa)) + log_shift), mantissa);
}

}  // namespace

BesselPair ScaledBesselPair::unscaled() const {
  if (log_scale == 0.0) return {j, y, jprime, yprime};
  const double down = std::exp(-log_scale);
  const double up = std::exp(log_scale);
  return {j * down, y * up, jprime * down, yprime * up};
}

double rgamma1p_series(double x) {
  double sum = 0.0;
  for (auto it = kRecipGamma1p.rbegin(); it != kRecipGamma1p.rend(); ++it) sum = sum * x + *it;
  return sum;
}

ScaledBesselPair bessel_jy_scaled(double nu, double x) {
  if (!(nu >= 0.0) || nu > kMaxBesselOrder || !(x > 0.0) || !(x < kMaxBesselArgument))
    domain_error(nu, x);

  constexpr double kSwitch = 2.0;
  const int nl = x < kSwitch ? int(nu + 0.5) : std::max(0, int(nu - x + 1.5));
  const double mu = nu - nl;
  const double mu2 = mu * mu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / kPi;

  // CF1: J'_ν/J_ν by modified Lentz.
  int isign = 1;
  double h = std::max(nu * xi, kTiny);
  double b = xi2 * nu, d = 0.0, c = h;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b - 1.0 / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  if (iter >= kMaxIterations) throw Error(ErrorKind::NoConvergence, "bessel_jy: CF1 did not converge");

  // Downward recurrence of an unnormalised J from ν to μ.
  double rjl = isign * 1.0e-30;
  double rjpl = h * rjl;
  const double rjl1 = rjl;
  const double rjp1 = rjpl;
  double log_j_shift = 0.0;  // true rjl = rjl · e^{log_j_shift}
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double next = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * next - rjl;
    rjl = next;
    if (std::abs(rjl) > kRescale) {
      rjl /= kRescale;
      rjpl /= kRescale;
      log_j_shift += std::log(kRescale);
    }
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  double rjmu, rymu, rymup, ry1;
  if (x < kSwitch) {
    // Temme's series for Y_μ, Y_{μ+1}.
    const double x2 = 0.5 * x;
    const double pimu = kPi * mu;
    const double fct = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double dd = -std::log(x2);
    double e = mu * dd;
    const double fct2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = 2.0 / kPi * fct * (gam1 * std::cosh(e) + gam2 * fct2 * dd);
    e = std::exp(e);
    double p = e / (gampl * kPi);
    double q = 1.0 / (e * kPi * gammi);
    const double pimu2 = 0.5 * pimu;
    const double fct3 = std::abs(pimu2) < kEps ? 1.0 : std::sin(pimu2) / pimu2;
    const double r = kPi * pimu2 * fct3 * fct3;
    double cc = 1.0;
    dd = -x2 * x2;
    double sum = ff + r * q;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIterations; ++i) {
      ff = (i * ff + p + q) / (i * double(i) - mu2);
      cc *= dd / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = cc * (ff + r * q);
      sum += del;
      sum1 += cc * p - i * del;
      if (std::abs(del) < (1.0 + std::abs(sum)) * kEps) break;
    }
    if (i > kMaxIterations) throw Error(ErrorKind::NoConvergence, "bessel_jy: Temme series did not converge");
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = mu * xi * rymu - ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    // Steed's CF2 for p + iq = (J'_μ + iY'_μ)/(J_μ + iY_μ).
    double a = 0.25 - mu2;
    double p = -0.5 * xi;
    double q = 1.0;
    const double br = 2.0 * x;
    double bi = 2.0;
    double fct = a * xi / (p * p + q * q);
    double cr = br + q * fct;
    double ci = bi + p * fct;
    double den = br * br + bi * bi;
    double dr = br / den;
    double di = -bi / den;
    double dlr = cr * dr - ci * di;
    double dli = cr * di + ci * dr;
    double temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    int i = 1;
    for (; i < kMaxIterations; ++i) {
      a += 2 * i;
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::abs(dr) + std::abs(di) < kTiny) dr = kTiny;
      fct = a / (cr * cr + ci * ci);
      cr = br + cr * fct;
      ci = bi - ci * fct;
      if (std::abs(cr) + std::abs(ci) < kTiny) cr = kTiny;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      temp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = temp;
      if (std::abs(dlr - 1.0) + std::abs(dli) <= kEps) break;
    }
    if (i >= kMaxIterations) throw Error(ErrorKind::NoConvergence, "bessel_jy: CF2 did not converge");
    const double gam = (p - f) / q;
    rjmu = std::copysign(std::sqrt(w / ((p - f) * gam + q)), rjl);
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
    ry1 = mu * xi * rymu - rymup;
  }

  const double scale = rjmu / rjl;
  const double j_m = rjl1 * scale;
  const double jp_m = rjp1 * scale;

  double log_y_shift = 0.0;  // true Y = mantissa · e^{log_y_shift}
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = next;
    if (std::abs(ry1) > kRescale) {
      ry1 /= kRescale;
      rymu /= kRescale;
      log_y_shift += std::log(kRescale);
    }
  }
  const double y_m = rymu;
  const double yp_m = nu * xi * rymu - ry1;

  ScaledBesselPair out;
  if (log_j_shift == 0.0 && log_y_shift == 0.0 && std::abs(j_m) > 1.0e-200) {
    out = {j_m, y_m, jp_m, yp_m, 0.0};
    return out;
  }
  // Balance the two exponents so that |J|e^{s} = |Y|e^{-s}.
  const double lj = (j_m != 0.0 ? std::log(std::abs(j_m)) : -745.0) - log_j_shift;
  const double ly = std::log(std::abs(y_m)) + log_y_shift;
  const double s = 0.5 * (ly - lj);
  out.log_scale = s;
  out.j = signed_exp(j_m, -log_j_shift + s);
  out.jprime = signed_exp(jp_m, -log_j_shift + s);
  out.y = signed_exp(y_m, log_y_shift - s);
  out.yprime = signed_exp(yp_m, log_y_shift - s);
  return out;
}

BesselPair bessel_jy(double nu, double x) { return bessel_jy_scaled(nu, x).unscaled(); }

double gamma_fn(double x) {
  if (x <= 0.0 && x == std::floor(x)) {
    std::ostringstream os;
    os << "gamma_fn pole at x = " << x;
    throw Error(ErrorKind::PoleError, os.str());
  }
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + double(i));
  const double t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * series;
}

std::complex<double> c_nu(double nu) {
  if (!(nu > 0.0) || nu > 1.0) {
    std::ostringstream os;
    os << "c_nu defined for 0 < nu <= 1, got " << nu;
    throw Error(ErrorKind::DomainError, os.str());
  }
  if (nu == 1.0) return {-0.125, 0.0};
  const double magnitude = gamma_fn(1.0 - nu) / (nu * std::pow(2.0, 2.0 * nu + 1.0) * gamma_fn(1.0 + nu));
  return -std::polar(magnitude, -kPi * nu);
}

std::complex<double> bessel_i(double nu, std::complex<double> z) {
  if (!(nu >= 0.0)) throw Error(ErrorKind::DomainError, "bessel_i requires nu >= 0");
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const std::complex<double> half = 0.5 * z;
  const std::complex<double> quarter_sq = half * half;
  std::complex<double> term = std::exp(nu * std::log(half)) / gamma_fn(nu + 1.0);
  std::complex<double> sum = term;
  for (int k = 1; k < 2000; ++k) {
    term *= quarter_sq / (double(k) * (double(k) + nu));
    sum += term;
    if (std::abs(term) <= 1.0e-17 * std::abs(sum)) return sum;
  }
  throw Error(ErrorKind::NoConvergence, "bessel_i series did not converge");
}

std::complex<double> bessel_k(double nu, std::complex<double> z) {
  if (!(nu >= 0.0)) throw Error(ErrorKind::DomainError, "bessel_k requires nu >= 0");
  if (!(z.real() > 0.0)) throw Error(ErrorKind::DomainError, "bessel_k requires Re z > 0");
  // Strip of analyticity |Im t| < π/2 - |arg z| fixes the step; the cut-off
  // is where exp(-Re z cosh t) cosh(νt) has dropped below 1e-20 of the peak.
  const double strip = 0.5 * kPi - std::abs(std::arg(z));
  const double step = std::min(0.2, strip / 7.0);
  const double re = z.real();
  auto integrand = [&](double t) { return std::exp(-z * std::cosh(t)) * std::cosh(nu * t); };
  std::complex<double> sum = 0.5 * integrand(0.0);
  double peak = std::abs(sum);
  for (int k = 1;; ++k) {
    const double t = k * step;
    const std::complex<double> value = integrand(t);
    sum += value;
    peak = std::max(peak, std::abs(value));
    const double envelope = std::exp(-re * std::cosh(t) + nu * t);
    if (re * std::cosh(t) > 50.0 + nu * t && envelope < 1.0e-20 * peak) break;
    if (k > 10000000) throw Error(ErrorKind::NoConvergence, "bessel_k quadrature did not converge");
  }
  return step * sum;
}

}  // namespace levscat
