#include "levscat/greens.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levscat/error.hpp"
#include "levscat/specfun.hpp"

namespace levscat {

namespace {

constexpr double kPi = std::numbers::pi;

// arg z in (0, 2π).
double branch_arg(std::complex<double> z) {
  if (z.imag() == 0.0) {
    if (!(z.real() < 0.0)) throw Error(ErrorKind::BranchError, "z on the cut [0, ∞)");
    return kPi;
  }
  double a = std::arg(z);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

double weight(int n, double r, double tau) { return std::pow(r * tau, -0.5 * (n - 2)); }

void check_radii(double r, double tau) {
  if (!(r > 0.0) || !(tau > 0.0)) throw Error(ErrorKind::DomainError, "radii must be positive");
}

}  // namespace

std::complex<double> principal_sqrt_cut_positive(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() < 0.0) return {0.0, std::sqrt(-z.real())};
  return std::polar(std::sqrt(std::abs(z)), 0.5 * branch_arg(z));
}

std::complex<double> branch_pow(std::complex<double> z, double p) {
  return std::polar(std::pow(std::abs(z), p), p * branch_arg(z));
}

std::complex<double> kernel(const Channel& channel, int n, std::complex<double> z, double r, double tau) {
  check_radii(r, tau);
  const std::complex<double> w = principal_sqrt_cut_positive(z);
  // J_ν(w) = e^{iπν/2} I_ν(-iw) and H⁽¹⁾_ν(w) = (2/(iπ)) e^{-iπν/2} K_ν(-iw), so the
  // prefactor iπ/2 cancels against 2/(iπ). The constant iπ/2 is the one for which
  // (Q_ν - z)K(·, τ) = δ_τ/τ^{n-1}; the unit tests check this by finite differences.
  const std::complex<double> zeta(w.imag(), -w.real());
  const double lo = std::min(r, tau), hi = std::max(r, tau);
  return weight(n, r, tau) * bessel_i(channel.nu, zeta * lo) * bessel_k(channel.nu, zeta * hi);
}

double zero_energy_kernel(const Channel& channel, int n, double r, double tau) {
  check_radii(r, tau);
  const double nu = channel.nu;
  if (!(nu > 0.0)) throw Error(ErrorKind::DomainError, "zero-energy kernel needs nu > 0");
  return weight(n, r, tau) * std::pow(std::min(r, tau) / std::max(r, tau), nu) / (2.0 * nu);
}

double zero_energy_bound(double nu) { return std::pow(2.0, std::min(1.0, nu)) / (2.0 * nu); }

std::vector<double> default_z_moduli() { return {1e-3, 1e-4, 1e-5, 1e-6}; }

Extraction extract_gnu0(const Channel& channel, int n, double r, double tau, const std::vector<double>& z_moduli) {
  const double nu = channel.nu;
  if (!(nu > 0.0 && nu < 1.0)) throw Error(ErrorKind::DomainError, "extract_gnu0 needs 0 < nu < 1");
  if (z_moduli.size() < 3) throw Error(ErrorKind::DomainError, "need at least three moduli");
  const double F = zero_energy_kernel(channel, n, r, tau);
  std::vector<std::complex<double>> row;
  for (double m : z_moduli) {
    const std::complex<double> z(-m, 0.0);
    row.push_back((kernel(channel, n, z, r, tau) - F) / branch_pow(z, nu));
  }
  Extraction out;
  out.estimates.push_back(row.back());
  // Each stage removes one power |z|^p from neighbouring pairs (exact for geometric moduli).
  std::vector<double> mod = z_moduli;
  for (double p : {1.0 - nu, 1.0}) {
    std::vector<std::complex<double>> next;
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      const double w = std::pow(mod[i + 1] / mod[i], p);
      next.push_back((row[i + 1] - w * row[i]) / (1.0 - w));
    }
    row = std::move(next);
    mod.erase(mod.begin());
    out.estimates.push_back(row.back());
  }
  out.value = row.back();
  const auto& e = out.estimates;
  out.spread = row.size() >= 2 ? std::abs(row.back() - row[row.size() - 2]) / std::abs(row.back())
                               : std::abs(e.back() - e[e.size() - 2]) / std::abs(e.back());
  if (out.spread > 1e-3) {
    std::ostringstream os;
    os << "G_{nu,0} estimates disagree by " << out.spread << " relative";
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  return out;
}

namespace {

// Real least squares of D = a1·|z| ln|z| + a2·|z| on a slice of moduli.
std::pair<double, double> fit_g11(int n, double r, double tau, const std::vector<double>& m) {
  const Channel one{1.0 - 0.25 * (n - 2) * (n - 2), 1.0, 1};
  const double F = zero_energy_kernel(one, n, r, tau);
  Eigen::MatrixXd A(m.size(), 2);
  Eigen::VectorXd y(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double scale = m[i];  // rows relative to |z|
    A(long(i), 0) = std::log(m[i]);
    A(long(i), 1) = 1.0;
    y(long(i)) = (kernel(one, n, std::complex<double>(-m[i], 0.0), r, tau).real() - F) / scale;
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
  return {c(0), c(1)};
}

}  // namespace

G11Fit extract_g11(int n, double r, double tau, const std::vector<double>& moduli) {
  check_radii(r, tau);
  std::vector<double> z_moduli = moduli;
  if (z_moduli.empty()) {
    const double scale = std::max(r, tau);
    for (double m : default_z_moduli()) z_moduli.push_back(m / (scale * scale));
  }
  if (z_moduli.size() < 3) throw Error(ErrorKind::DomainError, "need at least three moduli");
  // On z = -|z|: z ln z = -|z| ln|z| - iπ|z|, so with D real, α = -a1 and β = -a2 - iπα.
  const auto [a1, a2] = fit_g11(n, r, tau, z_moduli);
  G11Fit fit;
  fit.alpha = -a1;
  fit.beta = std::complex<double>(-a2, -kPi * fit.alpha);
  const std::vector<double> head(z_moduli.begin(), z_moduli.begin() + 3);
  const std::vector<double> tail(z_moduli.end() - 3, z_moduli.end());
  fit.alpha_head = -fit_g11(n, r, tau, head).first;
  fit.alpha_tail = -fit_g11(n, r, tau, tail).first;
  const double spread = std::abs(fit.alpha_head - fit.alpha_tail) / std::abs(fit.alpha);
  if (spread > 1e-3) {
    std::ostringstream os;
    os << "G_{1,1} fits disagree by " << spread << " relative";
    throw Error(ErrorKind::NoConvergence, os.str());
  }
  return fit;
}

double singular_exponent(const Channel& channel, int n, double r, double tau, const std::vector<double>& z_moduli) {
  const double F = zero_energy_kernel(channel, n, r, tau);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double m : z_moduli) {
    const double x = std::log(m);
    const double y = std::log(std::abs(kernel(channel, n, std::complex<double>(-m, 0.0), r, tau) - F));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = double(z_moduli.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace levscat
