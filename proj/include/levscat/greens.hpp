#pragma once

#include <complex>
#include <vector>

#include "levscat/channels.hpp"

namespace levscat {

struct KernelSample {
  double r = 0.0;
  double tau = 0.0;
  std::complex<double> z;
  std::complex<double> value;
};

/// √z on the branch 0 < arg z < 2π (so 0 < arg √z < π). Throws Error{BranchError}
/// for z on [0, ∞).
std::complex<double> principal_sqrt_cut_positive(std::complex<double> z);
/// z^p on the same branch.
std::complex<double> branch_pow(std::complex<double> z, double p);

/// Kernel of (Q_ν - z)^{-1} with respect to s^{n-1} ds:
/// K = (iπ/2)(rτ)^{-(n-2)/2} J_ν(√z r_<) H⁽¹⁾_ν(√z r_>).
/// Evaluated through I_ν, K_ν at ζ = -i√z (Re ζ > 0), where the product equals
/// (rτ)^{-(n-2)/2} I_ν(ζ r_<) K_ν(ζ r_>). Intended for |√z|·max(r, τ) ≲ 30.
std::complex<double> kernel(const Channel& channel, int n, std::complex<double> z, double r, double tau);

/// F_{ν,0} = (1/(2ν))(rτ)^{-(n-2)/2}(r_</r_>)^ν, the z → 0 limit of kernel.
double zero_energy_kernel(const Channel& channel, int n, double r, double tau);

/// The constant 2^{min(1,ν)}/(2ν) bounding F·(rτ)^{(n-2)/2}·((r²+τ²)/(rτ))^{min(1,ν)}.
double zero_energy_bound(double nu);

struct Extraction {
  std::complex<double> value;
  std::vector<std::complex<double>> estimates;  // one per Richardson stage
  double spread = 0.0;                          // relative change between the last two estimates
};

/// Default approach sequence on the negative axis, |z| = 1e-3 … 1e-6.
std::vector<double> default_z_moduli();

/// lim (kernel(z) - F_{ν,0})/z^ν along z = -|z|, z^ν = |z|^ν e^{iπν}, by Richardson
/// elimination of the |z|^{1-ν} and |z| corrections. ν ∈ (0,1).
/// Throws Error{DomainError} for ν outside (0,1), Error{NoConvergence} if the last
/// two estimates differ by more than 1e-3 relative.
Extraction extract_gnu0(const Channel& channel, int n, double r, double tau,
                        const std::vector<double>& z_moduli = default_z_moduli());

struct G11Fit {
  double alpha = 0.0;          // coefficient of z ln z
  std::complex<double> beta;   // coefficient of z
  double alpha_head = 0.0;     // α from the first three moduli
  double alpha_tail = 0.0;     // α from the last three moduli
};

/// Fits kernel - F_{1,0} = α z ln z + β z on z = -|z| (ln z = ln|z| + iπ).
/// An empty list means default_z_moduli()/max(r,τ)², since the corrections scale with |z|·max(r,τ)².
/// Throws Error{NoConvergence} if the head and tail fits disagree by more than 1e-3 relative.
G11Fit extract_g11(int n, double r, double tau, const std::vector<double>& z_moduli = {});

/// Slope of log|kernel - F| against log|z| on the negative axis.
double singular_exponent(const Channel& channel, int n, double r, double tau,
                         const std::vector<double>& z_moduli = default_z_moduli());

}  // namespace levscat
