#pragma once

#include <vector>

#include "levscat/potential.hpp"

namespace levscat {

/// One angular sector: λ is the eigenvalue of -Δ_S + q, ν = √(λ + (n-2)²/4).
struct Channel {
  double lambda_nu = 0.0;
  double nu = 0.0;
  int mult = 1;
};

struct ChannelSet {
  std::vector<Channel> channels;  // ascending in ν
  std::vector<Channel> sigma1;    // the channels with ν ≤ 1
  double truncation_nu_max = 0.0;
};

/// Dimension of the degree-ℓ spherical harmonics on S^{n-1}.
long long sphere_multiplicity(int n, int ell);

/// Eigenvalues of -d²/dθ² + q(θ) on S¹ from the Fourier matrix with modes |m| ≤ cutoff,
/// ascending. Only the lowest few are reliable; see build_channels for the convergence loop.
std::vector<double> hill_eigenvalues(const AngularTail& q, int cutoff);

/// Channel index set with ν ≤ nu_max.
/// Throws Error{UnsupportedAngular} for non-constant q with n ≥ 3 and
/// Error{PositivityViolation} if the lowest λ is ≤ -(n-2)²/4.
ChannelSet build_channels(const PotentialSpec& spec, double nu_max);

}  // namespace levscat
