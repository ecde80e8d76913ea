#pragma once

#include <utility>
#include <vector>

#include "levscat/channels.hpp"
#include "levscat/potential.hpp"

namespace levscat {

/// Integration controls shared by every radial solve.
struct RadialOptions {
  double rtol = 1e-11;         // local relative tolerance of the Runge-Kutta-Fehlberg 7(8) stepper
  double r0 = 0.0;             // start radius; 0 selects 1e-3·min(1, r_cut), shrunk further for large |U - E|
  bool store_grid = true;      // keep every accepted step, otherwise only the two ends
  bool with_pairing = false;   // also accumulate ∫₀^r g·w·u·s^{ν+1/2} ds
};

/// Regular solution of -u'' + [(ν²-1/4)/r² + g·w(r)]u = E·u.
/// Samples are stored as mantissas: the true value is u[i]·exp(log_scale[i]).
struct RadialSolution {
  std::vector<double> r_grid;
  std::vector<double> u;
  std::vector<double> uprime;
  std::vector<double> log_scale;
  double E = 0.0;
  int nodes = 0;
  double pairing = 0.0;  // same scale as the last sample

  double r_end() const { return r_grid.back(); }
  double u_end() const { return u.back(); }
  double uprime_end() const { return uprime.back(); }
  double log_scale_end() const { return log_scale.back(); }
};

/// u = a·r^{1/2+ν} + b·r^{1/2-ν} beyond the support of w.
struct ZeroEnergyCoeffs {
  double a = 0.0;
  double b = 0.0;
  double cond = 1.0;
  int interior_nodes = 0;
  double pairing = 0.0;  // ∫ g·w·u·r^{ν+1/2} dr, equal to -2ν·b
};

/// Coefficients c_j of u = r^{ν+1/2} Σ c_j r^j, c_0 = 1, for the Taylor data of g·w at 0.
std::vector<double> frobenius_coefficients(const Channel& channel, const PotentialSpec& spec, double E, int count);

/// Regular Frobenius solution and its derivative at r0 (normalised so u ~ r^{ν+1/2}).
std::pair<double, double> frobenius_start(const Channel& channel, const PotentialSpec& spec, double E, double r0);

/// Default start radius for a channel, energy and tolerance.
double default_start_radius(const Channel& channel, const PotentialSpec& spec, double E);

/// Integrate the regular solution from the origin to r_end ≥ r_cut.
/// Throws Error{StiffnessFailure} if the step size collapses below 1e-13·r.
RadialSolution integrate_channel(const Channel& channel, const PotentialSpec& spec, double E, double r_end,
                                 const RadialOptions& options = {});

ZeroEnergyCoeffs zero_energy_coefficients(const Channel& channel, const PotentialSpec& spec,
                                          const RadialOptions& options = {}, double r_match = 0.0);

/// Number of negative eigenvalues of the channel operator (Sturm count of the
/// zero-energy regular solution on (0, ∞)). A threshold-singular channel
/// (|a| < tol_a·(|a|+|b|)) gets no exterior zero.
int count_negative_eigenvalues(const Channel& channel, const PotentialSpec& spec, const RadialOptions& options = {},
                               double tol_a = 1e-7);

}  // namespace levscat
