#pragma once

#include <vector>

#include "levscat/channels.hpp"
#include "levscat/radial.hpp"
#include "levscat/threshold.hpp"

namespace levscat {

/// Zeros of J_ν on (0, x_max], located once and reused for every momentum of a curve.
class BesselZeroTable {
 public:
  BesselZeroTable(double nu, double x_max);
  /// Number of zeros of J_ν in (0, x).
  int count_below(double x) const;
  double nu() const { return nu_; }
  double x_max() const { return x_max_; }
  const std::vector<double>& zeros() const { return zeros_; }

 private:
  double nu_;
  double x_max_;
  std::vector<double> zeros_;
};

struct PhaseOptions {
  RadialOptions radial;
  double tol_a = kDefaultTolA;
  /// Ratio between the two momenta used to extrapolate δ(0⁺) in threshold-singular channels.
  double singular_ratio = 1e-2;
  long refine_budget = 1000000;
  double quad_tol = 1e-9;  // Born anchor quadrature
};

/// δ mod π in (-π/2, π/2], from u ∝ √r[cos δ·J_ν(kr) - sin δ·Y_ν(kr)] beyond r_match ≥ r_cut.
double phase_shift_mod_pi(const Channel& channel, const PotentialSpec& spec, double k,
                          const RadialOptions& options = {}, double r_match = 0.0);

/// Absolute phase on the branch that vanishes at high energy: the Prüfer angle of the
/// regular solution minus that of √r·J_ν(kr), each placed by its own node count.
double phase_shift(const Channel& channel, const PotentialSpec& spec, double k, const RadialOptions& options = {},
                   const BesselZeroTable* zeros = nullptr);

/// First Born phase -(π/2)∫ g·w(r) J_ν(kr)² r dr.
double born_phase(const Channel& channel, const PotentialSpec& spec, double k, double rel_tol = 1e-9);

/// Cheap upper bound on |born_phase| from |J_ν(x)| ≤ (x/2)^ν/Γ(ν+1).
double born_bound(const Channel& channel, const PotentialSpec& spec, double k);

/// Momenta k_min·10^{i/per_decade} up to and including k_max.
std::vector<double> geometric_k_grid(double k_min, double k_max, int per_decade);

struct PhaseCurve {
  Channel channel;
  std::vector<double> k_grid;
  std::vector<double> delta;
  double delta0_limit = 0.0;
  double born_anchor_k = 0.0;
  double born_at_anchor = 0.0;
  bool anchor_consistent = true;
  int refinements = 0;
  // Zero-energy data used for the extrapolation.
  double a = 1.0;
  double b = 0.0;
  bool threshold_singular = false;
  int bound_states = 0;
  /// π(N_ν + γ_ν): the per-channel drop predicted by the sum rule.
  double levinson_drop() const;
};

/// Phase curve on k_grid (refined where adjacent samples differ by ≥ π/2) with the
/// threshold limit δ(0⁺). Throws Error{UnresolvedBranch} if refinement exceeds the budget.
PhaseCurve phase_curve(const Channel& channel, const PotentialSpec& spec, const std::vector<double>& k_grid,
                       const PhaseOptions& options = {});

}  // namespace levscat
