#pragma once

#include <vector>

#include "levscat/channels.hpp"
#include "levscat/scattering.hpp"
#include "levscat/threshold.hpp"

namespace levscat {

struct SSFOptions {
  double k_min = 1e-3;
  double k_max = 50.0;
  int per_decade = 400;
  double fit_lo = 400.0;        // counterterm window in λ
  double fit_hi = 2500.0;       // also Λ, the top of the Levinson integral
  double lambda_min = 1e-6;
  double born_drop = 1e-6;      // channels whose Born phase stays below this are dropped
  double truncation_limit = 1e-4;
  double tol_a = kDefaultTolA;
  double singular_ratio = 1e-2;  // second momentum for the δ(0⁺) extrapolation, as a fraction of k_min
  double quad_tol = 1e-9;
  RadialOptions radial;
  int threads = 1;
  double tolerance = 0.0;       // Levinson residual budget; 0 picks it from the threshold class

  /// Every tolerance (ODE, quadrature, Born cut, k_min) multiplied by s and the
  /// counterterm window (with Λ = k_max²) divided by s.
  SSFOptions scaled(double s) const;
  static SSFOptions with_tol_scale(double s);
  PhaseOptions phase_options() const;
  std::vector<double> k_grid() const;
};

/// ξ(λ) = (1/π)Σ n_ν δ_ν(√λ) on the grid, with ξ' by three-point differences in ln λ.
struct SSFCurve {
  int n = 3;
  std::vector<double> lambda_grid;
  std::vector<double> xi;
  std::vector<double> xiprime;
  double xi_zero = 0.0;  // (1/π)Σ n_ν δ_ν(0⁺)
  double truncation_bound = 0.0;  // Σ_dropped n_ν·max|born|/π plus the unbuilt tail
  double born_tail = 0.0;         // Born phases of dropped channels added to ξ at the top
  std::vector<PhaseCurve> curves;  // retained channels
  std::vector<Channel> dropped;
};

struct CounterTerms {
  std::vector<int> j;             // 1 … [n/2]+1; the last one is the sentinel
  std::vector<double> exponent;   // n/2 - j - 1
  std::vector<double> c;
  std::vector<double> sigma;
  double constant = 0.0;          // C in ξ ≈ C + Σ c_j ∫λ^{p_j}
  double relative_residual = 0.0;

  /// Smooth part of ξ at λ: the fitted model without the oscillatory remainder.
  double smooth(double lambda) const;
};

struct LevinsonChannel {
  double nu = 0.0;
  int mult = 1;
  double delta_zero = 0.0;
  double delta_top = 0.0;
  double expected_drop = 0.0;  // π(N_ν + γ_ν)
  int bound_states = 0;
  ThresholdClass cls = ThresholdClass::Generic;
};

struct LevinsonReport {
  int n = 3;
  double lhs = 0.0;
  CounterTerms counterterms;
  double beta = 0.0;
  int N_minus = 0;
  int N0 = 0;
  double resonance_sum = 0.0;
  std::vector<ResonanceEntry> resonances;
  double rhs = 0.0;
  double residual = 0.0;
  double xi_top = 0.0;     // raw ξ at the cutoff
  double xi_smooth = 0.0;  // fitted smooth ξ at the cutoff, used for lhs
  double xi_zero = 0.0;
  double truncation_bound = 0.0;
  double extrapolation_error = 0.0;
  double fit_error = 0.0;
  double error_estimate = 0.0;
  double tolerance = 1e-2;
  bool within_tolerance = true;
  double low_energy_exponent = 0.0;
  std::vector<LevinsonChannel> channels;
};

/// Largest ν whose Born bound at k_max still exceeds the drop threshold (ssf truncation).
double born_truncation_nu(const PotentialSpec& spec, const SSFOptions& options);

/// Throws Error{TruncationTooCoarse} if the dropped channels may carry more than options.truncation_limit.
SSFCurve build_ssf(const ChannelSet& channels, const PotentialSpec& spec, const std::vector<double>& lambda_grid,
                   const SSFOptions& options = {});

/// Weighted least squares of ξ' on {λ^{n/2-j-1}}, j = 1 … [n/2]+1, over [lo, hi].
/// Throws Error{PoorFit} if the relative residual exceeds 1e-2.
CounterTerms fit_counterterms(const SSFCurve& curve, double lo, double hi);

/// Heat-coefficient constant of ξ at infinity for even n with difference potential g·w:
/// n = 2: -(1/4π)∫V dx; n = 4: (1/32π²)∫(2vV - V²) dx. Throws Error{OddDimension}.
double beta_heat(const PotentialSpec& spec);

/// Slope of log|ξ'| against log λ on [λ_min, 100·λ_min]; NaN if ξ' vanishes there.
double low_energy_exponent(const SSFCurve& curve, double lambda_lo = 1e-6, double lambda_hi = 1e-4);

/// `curve`, if given, receives the assembled ξ.
LevinsonReport levinson_check(const PotentialSpec& spec, const ChannelSet& channels, const SSFOptions& options = {},
                              SSFCurve* curve = nullptr);
/// Builds the channel set from born_truncation_nu first.
LevinsonReport levinson_check(const PotentialSpec& spec, const SSFOptions& options = {}, SSFCurve* curve = nullptr);

}  // namespace levscat
