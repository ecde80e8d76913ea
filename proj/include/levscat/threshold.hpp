#pragma once

#include <string_view>
#include <vector>

#include "levscat/channels.hpp"
#include "levscat/radial.hpp"

namespace levscat {

enum class ThresholdClass { Generic, Resonance, Eigenvalue };

std::string_view to_string(ThresholdClass c) noexcept;

struct ChannelThreshold {
  double nu = 0.0;
  int mult = 1;
  double a = 1.0;
  double b = 0.0;
  ThresholdClass cls = ThresholdClass::Generic;
};

struct ResonanceEntry {
  double sigma = 0.0;  // ς_j ∈ (0, 1]
  int mult = 0;        // m_j
};

struct ThresholdReport {
  std::vector<ChannelThreshold> channels;
  int N0 = 0;
  std::vector<ResonanceEntry> resonances;  // ascending in ς
  int mu_r = 0;

  /// Σ ς_j m_j.
  double resonance_sum() const;
  /// N0 + Σ ς_j m_j.
  double j0() const { return N0 + resonance_sum(); }
};

inline constexpr double kDefaultTolA = 1e-7;

/// |a| < tol_a·(|a|+|b|).
bool threshold_singular(const ZeroEnergyCoeffs& z, double tol_a = kDefaultTolA);

ThresholdReport classify_threshold(const ChannelSet& channels, const PotentialSpec& spec, double tol_a = kDefaultTolA,
                                   const RadialOptions& options = {});

/// Coupling g* in [g_lo, g_hi] where the channel's growing coefficient a vanishes.
/// Throws Error{NoBracket} when a has the same sign at both ends.
double critical_coupling(const Channel& channel, const PotentialSpec& spec, double g_lo, double g_hi,
                         const RadialOptions& options = {});

/// |c_ν|^{1/2}·∫₀^∞ g·w·u·r^{ν+1/2} dr for the zero-energy solution u (normalised
/// as r^{ν+1/2} at the origin). Throws Error{NotResonant} unless the channel is a
/// ν ≤ 1 threshold resonance.
double resonance_normalization(const Channel& channel, const PotentialSpec& spec, double tol_a = kDefaultTolA,
                               const RadialOptions& options = {});

}  // namespace levscat
