#pragma once

#include <string>
#include <vector>

namespace levscat {

/// Angular tail q(θ) of the critical-decay potential q(θ)/r².
///
/// A single coefficient means q ≡ q0 (any dimension). Longer vectors are the
/// cosine coefficients of an even trigonometric polynomial on S¹,
/// q(θ) = Σ_k c_k cos(kθ), and are only meaningful for n = 2.
struct AngularTail {
  std::vector<double> cosine{0.0};

  static AngularTail constant(double q0) { return AngularTail{{q0}}; }

  bool is_constant() const;
  /// Angular mean of q over the sphere.
  double mean() const { return cosine.empty() ? 0.0 : cosine.front(); }
  double operator()(double theta) const;
};

/// One polynomial piece of the short-range profile: w(r) = Σ_i poly[i] rⁱ
/// for r in [r_begin, r_end).
struct Segment {
  double r_begin = 0.0;
  double r_end = 0.0;
  std::vector<double> poly;

  double operator()(double r) const;
};

/// v = q(θ)/r² + g·w(r) on ℝⁿ, with w compactly supported in [0, r_cut].
struct PotentialSpec {
  int n = 3;
  AngularTail q;
  std::vector<Segment> w;
  double r_cut = 1.0;
  double g = 0.0;

  /// Square well w = -1 on [0, radius]; g is the depth.
  static PotentialSpec square_well(int n, double q0, double depth, double radius = 1.0);
  static PotentialSpec free(int n, double q0, double radius = 1.0);

  double profile(double r) const;
  double coupled(double r) const { return g * profile(r); }

  /// Sorted radii in (0, r_cut] where w may be discontinuous, always ending at r_cut.
  std::vector<double> breakpoints() const;
  /// Upper bound of |g·w| on [0, r_cut].
  double max_abs_coupled() const;
  /// Taylor coefficients of g·w at the origin (the polynomial of the piece covering r = 0).
  std::vector<double> coupled_taylor_at_origin() const;
  /// Outer radius of the piece that starts at the origin (r_cut if w vanishes near 0).
  double first_piece_end() const;
  bool has_short_range() const;

  /// Structural problems (support beyond r_cut, overlaps, bad dimension);
  /// empty when the spec is usable. Positivity is checked by build_channels.
  std::vector<std::string> structural_problems() const;
  /// Throws Error{InvalidSpec} listing structural_problems().
  void check() const;

  PotentialSpec with_coupling(double coupling) const {
    PotentialSpec copy = *this;
    copy.g = coupling;
    return copy;
  }
};

}  // namespace levscat
