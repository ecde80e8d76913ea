#pragma once

#include <complex>

namespace levscat {

/// Largest Bessel order accepted by bessel_jy.
inline constexpr double kMaxBesselOrder = 200.0;
/// Upper end of the (open) argument interval accepted by bessel_jy.
inline constexpr double kMaxBesselArgument = 1.0e4;

/// J_ν(x), Y_ν(x) and their x-derivatives.
struct BesselPair {
  double j = 0.0;
  double y = 0.0;
  double jprime = 0.0;
  double yprime = 0.0;
};

/// Same quantities with an exponent split off so that deep in the
/// "x ≪ ν" region neither overflows: J = j·e^{-log_scale}, Y = y·e^{+log_scale}.
struct ScaledBesselPair {
  double j = 0.0;
  double y = 0.0;
  double jprime = 0.0;
  double yprime = 0.0;
  double log_scale = 0.0;

  BesselPair unscaled() const;
};

/// Bessel functions of real order ν ∈ [0, kMaxBesselOrder] and argument
/// x ∈ (0, kMaxBesselArgument). Temme's series below x = 2, Steed's complex
/// continued fraction above, Wronskian closure in both cases.
/// Throws Error{DomainError} outside the box.
BesselPair bessel_jy(double nu, double x);
ScaledBesselPair bessel_jy_scaled(double nu, double x);

/// Γ(x) (Lanczos, g = 7) with reflection for x < 1/2. Throws Error{PoleError}
/// at non-positive integers.
double gamma_fn(double x);

/// 1/Γ(1+x) from its Maclaurin series; accurate for |x| ≤ 1/2.
double rgamma1p_series(double x);

/// Coefficient of the first singular term of the channel resolvent at zero,
/// c_ν = -e^{-iπν} Γ(1-ν) / (ν 2^{2ν+1} Γ(1+ν)) for 0 < ν < 1 and c_1 = -1/8.
std::complex<double> c_nu(double nu);

/// Modified Bessel functions of real order ν ≥ 0 for Re z > 0.
/// I_ν by its ascending series (intended for |z| ≲ 30), K_ν by the
/// trapezoidal rule on K_ν(z) = ∫₀^∞ exp(-z cosh t) cosh(νt) dt.
std::complex<double> bessel_i(double nu, std::complex<double> z);
std::complex<double> bessel_k(double nu, std::complex<double> z);

}  // namespace levscat
