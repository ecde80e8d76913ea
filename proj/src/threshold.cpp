#include "levscat/threshold.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "levscat/error.hpp"
#include "levscat/specfun.hpp"

namespace levscat {

std::string_view to_string(ThresholdClass c) noexcept {
  switch (c) {
    case ThresholdClass::Generic: return "generic";
    case ThresholdClass::Resonance: return "resonance";
    case ThresholdClass::Eigenvalue: return "eigenvalue";
  }
  return "generic";
}

double ThresholdReport::resonance_sum() const {
  double sum = 0.0;
  for (const auto& r : resonances) sum += r.sigma * r.mult;
  return sum;
}

bool threshold_singular(const ZeroEnergyCoeffs& z, double tol_a) {
  return std::abs(z.a) < tol_a * (std::abs(z.a) + std::abs(z.b));
}

ThresholdReport classify_threshold(const ChannelSet& channels, const PotentialSpec& spec, double tol_a,
                                   const RadialOptions& options) {
  ThresholdReport report;
  for (const auto& channel : channels.channels) {
    ChannelThreshold record{channel.nu, channel.mult, 1.0, 0.0, ThresholdClass::Generic};
    if (spec.has_short_range()) {
      const auto z = zero_energy_coefficients(channel, spec, options);
      record.a = z.a;
      record.b = z.b;
      if (threshold_singular(z, tol_a))
        record.cls = channel.nu <= 1.0 ? ThresholdClass::Resonance : ThresholdClass::Eigenvalue;
    }
    if (record.cls == ThresholdClass::Eigenvalue) report.N0 += channel.mult;
    if (record.cls == ThresholdClass::Resonance) {
      report.resonances.push_back({channel.nu, channel.mult});
      report.mu_r += channel.mult;
    }
    report.channels.push_back(record);
  }
  std::sort(report.resonances.begin(), report.resonances.end(),
            [](const ResonanceEntry& x, const ResonanceEntry& y) { return x.sigma < y.sigma; });
  return report;
}

double critical_coupling(const Channel& channel, const PotentialSpec& spec, double g_lo, double g_hi,
                         const RadialOptions& options) {
  RadialOptions tight = options;
  tight.rtol = std::min(options.rtol, 1e-13);
  auto a_of = [&](double g) { return zero_energy_coefficients(channel, spec.with_coupling(g), tight).a; };
  const double f_lo = a_of(g_lo), f_hi = a_of(g_hi);
  if (f_lo == 0.0) return g_lo;
  if (f_hi == 0.0) return g_hi;
  if ((f_lo > 0) == (f_hi > 0)) {
    std::ostringstream os;
    os << "a(g) has the same sign at g = " << g_lo << " (" << f_lo << ") and g = " << g_hi << " (" << f_hi << ")";
    throw Error(ErrorKind::NoBracket, os.str());
  }
  auto close_enough = [](double x, double y) { return std::abs(x - y) <= 2e-14 * std::max(std::abs(x), std::abs(y)); };
  std::uintmax_t iterations = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(a_of, g_lo, g_hi, f_lo, f_hi, close_enough, iterations);
  return 0.5 * (lo + hi);
}

double resonance_normalization(const Channel& channel, const PotentialSpec& spec, double tol_a,
                               const RadialOptions& options) {
  if (channel.nu > 1.0 || !spec.has_short_range()) {
    throw Error(ErrorKind::NotResonant, "channel cannot carry a threshold resonance");
  }
  const auto z = zero_energy_coefficients(channel, spec, options);
  if (!threshold_singular(z, tol_a)) {
    std::ostringstream os;
    os << "channel nu = " << channel.nu << " is generic at zero energy (a = " << z.a << ", b = " << z.b << ")";
    throw Error(ErrorKind::NotResonant, os.str());
  }
  return std::sqrt(std::abs(c_nu(channel.nu))) * z.pairing;
}

}  // namespace levscat
