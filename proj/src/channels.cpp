#include "levscat/channels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "levscat/error.hpp"

namespace levscat {
namespace {

constexpr double kMergeGap = 1e-8;
constexpr double kHillTolerance = 1e-10;

long long binomial(long long n, long long k) {
  if (k < 0 || n < k) return 0;
  k = std::min(k, n - k);
  long long result = 1;
  for (long long i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

[[noreturn]] void positivity_violation(int n, double lambda) {
  std::ostringstream os;
  os << "lowest angular eigenvalue " << lambda << " is not above -(n-2)^2/4 = " << -0.25 * (n - 2) * (n - 2);
  throw Error(ErrorKind::PositivityViolation, os.str());
}

std::vector<double> converged_hill_spectrum(const AngularTail& q, double lambda_max) {
  const int order = int(q.cosine.size()) - 1;
  int cutoff = std::max(16, int(std::ceil(std::sqrt(std::max(lambda_max, 0.0) + 1.0))) + 2 * order + 8);
  std::vector<double> previous = hill_eigenvalues(q, cutoff);
  for (int attempt = 0; attempt < 12; ++attempt) {
    const int next_cutoff = 2 * cutoff;
    std::vector<double> current = hill_eigenvalues(q, next_cutoff);
    bool converged = true;
    for (std::size_t i = 0; i < previous.size() && previous[i] <= lambda_max + 1.0; ++i) {
      if (std::abs(current[i] - previous[i]) > kHillTolerance * std::max(1.0, std::abs(current[i]))) {
        converged = false;
        break;
      }
    }
    if (converged) return current;
    previous = std::move(current);
    cutoff = next_cutoff;
  }
  throw Error(ErrorKind::NoConvergence, "Fourier matrix eigenvalues did not converge");
}

}  // namespace

long long sphere_multiplicity(int n, int ell) {
  if (ell == 0) return 1;
  if (n == 2) return 2;
  return (2LL * ell + n - 2) * binomial(ell + n - 3, ell - 1) / ell;
}

std::vector<double> hill_eigenvalues(const AngularTail& q, int cutoff) {
  const int size = 2 * cutoff + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    const int m = i - cutoff;
    h(i, i) = double(m) * m + q.mean();
    for (std::size_t k = 1; k < q.cosine.size(); ++k) {
      const int j = i + int(k);
      if (j < size) {
        h(i, j) += 0.5 * q.cosine[k];
        h(j, i) += 0.5 * q.cosine[k];
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

ChannelSet build_channels(const PotentialSpec& spec, double nu_max) {
  if (!spec.q.is_constant() && spec.n != 2)
    throw Error(ErrorKind::UnsupportedAngular, "non-constant angular tail requires n = 2");
  spec.check();
  if (!(nu_max > 0.0)) throw Error(ErrorKind::InvalidSpec, "nu_max must be positive");

  const double shift = 0.25 * (spec.n - 2) * (spec.n - 2);
  const double lambda_max = nu_max * nu_max - shift;

  // Eigenvalues with multiplicity, ascending.
  std::vector<std::pair<double, long long>> raw;
  if (spec.q.is_constant()) {
    const double q0 = spec.q.mean();
    if (q0 <= -shift) positivity_violation(spec.n, q0);
    for (int ell = 0;; ++ell) {
      const double lambda = double(ell) * (ell + spec.n - 2) + q0;
      if (lambda > lambda_max) break;
      raw.emplace_back(lambda, sphere_multiplicity(spec.n, ell));
    }
  } else {
    const auto values = converged_hill_spectrum(spec.q, lambda_max);
    if (values.front() <= -shift) positivity_violation(spec.n, values.front());
    for (double lambda : values) {
      if (lambda > lambda_max) break;
      raw.emplace_back(lambda, 1);
    }
  }

  ChannelSet set;
  set.truncation_nu_max = nu_max;
  for (std::size_t i = 0; i < raw.size();) {
    double lambda_sum = 0.0;
    long long mult = 0;
    std::size_t j = i;
    for (; j < raw.size() && raw[j].first - raw[i].first < kMergeGap; ++j) {
      lambda_sum += raw[j].first * raw[j].second;
      mult += raw[j].second;
    }
    Channel c;
    c.lambda_nu = j - i == 1 ? raw[i].first : lambda_sum / double(mult);
    c.nu = std::sqrt(c.lambda_nu + shift);
    c.mult = int(mult);
    set.channels.push_back(c);
    if (c.nu <= 1.0) set.sigma1.push_back(c);
    i = j;
  }
  return set;
}

}  // namespace levscat
