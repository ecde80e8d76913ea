#include "levscat/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levscat/error.hpp"

namespace levscat {

bool AngularTail::is_constant() const {
  return std::all_of(cosine.begin() + std::min<std::size_t>(1, cosine.size()), cosine.end(),
                     [](double c) { return c == 0.0; });
}

double AngularTail::operator()(double theta) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < cosine.size(); ++k) sum += cosine[k] * std::cos(double(k) * theta);
  return sum;
}

double Segment::operator()(double r) const {
  double value = 0.0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) value = value * r + *it;
  return value;
}

PotentialSpec PotentialSpec::square_well(int n, double q0, double depth, double radius) {
  PotentialSpec spec;
  spec.n = n;
  spec.q = AngularTail::constant(q0);
  spec.w = {Segment{0.0, radius, {-1.0}}};
  spec.r_cut = radius;
  spec.g = depth;
  return spec;
}

PotentialSpec PotentialSpec::free(int n, double q0, double radius) {
  PotentialSpec spec = square_well(n, q0, 0.0, radius);
  return spec;
}

double PotentialSpec::profile(double r) const {
  if (r >= r_cut) return 0.0;
  for (const auto& seg : w)
    if (r >= seg.r_begin && r < seg.r_end) return seg(r);
  return 0.0;
}

std::vector<double> PotentialSpec::breakpoints() const {
  std::vector<double> points;
  for (const auto& seg : w) {
    if (seg.r_begin > 0.0 && seg.r_begin < r_cut) points.push_back(seg.r_begin);
    if (seg.r_end > 0.0 && seg.r_end < r_cut) points.push_back(seg.r_end);
  }
  points.push_back(r_cut);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

double PotentialSpec::max_abs_coupled() const {
  double bound = 0.0;
  for (const auto& seg : w) {
    // |Σ pᵢ rⁱ| ≤ Σ |pᵢ| max(|r_begin|,|r_end|)ⁱ
    const double rmax = std::max(std::abs(seg.r_begin), std::abs(seg.r_end));
    double sum = 0.0, power = 1.0;
    for (double c : seg.poly) {
      sum += std::abs(c) * power;
      power *= rmax;
    }
    bound = std::max(bound, sum);
  }
  return std::abs(g) * bound;
}

std::vector<double> PotentialSpec::coupled_taylor_at_origin() const {
  for (const auto& seg : w) {
    if (seg.r_begin == 0.0 && seg.r_end > 0.0) {
      std::vector<double> coeffs = seg.poly;
      for (double& c : coeffs) c *= g;
      return coeffs;
    }
  }
  return {};
}

double PotentialSpec::first_piece_end() const {
  double end = r_cut;
  for (const auto& seg : w) {
    if (seg.r_begin == 0.0) return std::min(seg.r_end, r_cut);
    end = std::min(end, seg.r_begin);
  }
  return end;
}

bool PotentialSpec::has_short_range() const {
  if (g == 0.0) return false;
  return std::any_of(w.begin(), w.end(), [](const Segment& s) {
    return std::any_of(s.poly.begin(), s.poly.end(), [](double c) { return c != 0.0; });
  });
}

std::vector<std::string> PotentialSpec::structural_problems() const {
  std::vector<std::string> problems;
  if (n < 2) problems.push_back("dimension n must be >= 2");
  if (!(r_cut > 0.0) || !std::isfinite(r_cut)) problems.push_back("r_cut must be positive and finite");
  if (q.cosine.empty()) problems.push_back("angular tail has no coefficients");
  if (!q.is_constant() && n != 2)
    problems.push_back("non-constant angular tail is only supported for n = 2");
  if (!std::isfinite(g)) problems.push_back("coupling g is not finite");
  std::vector<Segment> sorted = w;
  std::sort(sorted.begin(), sorted.end(),
            [](const Segment& a, const Segment& b) { return a.r_begin < b.r_begin; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& seg = sorted[i];
    std::ostringstream where;
    where << "segment [" << seg.r_begin << ", " << seg.r_end << ")";
    if (!(seg.r_begin >= 0.0) || !(seg.r_end > seg.r_begin))
      problems.push_back(where.str() + " is empty or starts below 0");
    if (seg.r_end > r_cut) problems.push_back(where.str() + " extends beyond r_cut");
    if (i > 0 && seg.r_begin < sorted[i - 1].r_end) problems.push_back(where.str() + " overlaps its neighbour");
    for (double c : seg.poly)
      if (!std::isfinite(c)) problems.push_back(where.str() + " has a non-finite coefficient");
  }
  return problems;
}

void PotentialSpec::check() const {
  const auto problems = structural_problems();
  if (problems.empty()) return;
  std::string message;
  for (const auto& p : problems) message += (message.empty() ? "" : "; ") + p;
  throw Error(ErrorKind::InvalidSpec, message);
}

}  // namespace levscat
