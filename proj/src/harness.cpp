#include "levscat/harness.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "levscat/channels.hpp"
#include "levscat/error.hpp"
#include "levscat/greens.hpp"
#include "levscat/parallel.hpp"
#include "levscat/radial.hpp"
#include "levscat/scattering.hpp"
#include "levscat/specfun.hpp"

#ifndef LEVSCAT_VERSION
#define LEVSCAT_VERSION "0.0.0"
#endif

namespace levscat::harness {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::ScenarioError, msg); }

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) fail(std::string("'") + key + "' must be a number");
  return obj.at(key).get<double>();
}

std::vector<double> get_list(const json& obj, const char* key, std::vector<double> fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) fail(std::string("'") + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(std::string("'") + key + "' must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) fail("unknown key '" + it.key() + "' in " + where);
  }
}

std::string utc_now(bool compact) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, compact ? "%Y%m%dT%H%M%S" : "%Y-%m-%dT%H:%M:%S", &tm);
  char out[80];
  std::snprintf(out, sizeof out, compact ? "%s%03lldZ" : "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

std::string header(const Scenario& s, const RunOptions& run) {
  return "# scenario_hash=" + scenario_hash(s) + " tol_scale=" + num(run.tol_scale) + "\n";
}

ChannelSet channels_to(const PotentialSpec& spec, double nu_max) { return build_channels(spec, nu_max); }

}  // namespace

std::string version() { return LEVSCAT_VERSION; }

std::string_view to_string(Task t) noexcept {
  switch (t) {
    case Task::Channels: return "channels";
    case Task::Phases: return "phases";
    case Task::Threshold: return "threshold";
    case Task::GreensCheck: return "greens-check";
    case Task::Levinson: return "levinson";
    case Task::Sweep: return "sweep";
  }
  return "levinson";
}

Task task_from_string(const std::string& s) {
  for (Task t : {Task::Channels, Task::Phases, Task::Threshold, Task::GreensCheck, Task::Levinson, Task::Sweep})
    if (s == to_string(t)) return t;
  fail("unknown task '" + s + "'");
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) fail("scenario must be a JSON object");
  only_keys(doc, {"name", "potential", "task", "params", "tolerances"}, "scenario");
  Scenario s;
  if (!doc.contains("name") || !doc.at("name").is_string()) fail("'name' (string) is required");
  s.name = doc.at("name").get<std::string>();
  if (!std::regex_match(s.name, std::regex("[A-Za-z0-9_.-]+"))) fail("'name' may only use letters, digits, _ . -");
  if (!doc.contains("task") || !doc.at("task").is_string()) fail("'task' (string) is required");
  s.task = task_from_string(doc.at("task").get<std::string>());
  if (!doc.contains("potential") || !doc.at("potential").is_object()) fail("'potential' (object) is required");
  const json& p = doc.at("potential");
  only_keys(p, {"n", "q", "w", "r_cut", "g", "g_critical"}, "potential");
  if (!p.contains("n") || !p.at("n").is_number_integer()) fail("'potential.n' (integer) is required");
  s.spec.n = p.at("n").get<int>();
  s.spec.r_cut = get_number(p, "r_cut", 1.0);
  if (p.contains("q")) {
    const json& q = p.at("q");
    if (!q.is_object()) fail("'potential.q' must be an object");
    only_keys(q, {"constant", "cosine"}, "potential.q");
    if (q.contains("constant") == q.contains("cosine")) fail("'potential.q' needs exactly one of constant, cosine");
    if (q.contains("constant"))
      s.spec.q = AngularTail::constant(get_number(q, "constant", 0.0));
    else
      s.spec.q.cosine = get_list(q, "cosine", {});
  }
  s.spec.w.clear();
  if (p.contains("w")) {
    if (!p.at("w").is_array()) fail("'potential.w' must be a list of segments");
    for (const auto& seg : p.at("w")) {
      if (!seg.is_object()) fail("each segment of 'potential.w' must be an object");
      only_keys(seg, {"r0", "r1", "poly"}, "potential.w segment");
      if (!seg.contains("r0") || !seg.contains("r1") || !seg.contains("poly")) fail("segments need r0, r1 and poly");
      s.spec.w.push_back(Segment{get_number(seg, "r0", 0.0), get_number(seg, "r1", 0.0), get_list(seg, "poly", {})});
    }
  }
  if (p.contains("g") && p.contains("g_critical")) fail("give either 'g' or 'g_critical', not both");
  s.spec.g = get_number(p, "g", 0.0);
  if (p.contains("g_critical")) {
    const json& c = p.at("g_critical");
    if (!c.is_object()) fail("'g_critical' must be an object");
    only_keys(c, {"channel", "bracket", "factor"}, "g_critical");
    CriticalCoupling cc;
    if (c.contains("channel") && !c.at("channel").is_number_integer()) fail("'g_critical.channel' must be an integer");
    cc.channel = c.value("channel", 0);
    const auto bracket = get_list(c, "bracket", {});
    if (bracket.size() != 2) fail("'g_critical.bracket' must be [lo, hi]");
    cc.lo = bracket[0];
    cc.hi = bracket[1];
    cc.factor = get_number(c, "factor", 1.0);
    s.g_critical = cc;
  }
  if (doc.contains("params")) {
    if (!doc.at("params").is_object()) fail("'params' must be an object");
    s.params = doc.at("params");
  }
  if (doc.contains("tolerances")) {
    if (!doc.at("tolerances").is_object()) fail("'tolerances' must be an object");
    s.tolerances = doc.at("tolerances");
    only_keys(s.tolerances, {"residual", "jump", "greens", "rtol", "quad_tol", "born_drop", "tol_a"}, "tolerances");
    for (auto it = s.tolerances.begin(); it != s.tolerances.end(); ++it)
      if (!it->is_number() || !(it->get<double>() > 0.0)) fail("tolerance '" + it.key() + "' must be a positive number");
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json p;
  p["n"] = s.spec.n;
  p["r_cut"] = s.spec.r_cut;
  if (s.spec.q.cosine.size() == 1)
    p["q"] = {{"constant", s.spec.q.cosine[0]}};
  else
    p["q"] = {{"cosine", s.spec.q.cosine}};
  json w = json::array();
  for (const auto& seg : s.spec.w) w.push_back({{"r0", seg.r_begin}, {"r1", seg.r_end}, {"poly", seg.poly}});
  p["w"] = w;
  if (s.g_critical) {
    const auto& c = *s.g_critical;
    p["g_critical"] = {{"channel", c.channel}, {"bracket", {c.lo, c.hi}}, {"factor", c.factor}};
  } else {
    p["g"] = s.spec.g;
  }
  return json{{"name", s.name},
              {"potential", p},
              {"task", std::string(to_string(s.task))},
              {"params", s.params},
              {"tolerances", s.tolerances}};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail("'" + path + "' is not valid JSON: " + e.what());
  }
  return scenario_from_json(doc);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string scenario_hash(const Scenario& s) { return sha256_hex(scenario_to_json(s).dump()); }

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> diag = s.spec.structural_problems();
  for (const auto& seg : s.spec.w)
    if (seg.poly.empty()) diag.push_back("segment with an empty polynomial");
  if (diag.empty()) {
    try {
      channels_to(s.spec, 1.0);
    } catch (const Error& e) {
      diag.push_back(e.what());
    }
  }
  if (s.g_critical) {
    const auto& c = *s.g_critical;
    if (c.channel < 0) diag.push_back("g_critical.channel must be >= 0");
    if (!(c.lo < c.hi)) diag.push_back("g_critical.bracket must satisfy lo < hi");
    if (!(c.factor > 0.0)) diag.push_back("g_critical.factor must be positive");
  }
  const json& p = s.params;
  try {
    auto positive = [&](const char* key) {
      if (p.contains(key) && !(get_number(p, key, 1.0) > 0.0)) diag.push_back(std::string("params.") + key + " must be positive");
    };
    for (const char* key : {"nu_max", "k_min", "k_max", "per_decade", "born_drop", "points"}) positive(key);
    if (get_number(p, "k_min", 1e-3) >= get_number(p, "k_max", 50.0)) diag.push_back("params.k_min must be below k_max");
    const auto window = get_list(p, "fit_window", {400.0, 2500.0});
    if (window.size() != 2 || !(window[0] >= 25.0) || !(window[0] < window[1]))
      diag.push_back("params.fit_window must be [lo, hi] with 25 <= lo < hi");
    const auto range = get_list(p, "range", {0.8, 1.2});
    if (range.size() != 2 || !(range[0] > 0.0) || !(range[0] < 1.0) || !(range[1] > 1.0))
      diag.push_back("params.range must be [lo, hi] with 0 < lo < 1 < hi");
    const double points = get_number(p, "points", 41);
    if (points < 5 || std::fmod(points, 2.0) != 1.0) diag.push_back("params.points must be an odd integer >= 5");
    if (s.task == Task::GreensCheck)
      for (double nu : get_list(p, "nu", {0.3, 0.5, 0.7}))
        if (!(nu > 0.0 && nu < 1.0)) diag.push_back("params.nu entries must lie in (0, 1)");
  } catch (const Error& e) {
    diag.push_back(e.what());
  }
  return diag;
}

double resolve_coupling(const Scenario& s) {
  if (!s.g_critical) return s.spec.g;
  const auto& c = *s.g_critical;
  const PotentialSpec probe = s.spec.with_coupling(0.5 * (c.lo + c.hi));
  double nu_max = 2.0;
  ChannelSet set = build_channels(probe, nu_max);
  while (int(set.channels.size()) <= c.channel && nu_max < 1e3) set = build_channels(probe, nu_max *= 2.0);
  if (int(set.channels.size()) <= c.channel) fail("g_critical.channel out of range");
  const double g_star = critical_coupling(set.channels[std::size_t(c.channel)], probe, c.lo, c.hi);
  return c.factor == 1.0 ? g_star : c.factor * g_star;
}

SSFOptions ssf_options(const Scenario& s, const RunOptions& run) {
  SSFOptions o;
  const json& p = s.params;
  o.k_min = get_number(p, "k_min", o.k_min);
  o.per_decade = int(get_number(p, "per_decade", o.per_decade));
  const auto window = get_list(p, "fit_window", {o.fit_lo, o.fit_hi});
  if (window.size() != 2) fail("params.fit_window must be [lo, hi]");
  o.fit_lo = window[0];
  o.fit_hi = window[1];
  o.k_max = std::sqrt(o.fit_hi);
  o.born_drop = get_number(p, "born_drop", o.born_drop);
  const json& t = s.tolerances;
  o.radial.rtol = get_number(t, "rtol", o.radial.rtol);
  o.quad_tol = get_number(t, "quad_tol", o.quad_tol);
  o.born_drop = get_number(t, "born_drop", o.born_drop);
  o.tol_a = get_number(t, "tol_a", o.tol_a);
  o.tolerance = get_number(t, "residual", 0.0);
  o.threads = run.threads;
  return o.scaled(run.tol_scale);
}

json to_json(const LevinsonReport& r) {
  json ct = json::array();
  for (std::size_t j = 0; j < r.counterterms.c.size(); ++j)
    ct.push_back({{"j", r.counterterms.j[j]},
                  {"exponent", r.counterterms.exponent[j]},
                  {"c", r.counterterms.c[j]},
                  {"sigma", r.counterterms.sigma[j]}});
  json res = json::array();
  for (const auto& e : r.resonances) res.push_back({{"sigma", e.sigma}, {"mult", e.mult}});
  json ch = json::array();
  for (const auto& c : r.channels)
    ch.push_back({{"nu", c.nu},
                  {"mult", c.mult},
                  {"delta_zero", c.delta_zero},
                  {"delta_top", c.delta_top},
                  {"expected_drop", c.expected_drop},
                  {"bound_states", c.bound_states},
                  {"class", std::string(to_string(c.cls))}});
  auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  return json{{"n", r.n},
              {"lhs", r.lhs},
              {"rhs", r.rhs},
              {"residual", r.residual},
              {"beta", r.beta},
              {"N_minus", r.N_minus},
              {"N0", r.N0},
              {"resonance_sum", r.resonance_sum},
              {"resonances", res},
              {"counterterms", ct},
              {"fit_relative_residual", r.counterterms.relative_residual},
              {"xi_top", r.xi_top},
              {"xi_smooth", r.xi_smooth},
              {"xi_zero", r.xi_zero},
              {"error_budget",
               {{"truncation", r.truncation_bound},
                {"extrapolation", r.extrapolation_error},
                {"fit", r.fit_error},
                {"total", r.error_estimate}}},
              {"tolerance", r.tolerance},
              {"within_tolerance", r.within_tolerance},
              {"low_energy_exponent", finite(r.low_energy_exponent)},
              {"channels", ch}};
}

json to_json(const ThresholdReport& r) {
  json ch = json::array();
  for (const auto& c : r.channels)
    ch.push_back({{"nu", c.nu}, {"mult", c.mult}, {"a", c.a}, {"b", c.b}, {"class", std::string(to_string(c.cls))}});
  json res = json::array();
  for (const auto& e : r.resonances) res.push_back({{"sigma", e.sigma}, {"mult", e.mult}});
  return json{{"channels", ch},
              {"N0", r.N0},
              {"resonances", res},
              {"mu_r", r.mu_r},
              {"resonance_sum", r.resonance_sum()},
              {"J0", r.j0()}};
}

SweepResult sweep(const Scenario& s, const RunOptions& run) {
  const json& p = s.params;
  const auto range = get_list(p, "range", {0.8, 1.2});
  const int points = int(get_number(p, "points", 41));
  if (range.size() != 2 || points < 5 || points % 2 == 0) fail("sweep needs range [lo, hi] and an odd point count");
  SweepResult out;
  out.g_star = resolve_coupling(s);
  out.center = std::size_t(points / 2);
  const SSFOptions opts = ssf_options(s, run);
  for (int i = 0; i < points; ++i) {
    SweepPoint pt;
    pt.factor = std::size_t(i) == out.center ? 1.0 : range[0] + (range[1] - range[0]) * i / (points - 1);
    pt.g = std::size_t(i) == out.center ? out.g_star : pt.factor * out.g_star;
    pt.report = levinson_check(s.spec.with_coupling(pt.g), opts);
    out.points.push_back(std::move(pt));
  }
  auto y = [&](std::size_t i) { return out.points[i].report.lhs - out.points[i].report.beta; };
  const std::size_t c = out.center;
  const double g1 = out.points[c - 1].g, g2 = out.points[c - 2].g;
  out.left_limit = y(c - 1) + (y(c - 1) - y(c - 2)) * (out.g_star - g1) / (g1 - g2);
  out.at_center = y(c);
  out.jump = out.left_limit - out.at_center;
  const auto& rc = out.points[c].report;
  out.expected_jump = rc.N0 + rc.resonance_sum;
  bool nu_one = false;
  for (const auto& r : rc.resonances) nu_one = nu_one || std::abs(r.sigma - 1.0) < 1e-9;
  out.tolerance = get_number(s.tolerances, "jump", nu_one ? 5e-2 : 2e-2);
  return out;
}

TaskResult execute(const Scenario& s, const RunOptions& run) {
  TaskResult result;
  const std::string head = header(s, run);
  try {
    PotentialSpec spec = s.spec;
    spec.g = resolve_coupling(s);
    result.summary["g"] = spec.g;
    const json& p = s.params;
    switch (s.task) {
      case Task::Channels: {
        const auto set = build_channels(spec, get_number(p, "nu_max", 10.0));
        std::string csv = head + "index,lambda,nu,mult\n";
        for (std::size_t i = 0; i < set.channels.size(); ++i) {
          const auto& c = set.channels[i];
          csv += std::to_string(i) + "," + num(c.lambda_nu) + "," + num(c.nu) + "," + std::to_string(c.mult) + "\n";
        }
        result.files.push_back({"channels.csv", csv});
        result.summary["channels"] = set.channels.size();
        break;
      }
      case Task::Phases: {
        const auto set = build_channels(spec, get_number(p, "nu_max", 5.0));
        SSFOptions o = ssf_options(s, run);
        const auto grid = geometric_k_grid(get_number(p, "k_min", 1e-3) * run.tol_scale, get_number(p, "k_max", 50.0),
                                           int(get_number(p, "per_decade", 20)));
        const auto curves = parallel_map<PhaseCurve>(set.channels.size(), run.threads, [&](std::size_t i) {
          return phase_curve(set.channels[i], spec, grid, o.phase_options());
        });
        std::string csv = head + "nu,mult,k,delta,born\n";
        json limits = json::array();
        for (const auto& pc : curves) {
          for (std::size_t i = 0; i < pc.k_grid.size(); ++i)
            csv += num(pc.channel.nu) + "," + std::to_string(pc.channel.mult) + "," + num(pc.k_grid[i]) + "," +
                   num(pc.delta[i]) + "," + num(born_phase(pc.channel, spec, pc.k_grid[i], o.quad_tol)) + "\n";
          limits.push_back({{"nu", pc.channel.nu},
                            {"delta_zero", pc.delta0_limit},
                            {"expected_drop", pc.levinson_drop()},
                            {"bound_states", pc.bound_states},
                            {"threshold_singular", pc.threshold_singular},
                            {"anchor_consistent", pc.anchor_consistent}});
        }
        result.files.push_back({"phases.csv", csv});
        result.summary["limits"] = limits;
        result.files.push_back({"phases.json", result.summary.dump(2) + "\n"});
        break;
      }
      case Task::Threshold: {
        const auto set = build_channels(spec, get_number(p, "nu_max", 5.0));
        SSFOptions o = ssf_options(s, run);
        const auto rep = classify_threshold(set, spec, o.tol_a, o.radial);
        json doc = to_json(rep);
        int n_minus = 0;
        for (const auto& c : set.channels) n_minus += c.mult * count_negative_eigenvalues(c, spec, o.radial, o.tol_a);
        doc["N_minus"] = n_minus;
        doc["g"] = spec.g;
        result.summary = doc;
        result.files.push_back({"threshold.json", doc.dump(2) + "\n"});
        break;
      }
      case Task::GreensCheck: {
        const double tol = get_number(s.tolerances, "greens", 1e-3);
        const auto nus = get_list(p, "nu", {0.3, 0.5, 0.7});
        const auto rs = get_list(p, "r", {0.5, 1.0, 2.0});
        const auto taus = get_list(p, "tau", {0.5, 1.0, 2.0});
        const double zmin = default_z_moduli().back();
        const int n = spec.n;
        std::string csv = head + "kind,nu,r,tau,abs_z,extracted_re,extracted_im,target_re,target_im,relerr\n";
        double worst = 0.0;
        for (double nu : nus)
          for (double r : rs)
            for (double t : taus) {
              const auto e = extract_gnu0(Channel{0.0, nu, 1}, n, r, t);
              const auto target = c_nu(nu) * std::pow(r * t, -0.5 * (n - 2) + nu);
              const double rel = std::abs(e.value - target) / std::abs(target);
              worst = std::max(worst, rel);
              csv += "gnu0," + num(nu) + "," + num(r) + "," + num(t) + "," + num(zmin) + "," + num(e.value.real()) + "," +
                     num(e.value.imag()) + "," + num(target.real()) + "," + num(target.imag()) + "," + num(rel) + "\n";
            }
        for (double r : rs)
          for (double t : taus) {
            const auto f = extract_g11(n, r, t);
            const double target = -0.125 * std::pow(r * t, -0.5 * (n - 2) + 1.0);
            const double rel = std::abs(f.alpha - target) / std::abs(target);
            worst = std::max(worst, rel);
            csv += "g11,1," + num(r) + "," + num(t) + "," + num(zmin) + "," + num(f.alpha) + ",0," + num(target) + ",0," +
                   num(rel) + "\n";
          }
        result.files.push_back({"greens.csv", csv});
        result.summary["worst_relerr"] = worst;
        result.summary["tolerance"] = tol;
        result.over_budget = worst > tol;
        break;
      }
      case Task::Levinson: {
        SSFCurve curve;
        const auto rep = levinson_check(spec, ssf_options(s, run), &curve);
        json doc = to_json(rep);
        doc["g"] = spec.g;
        doc["scenario_hash"] = scenario_hash(s);
        result.summary = doc;
        result.over_budget = !rep.within_tolerance;
        result.files.push_back({"report.json", doc.dump(2) + "\n"});
        std::string xi = head + "lambda,xi,xiprime\n";
        for (std::size_t i = 0; i < curve.lambda_grid.size(); ++i)
          xi += num(curve.lambda_grid[i]) + "," + num(curve.xi[i]) + "," + num(curve.xiprime[i]) + "\n";
        result.files.push_back({"xi.csv", xi});
        std::string row = head + "name,g,lhs,rhs,residual,beta,N_minus,N0,resonance_sum,error_estimate,tolerance,within\n";
        row += s.name + "," + num(spec.g) + "," + num(rep.lhs) + "," + num(rep.rhs) + "," + num(rep.residual) + "," +
               num(rep.beta) + "," + std::to_string(rep.N_minus) + "," + std::to_string(rep.N0) + "," +
               num(rep.resonance_sum) + "," + num(rep.error_estimate) + "," + num(rep.tolerance) + "," +
               (rep.within_tolerance ? "1" : "0") + "\n";
        result.files.push_back({"levinson.csv", row});
        break;
      }
      case Task::Sweep: {
        const auto sw = sweep(s, run);
        std::string csv = head + "factor,g,lhs,rhs,residual,beta,lhs_minus_beta,N_minus,N0,resonance_sum,within\n";
        for (const auto& pt : sw.points) {
          const auto& r = pt.report;
          csv += num(pt.factor) + "," + num(pt.g) + "," + num(r.lhs) + "," + num(r.rhs) + "," + num(r.residual) + "," +
                 num(r.beta) + "," + num(r.lhs - r.beta) + "," + std::to_string(r.N_minus) + "," + std::to_string(r.N0) +
                 "," + num(r.resonance_sum) + "," + (r.within_tolerance ? "1" : "0") + "\n";
        }
        result.files.push_back({"sweep.csv", csv});
        json doc{{"g_star", sw.g_star},
                 {"left_limit", sw.left_limit},
                 {"at_center", sw.at_center},
                 {"jump", sw.jump},
                 {"expected_jump", sw.expected_jump},
                 {"jump_error", sw.jump - sw.expected_jump},
                 {"tolerance", sw.tolerance},
                 {"center_report", to_json(sw.points[sw.center].report)}};
        result.over_budget = std::abs(sw.jump - sw.expected_jump) > sw.tolerance;
        result.summary = doc;
        result.files.push_back({"jump.json", doc.dump(2) + "\n"});
        break;
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ScenarioError) throw;
    throw Error(e.kind(), "scenario '" + s.name + "' (" + std::string(to_string(s.task)) + "): " + e.what());
  }
  return result;
}

json RunRecord::to_json() const {
  return json{{"directory", directory},     {"scenario_hash", scenario_hash},
              {"version", version},         {"started", started},
              {"finished", finished},       {"status", over_budget ? "residual-over-budget" : "ok"},
              {"manifest", manifest},       {"summary", summary}};
}

RunRecord run(const Scenario& s, const RunOptions& options) {
  RunRecord rec;
  rec.version = version();
  rec.scenario_hash = scenario_hash(s);
  rec.started = utc_now(false);
  const TaskResult result = execute(s, options);
  rec.finished = utc_now(false);
  rec.over_budget = result.over_budget;
  rec.summary = result.summary;

  const fs::path base = fs::path(options.out_dir) / s.name;
  fs::create_directories(base);
  const std::string stem = utc_now(true) + "-" + rec.scenario_hash.substr(0, 8);
  fs::path dir = base / stem;
  for (int k = 1; !fs::create_directory(dir); ++k) dir = base / (stem + "-" + std::to_string(k));
  rec.directory = dir.string();

  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary);
    out << content;
    if (!out) fail("cannot write " + (dir / name).string());
    rec.manifest.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  };
  write("scenario.json", scenario_to_json(s).dump(2) + "\n");
  for (const auto& f : result.files) write(f.name, f.content);
  json record = rec.to_json();
  record["tol_scale"] = options.tol_scale;
  record["threads"] = options.threads;
  record["task"] = std::string(to_string(s.task));
  {
    std::ofstream out(dir / "record.json");
    out << record.dump(2) << "\n";
  }

  // Append-only ledger, one JSON line per run, under an exclusive lock.
  const fs::path ledger = fs::path(options.out_dir) / "ledger.jsonl";
  const int fd = ::open(ledger.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) fail("cannot open ledger " + ledger.string());
  ::flock(fd, LOCK_EX);
  json line{{"name", s.name},          {"task", std::string(to_string(s.task))},
            {"directory", rec.directory}, {"scenario_hash", rec.scenario_hash},
            {"version", rec.version},    {"started", rec.started},
            {"finished", rec.finished},  {"status", rec.over_budget ? "residual-over-budget" : "ok"},
            {"tol_scale", options.tol_scale}};
  const std::string text = line.dump() + "\n";
  const ssize_t written = ::write(fd, text.data(), text.size());
  ::flock(fd, LOCK_UN);
  ::close(fd);
  if (written != ssize_t(text.size())) fail("short write to ledger");
  return rec;
}

}  // namespace levscat::harness
