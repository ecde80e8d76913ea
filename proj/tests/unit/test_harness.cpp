#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "levscat/error.hpp"
#include "levscat/harness.hpp"

using namespace levscat;
using namespace levscat::harness;
namespace fs = std::filesystem;

namespace {

Scenario parse(const std::string& text) { return scenario_from_json(json::parse(text)); }

bool mentions(const std::vector<std::string>& diag, const std::string& needle) {
  for (const auto& d : diag)
    if (d.find(needle) != std::string::npos) return true;
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("levscat_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

const char* kFree = R"({"name":"free3","potential":{"n":3,"r_cut":1,"g":0,
  "w":[{"r0":0,"r1":1,"poly":[-1]}]},"task":"channels","params":{"nu_max":4}})";

}  // namespace

TEST_CASE("scenario round-trips through JSON") {
  const auto s = parse(R"({"name":"rt","potential":{"n":2,"q":{"cosine":[0.3,0.1,0.05]},
    "w":[{"r0":0,"r1":0.5,"poly":[-1,0.25]},{"r0":0.5,"r1":1.5,"poly":[0.1]}],"r_cut":1.5,
    "g_critical":{"channel":1,"bracket":[0.5,2.5],"factor":0.95}},"task":"sweep",
    "params":{"range":[0.9,1.1],"points":5},"tolerances":{"jump":0.03}})");
  const auto again = scenario_from_json(json::parse(scenario_to_json(s).dump()));
  CHECK(scenario_to_json(again) == scenario_to_json(s));
  CHECK(scenario_hash(again) == scenario_hash(s));
  REQUIRE(again.g_critical);
  CHECK(again.g_critical->factor == 0.95);
  CHECK(again.spec.w.size() == 2);
  CHECK(again.spec.q.cosine == std::vector<double>{0.3, 0.1, 0.05});
  CHECK(again.task == Task::Sweep);

  auto s2 = s;
  s2.spec.w[0].poly[1] = 0.2500000000000001;
  CHECK(scenario_hash(s2) != scenario_hash(s));
}

TEST_CASE("scenario parse errors are reported as ScenarioError") {
  auto kind_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::DomainError;
  };
  CHECK(kind_of(R"({"name":"x","potential":{"n":3},"task":"nope"})") == ErrorKind::ScenarioError);
  CHECK(kind_of(R"({"name":"x","potential":{"n":3,"typo":1},"task":"levinson"})") == ErrorKind::ScenarioError);
  CHECK(kind_of(R"({"name":"a/b","potential":{"n":3},"task":"levinson"})") == ErrorKind::ScenarioError);
  CHECK(kind_of(R"({"name":"x","potential":{"n":3,"g":1,"g_critical":{"bracket":[1,2]}},"task":"levinson"})") ==
        ErrorKind::ScenarioError);
  CHECK(kind_of(R"({"name":"x","potential":{"n":3},"task":"levinson","tolerances":{"jump":-1}})") ==
        ErrorKind::ScenarioError);
}

TEST_CASE("validate reports positivity and support problems") {
  const auto n2 = parse(R"({"name":"a","potential":{"n":2,"q":{"constant":0}},"task":"channels"})");
  CHECK(mentions(validate(n2), "PositivityViolation"));
  const auto n3 = parse(R"({"name":"b","potential":{"n":3,"q":{"constant":-0.25}},"task":"channels"})");
  CHECK(mentions(validate(n3), "PositivityViolation"));
  const auto wide = parse(R"({"name":"c","potential":{"n":3,"r_cut":1,
    "w":[{"r0":0,"r1":2,"poly":[-1]}]},"task":"levinson"})");
  CHECK(mentions(validate(wide), "beyond r_cut"));
  const auto window = parse(R"({"name":"d","potential":{"n":3},"task":"levinson","params":{"fit_window":[10,5]}})");
  CHECK(mentions(validate(window), "fit_window"));
  CHECK(validate(parse(kFree)).empty());
}

TEST_CASE("channels task on the free n=3 spec lists half-integer orders") {
  const auto s = parse(kFree);
  const auto res = execute(s, {});
  REQUIRE(res.files.size() == 1);
  std::istringstream in(res.files[0].content);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# scenario_hash=" + scenario_hash(s) + " tol_scale=1");
  std::getline(in, line);
  CHECK(line == "index,lambda,nu,mult");
  int ell = 0;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string idx, lam, nu, mult;
    std::getline(row, idx, ',');
    std::getline(row, lam, ',');
    std::getline(row, nu, ',');
    std::getline(row, mult, ',');
    CHECK(std::stod(nu) == doctest::Approx(ell + 0.5));
    CHECK(std::stoi(mult) == 2 * ell + 1);
    ++ell;
  }
  CHECK(ell == 4);
}

TEST_CASE("runs are persisted deterministically and never overwrite") {
  const auto out = fresh_dir("runs");
  RunOptions opts;
  opts.out_dir = out.string();
  const auto s = parse(kFree);
  const auto a = run(s, opts);
  const auto b = run(s, opts);
  CHECK(a.directory != b.directory);
  CHECK(a.manifest == b.manifest);
  CHECK(a.scenario_hash == b.scenario_hash);
  CHECK(slurp(fs::path(a.directory) / "channels.csv") == slurp(fs::path(b.directory) / "channels.csv"));
  for (const auto& entry : a.manifest) {
    const auto name = entry.at("file").get<std::string>();
    CHECK(sha256_hex(slurp(fs::path(a.directory) / name)) == entry.at("sha256").get<std::string>());
  }
  std::ifstream ledger(out / "ledger.jsonl");
  int lines = 0;
  for (std::string line; std::getline(ledger, line); ++lines) CHECK(json::parse(line).at("status") == "ok");
  CHECK(lines == 2);
  fs::remove_all(out);
}

TEST_CASE("sha256 matches a known digest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("module errors carry the scenario context") {
  const auto s = parse(R"({"name":"ctx","potential":{"n":2,"q":{"constant":0}},"task":"channels"})");
  try {
    execute(s, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PositivityViolation);
    CHECK(std::string(e.what()).find("scenario 'ctx'") != std::string::npos);
  }
}

TEST_CASE("critical coupling resolution and tol-scale options") {
  const auto s = parse(R"({"name":"hb","potential":{"n":3,"w":[{"r0":0,"r1":1,"poly":[-1]}],
    "g_critical":{"bracket":[2,3]}},"task":"levinson"})");
  CHECK(resolve_coupling(s) == doctest::Approx(2.4674011002723395).epsilon(1e-12));
  RunOptions half;
  half.tol_scale = 0.5;
  const auto o = ssf_options(s, half);
  CHECK(o.fit_hi == doctest::Approx(5000));
  CHECK(o.k_max * o.k_max == doctest::Approx(o.fit_hi));
  CHECK(o.k_min == doctest::Approx(5e-4));
}
