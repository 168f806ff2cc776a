#include <doctest.h>

#include <filesystem>
#include <limits>
#include <random>

#include <json.hpp>

#include "lipwalk/config.hpp"
#include "lipwalk/error.hpp"
#include "lipwalk/experiments.hpp"
#include "lipwalk/io.hpp"

using namespace lipwalk;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"({
  "kernel": {"kind": "srw", "dimension": 2},
  "domain": {"dimension": 2, "profile": {"kind": "flat"}},
  "tolerance": 1e-10
})";

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("lipwalk_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kInvalidArgument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("FNV-1a 64 reference values") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("digest ignores whitespace and key order but not content") {
  auto a = parse_config(kBase);
  auto b = parse_config(R"({"tolerance":1e-10,"domain":{"profile":{"kind":"flat"},"dimension":2},"kernel":{"dimension":2,"kind":"srw"}})");
  CHECK(a.digest == b.digest);
  CHECK(a.digest.size() == 16);
  auto c = parse_config(R"({"tolerance":1e-9,"domain":{"profile":{"kind":"flat"},"dimension":2},"kernel":{"dimension":2,"kind":"srw"}})");
  CHECK(c.digest != a.digest);
  apply_overrides(a, R"({"tolerance": 1e-9})");
  CHECK(a.digest == c.digest);
  CHECK(a.tolerance == 1e-9);
}

TEST_CASE("unknown fields are rejected with their path") {
  auto msg = message_of([] { parse_config(R"({"kernel":{"kind":"srw","dimension":2},"domain":{"dimension":2},"colour":1})"); });
  CHECK(msg.find("config.colour") != std::string::npos);
  msg = message_of([] { parse_config(R"({"kernel":{"kind":"srw","dimension":2,"lazy":true},"domain":{"dimension":2}})"); });
  CHECK(msg.find("kernel.lazy") != std::string::npos);
  msg = message_of(
      [] { parse_config(R"({"kernel":{"kind":"srw","dimension":2},"domain":{"dimension":2,"profile":{"kind":"flat","tilt":1}}})"); });
  CHECK(msg.find("domain.profile.tilt") != std::string::npos);
  CHECK(kind_of([] { parse_config(R"({"kernel":{"kind":"srw","dimension":2}})"); }) == ErrorKind::kInvalidConfig);
}

TEST_CASE("malformed JSON reports line and column") {
  const std::string text = "{\n  \"kernel\": {\"kind\": \"srw\",,\n}";
  auto msg = message_of([&] { parse_config(text); });
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("column 28") != std::string::npos);
  CHECK(line_column("ab\ncd", 4) == std::pair<std::size_t, std::size_t>{2, 2});
}

TEST_CASE("kernel kinds from config") {
  auto periodic = parse_config(R"({
    "kernel": {"kind": "periodic", "steps": [[1,0],[-1,0],[0,1],[0,-1]], "period": [2,2], "alpha": "1/5",
               "weights": [["3/10","3/10","1/5","1/5"], ["1/5","1/5","3/10","3/10"],
                           ["1/5","1/5","3/10","3/10"], ["3/10","3/10","1/5","1/5"]]},
    "domain": {"dimension": 2}})");
  CHECK(periodic.kernel.is_exact());
  // (1,0) is listed first in the file; check it landed on the right step
  auto w = periodic.kernel.weights_at(LatticePoint{0, 0});
  CHECK(w[*periodic.kernel.steps().index_of(LatticePoint{1, 0})] == doctest::Approx(0.3));
  CHECK(w[*periodic.kernel.steps().index_of(LatticePoint{0, 1})] == doctest::Approx(0.2));
  auto formula = parse_config(R"({"kernel":{"kind":"formula","dimension":2,"amplitude":0.3,"wavenumber":[0.5,0.2]},
                                  "domain":{"dimension":2,"profile":{"kind":"cone","slope":"1"}}})");
  CHECK(formula.kernel.alpha() == doctest::Approx(0.7 / 4));
  CHECK(formula.domain.contains(LatticePoint{3, 2}));
  CHECK_FALSE(formula.domain.contains(LatticePoint{2, 2}));
}

TEST_CASE("CSV round trip is exact") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<LatticePoint> pts;
  std::vector<double> vals;
  for (int a = -3; a <= 3; ++a)
    for (int b = 0; b < 4; ++b) {
      pts.push_back(LatticePoint{a, b});
      vals.push_back(u(rng) * std::pow(10.0, double(rng() % 40) - 20));
    }
  vals[0] = std::numeric_limits<double>::denorm_min();
  vals[1] = -0.0;
  vals[2] = 1.0 / 3.0;
  Field f(PointSet(pts), vals);
  std::string text = field_csv(f, "0123456789abcdef");
  CHECK(text.rfind("# lipwalk 0.1.0 config_digest=0123456789abcdef\nx1,x2,value\n", 0) == 0);
  Field g = parse_field_csv(text);
  REQUIRE(g.size() == f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(g.support()[i] == f.support()[i]);
    CHECK(std::memcmp(&g.values()[i], &f.values()[i], sizeof(double)) == 0);
  }
  CHECK(field_csv(g, "0123456789abcdef") == text);

  Field one(PointSet({LatticePoint{4}}), 2.5);
  std::string t1 = field_csv(one, "x");
  CHECK(std::count(t1.begin(), t1.end(), '\n') == 3);
  CHECK(kind_of([] { parse_field_csv("x1,value\n1,2\n1,3\n"); }) == ErrorKind::kIo);
  CHECK(kind_of([&] { write_field_csv(one, "/nonexistent-dir/x.csv", "d"); }) == ErrorKind::kIo);
}

TEST_CASE("run construct writes the field and the log, byte-identically on rerun") {
  fs::path dir = scratch("construct");
  auto cfg = parse_config(kBase);
  nlohmann::json over = {{"grid", {{"radii", {16, 32}}}},
                         {"outputs", {{"field", (dir / "h.csv").string()}, {"log", (dir / "conv.json").string()}}}};
  apply_overrides(cfg, over.dump());
  auto out = run_experiment(cfg, "construct");
  CHECK(out.ok());
  REQUIRE(fs::exists(dir / "h.csv"));
  REQUIRE(fs::exists(dir / "conv.json"));
  const std::string h1 = read_text((dir / "h.csv").string());
  CHECK(h1.find(cfg.digest) != std::string::npos);
  auto log = nlohmann::json::parse(read_text((dir / "conv.json").string()));
  CHECK(log.at("config_digest") == cfg.digest);
  CHECK(log.at("tool_version") == kToolVersion);
  Field h = parse_field_csv(h1);
  CHECK(h.at(LatticePoint{8, 0}) == 1.0);

  auto again = run_experiment(cfg, "construct");
  CHECK(read_text((dir / "h.csv").string()) == h1);
  CHECK(again.report == out.report);
}

TEST_CASE("tampered kernel fails validation with the site and drift") {
  fs::path dir = scratch("tamper");
  auto cfg = parse_config(R"({
    "kernel": {"kind": "homogeneous", "steps": [[1,0],[-1,0],[0,1],[0,-1]], "alpha": 0.2,
               "weights": [0.3, 0.2, 0.25, 0.25]},
    "domain": {"dimension": 2}})");
  apply_overrides(cfg, nlohmann::json({{"outputs", {{"report", (dir / "r.json").string()}}}}).dump());
  auto out = run_experiment(cfg, "validate");
  CHECK_FALSE(out.ok());
  REQUIRE_FALSE(out.checks_failed.empty());
  const std::string& m = out.checks_failed.front();
  CHECK(m.find("centering") != std::string::npos);
  CHECK(m.find("x=") != std::string::npos);
  CHECK(m.find("drift=") != std::string::npos);
  // every other experiment stops at the same witness
  CHECK_FALSE(run_experiment(cfg, "harnack").ok());
}

TEST_CASE("unknown experiment names are rejected") {
  auto cfg = parse_config(kBase);
  CHECK(kind_of([&] { run_experiment(cfg, "nonsense"); }) == ErrorKind::kInvalidConfig);
  CHECK(std::find(experiment_names().begin(), experiment_names().end(), "lateral") != experiment_names().end());
}

TEST_CASE("lab reports carry the digest and the grid") {
  fs::path dir = scratch("lab");
  auto cfg = parse_config(kBase);
  apply_overrides(cfg, nlohmann::json({{"grid", {{"R", {2, 4}}}}, {"outputs", {{"report", (dir / "r.json").string()}}}}).dump());
  auto out = run_experiment(cfg, "lab:harnack");
  auto rep = nlohmann::json::parse(read_text((dir / "r.json").string()));
  CHECK(rep.at("experiment") == "harnack");
  CHECK(rep.at("config_digest") == cfg.digest);
  CHECK(rep.at("grid").at("R").size() == 2);
  CHECK(rep.at("constants").is_array());
  CHECK(rep.at("witnesses").is_array());
  CHECK(rep.at("band") == 2.0);
  CHECK(out.ok());
}
