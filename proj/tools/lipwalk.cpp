// Command-line front end: each subcommand turns its flags into config
// overrides and hands the merged configuration to run_experiment.

#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lipwalk/config.hpp"
#include "lipwalk/error.hpp"
#include "lipwalk/experiments.hpp"
#include "lipwalk/lattice.hpp"

using nlohmann::json;
using namespace lipwalk;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, sep);) {
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

json number_list(const std::string& s) {
  json a = json::array();
  for (const auto& t : split(s, ',')) {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw CLI::ValidationError("bad number '" + t + "'");
    if (v == static_cast<double>(static_cast<long long>(v))) a.push_back(static_cast<long long>(v));
    else a.push_back(v);
  }
  return a;
}

json point_json(const std::string& s) {
  LatticePoint p = parse_point(s);
  json a = json::array();
  for (int k = 0; k < p.dim(); ++k) a.push_back(p[k]);
  return a;
}

// "R=4,8,16;K=2,4" -> {"R": [4, 8, 16], "K": [2, 4]}
json grid_json(const std::string& s) {
  json g = json::object();
  for (const auto& part : split(s, ';')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("grid entries look like R=4,8,16");
    g[part.substr(0, eq)] = number_list(part.substr(eq + 1));
  }
  return g;
}

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<unsigned> threads;
};

// Which output key --out names for each experiment.
std::string out_key(const std::string& experiment) {
  if (experiment == "solve" || experiment == "construct") return "field";
  if (experiment == "mc") return "estimate";
  return "report";
}

int execute(const Globals& g, const std::string& experiment, json over) {
  if (g.config.empty()) throw CLI::ValidationError("--config is required");
  ExperimentConfig cfg = load_config(g.config);
  if (g.seed) over["seed"] = *g.seed;
  if (g.tol) over["tolerance"] = *g.tol;
  if (g.threads) over["threads"] = *g.threads;
  if (!g.out.empty()) {
    json outputs = json::parse(cfg.canonical).value("outputs", json::object());
    if (over.contains("outputs")) outputs.update(over["outputs"]);
    outputs[out_key(experiment)] = g.out;
    over["outputs"] = outputs;
  } else if (over.contains("outputs")) {
    json outputs = json::parse(cfg.canonical).value("outputs", json::object());
    outputs.update(over["outputs"]);
    over["outputs"] = outputs;
  }
  apply_overrides(cfg, over.dump());
  ExperimentOutcome r = run_experiment(cfg, experiment);
  json summary = {{"status", r.ok() ? "ok" : "fail"},
                  {"experiment", r.experiment},
                  {"config_digest", cfg.digest},
                  {"artifacts", r.artifacts},
                  {"checks_failed", r.checks_failed}};
  (r.ok() ? std::cout : std::cerr) << summary.dump() << std::endl;
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete potential theory laboratory for killed elliptic random walks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "experiment configuration (JSON)");
  app.add_option("--out", g.out, "primary output path ('-' for stdout)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--tol", g.tol, "solver tolerance");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  std::string experiment;
  json over = json::object();

  app.add_subcommand("validate", "check the kernel conditions and the Lipschitz profile")
      ->callback([&] { experiment = "validate"; });

  auto* solve = app.add_subcommand("solve", "solve a Dirichlet problem and write the field as CSV");
  std::string region, data, start, target, radii, ns, escape, grid;
  std::int64_t inner = 0, paths = 0;
  solve->add_option("--region", region, "e.g. ball:y=0,R=32 or collar:y=0,R=32,r=4")->required();
  solve->add_option("--data", data, "one | height | top-indicator | side | boundary | point:x,..");
  solve->callback([&] {
    experiment = "solve";
    over["region"] = region;
    if (!data.empty()) over["data"] = data;
  });

  auto* mc = app.add_subcommand("mc", "Monte Carlo exit probability or Green estimate");
  mc->add_option("--start", start, "start point, e.g. 3,0")->required();
  mc->add_option("--region", region, "stop region")->required();
  mc->add_option("--target", target, "top | side | boundary | point:x,.. | green:x,..");
  mc->add_option("--paths", paths, "number of paths");
  mc->callback([&] {
    experiment = "mc";
    over["start"] = point_json(start);
    over["region"] = region;
    if (!target.empty()) over["target"] = target;
    if (paths > 0) over["paths"] = paths;
  });

  auto* construct = app.add_subcommand("construct", "exhaustion construction of the positive harmonic function");
  std::string log_path;
  construct->add_option("--radii", radii, "e.g. 16,32,64,128");
  construct->add_option("--data", data, "outer data: cap | sphere | height");
  construct->add_option("--log", log_path, "convergence log path");
  construct->callback([&] {
    experiment = "construct";
    if (!radii.empty()) over["grid"]["radii"] = number_list(radii);
    if (!data.empty()) over["outer_data"] = data;
    if (!log_path.empty()) over["outputs"]["log"] = log_path;
  });

  auto* martin = app.add_subcommand("martin", "Martin-kernel collapse along escape sequences");
  martin->add_option("--radii", radii, "exhaustion radii for h");
  martin->add_option("--n", ns, "escape scales, e.g. 8,16,32,64");
  martin->add_option("--escape", escape, "directions separated by ';', e.g. 1,0;1,1");
  martin->add_option("--inner", inner, "radius of the comparison window");
  martin->callback([&] {
    experiment = "martin";
    if (!radii.empty()) over["grid"]["radii"] = number_list(radii);
    if (!ns.empty()) over["grid"]["n"] = number_list(ns);
    if (!escape.empty()) {
      over["escape"] = json::array();
      for (const auto& d : split(escape, ';')) over["escape"].push_back(point_json(d));
    }
    if (inner > 0) over["inner_radius"] = inner;
  });

  auto* uniq = app.add_subcommand("uniq", "compare exhaustion candidates built from different outer data");
  uniq->add_option("--radii", radii, "window radii, e.g. 64,128");
  uniq->add_option("--data", data, "outer data kinds, e.g. cap,height");
  uniq->add_option("--inner", inner, "radius of the comparison window");
  uniq->callback([&] {
    experiment = "uniq";
    if (!radii.empty()) over["grid"]["radii"] = number_list(radii);
    if (!data.empty()) over["outer_data"] = split(data, ',');
    if (inner > 0) over["inner_radius"] = inner;
  });

  auto* lab = app.add_subcommand("lab", "measure an inequality constant over a scale grid");
  lab->require_subcommand(1);
  for (const char* name : {"harnack", "carleson", "prop1", "bhp", "lemma2", "decay", "growth", "lateral"}) {
    auto* sub = lab->add_subcommand(name, std::string("lab experiment ") + name);
    sub->add_option("--grid", grid, "scale grid, e.g. R=4,8,16;K=2,4,8,16");
    sub->callback([&, name] {
      experiment = name;
      if (!grid.empty()) over["grid"] = grid_json(grid);
    });
  }

  auto* run = app.add_subcommand("run", "run the experiment named in the config (or on the command line)");
  std::string run_config, run_name;
  run->add_option("config", run_config, "configuration file")->required();
  run->add_option("experiment", run_name, "experiment name");
  run->callback([&] {
    g.config = run_config;
    experiment = run_name;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (experiment.empty()) {
      experiment = load_config(g.config).experiment;
      if (experiment.empty()) throw CLI::ValidationError("no experiment given on the command line or in the config");
    }
    return execute(g, experiment, over);
  } catch (const Error& e) {
    json err = {{"status", "error"}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << json({{"status", "error"}, {"kind", "usage"}, {"message", e.what()}}).dump() << std::endl;
    return 2;
  }
}
