#include "lipwalk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lipwalk/dirichlet.hpp"
#include "lipwalk/error.hpp"
#include "lipwalk/harmonic.hpp"
#include "lipwalk/io.hpp"
#include "lipwalk/lab.hpp"
#include "lipwalk/monte_carlo.hpp"
#include "lipwalk/parallel.hpp"

namespace lipwalk {

using nlohmann::json;

namespace {

json to_json(const LatticePoint& p) {
  json a = json::array();
  for (int k = 0; k < p.dim(); ++k) a.push_back(p[k]);
  return a;
}

json to_json(const std::vector<LatticePoint>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(to_json(p));
  return a;
}

// Non-finite numbers are not valid JSON; render them as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string fmt(double v) { return format_double(v); }

struct Run {
  const ExperimentConfig& cfg;
  ExperimentOutcome out;
  json doc = json::object();

  SolveOptions opts() const { return SolveOptions{cfg.tolerance, SolveMethod::kAuto, 0}; }
  void check(bool ok, const std::string& what) {
    if (!ok) out.checks_failed.push_back(what);
  }
  std::vector<std::int64_t> ints(const std::string& key, std::vector<std::int64_t> fallback) const {
    auto it = cfg.grid.find(key);
    if (it == cfg.grid.end()) return fallback;
    std::vector<std::int64_t> v;
    for (double x : it->second) {
      if (x != std::floor(x) || std::fabs(x) > 1e15) {
        fail(ErrorKind::kInvalidConfig, "grid." + key + ": values must be integers");
      }
      v.push_back(static_cast<std::int64_t>(x));
    }
    return v;
  }
  std::vector<Rational> rationals(const std::string& key, std::vector<std::int64_t> fallback) const {
    std::vector<Rational> v;
    for (auto x : ints(key, std::move(fallback))) v.emplace_back(x);
    return v;
  }
  void write(const std::string& path, const std::string& content) {
    write_text(path, content);
    out.artifacts.push_back(path);
  }
  void finish(const std::string& report_path) {
    doc["experiment"] = out.experiment;
    doc["tool_version"] = kToolVersion;
    doc["config_digest"] = cfg.digest;
    doc["tolerance"] = cfg.tolerance;
    doc["checks_failed"] = out.checks_failed;
    doc["ok"] = out.ok();
    out.report = doc.dump(2) + "\n";
    write(report_path, out.report);
  }
};

// --- validation -------------------------------------------------------------

json kernel_json(const KernelValidationReport& rep, const TransitionKernel& k) {
  json j = {{"exact", rep.exact},
            {"sites_checked", rep.sites_checked},
            {"worst_normalization", rep.worst_normalization},
            {"worst_drift", rep.worst_drift},
            {"min_weight", rep.min_weight},
            {"alpha", k.alpha()},
            {"max_feasible_alpha", rep.max_feasible_alpha}};
  if (rep.violation) {
    const auto& v = *rep.violation;
    j["violation"] = {{"site", to_json(v.site)}, {"condition", to_string(v.condition)}, {"magnitude", v.magnitude}};
    if (!v.drift.empty()) j["violation"]["drift"] = v.drift;
  }
  return j;
}

// Returns false (with checks recorded) when the kernel or domain is invalid.
bool validate_inputs(Run& run) {
  const auto& cfg = run.cfg;
  const PointSet window = enumerate_region(Region::cube(cfg.anchor_or_origin(), Rational(cfg.window)));
  KernelValidationReport rep = check_kernel(cfg.kernel, window);
  json kj = kernel_json(rep, cfg.kernel);
  run.check(rep.max_feasible_alpha > 1e-12, "kernel: no centered elliptic weighting exists on this step set");
  if (rep.violation) {
    const auto& v = *rep.violation;
    std::string msg = "kernel: " + to_string(v.condition) + " violated at x=" + v.site.to_string() +
                      " magnitude=" + fmt(v.magnitude);
    if (!v.drift.empty()) {
      msg += " drift=(";
      for (std::size_t i = 0; i < v.drift.size(); ++i) msg += (i ? "," : "") + fmt(v.drift[i]);
      msg += ")";
    }
    run.check(false, msg);
  }
  const auto& prof = cfg.domain.profile();
  const double worst = prof.spot_check_lipschitz(std::max<std::int64_t>(cfg.window, 8));
  const double A = std::max(prof.lipschitz_constant(), 0.0);
  run.check(worst <= A * (1.0 + 1e-12) + 1e-15,
            "domain: Lipschitz spot check found ratio " + fmt(worst) + " above A=" + fmt(A));
  run.doc["validation"] = {{"kernel", kj},
                           {"domain", {{"dimension", cfg.domain.dim()},
                                       {"lipschitz_constant", A},
                                       {"worst_lipschitz_ratio", worst}}}};
  return run.out.ok();
}

// --- solver-backed experiments ------------------------------------------------

struct Window {
  PointSet interior;
  PointSet boundary;
  std::optional<CollarGeometry> collar;
};

Window make_window(const ExperimentConfig& cfg) {
  if (!cfg.region) fail(ErrorKind::kInvalidConfig, "config.region: required for this experiment");
  const Region region = parse_region(*cfg.region, cfg.kernel.dim());
  Window w;
  if (region.kind() == Region::Kind::kCollar) {
    // collar:y=..,R=..,r=.. is C_{R,r}(y), i.e. K = R / r.
    const Rational inner = *region.inner_radius();
    if (inner < Rational(1)) fail(ErrorKind::kInvalidRegion, "collar inner radius r must be at least 1");
    CollarGeometry geo = collar_geometry(region.center(), *region.radius() / inner, inner, cfg.domain);
    w.interior = geo.collar;
    w.collar = std::move(geo);
  } else {
    w.interior = enumerate_region(region, cfg.domain);
  }
  if (w.interior.empty()) fail(ErrorKind::kInvalidRegion, "region " + region.describe() + " has no points in C");
  w.boundary = boundary(w.interior, cfg.kernel.steps());
  return w;
}

PointSet target_set(const ExperimentConfig& cfg, const Window& w, const std::string& spec) {
  if (spec == "top" || spec == "top-indicator") {
    if (w.collar) return w.collar->top;
    std::vector<LatticePoint> pts;
    for (const auto& z : w.boundary)
      if (cfg.domain.contains(z)) pts.push_back(z);
    return PointSet(std::move(pts));
  }
  if (spec == "side" && w.collar) return w.collar->side;
  if (spec == "boundary") return w.boundary;
  if (spec.rfind("point:", 0) == 0) {
    LatticePoint p = parse_point(spec.substr(6));
    if (!w.boundary.contains(p)) fail(ErrorKind::kInvalidTarget, p.to_string() + " is not a boundary point");
    return PointSet({p});
  }
  fail(ErrorKind::kInvalidConfig, "unknown target/data '" + spec + "' (expected top, side, boundary or point:x,..)");
}

void run_solve(Run& run) {
  const auto& cfg = run.cfg;
  Window w = make_window(cfg);
  std::vector<double> g(w.boundary.size(), 0.0);
  if (cfg.data == "one") {
    std::fill(g.begin(), g.end(), 1.0);
  } else if (cfg.data == "height") {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = cfg.domain.height(w.boundary[i]).to_double();
  } else {
    PointSet t = target_set(cfg, w, cfg.data);
    for (const auto& p : t) g[*w.boundary.find(p)] = 1.0;
  }
  DirichletProblem prob(w.interior, cfg.kernel, Field(w.boundary, g));
  SolveInfo info;
  Field u = solve_dirichlet(prob, w.collar ? collar_options(run.opts()) : run.opts(), &info);
  const double lo = *std::min_element(g.begin(), g.end()), hi = *std::max_element(g.begin(), g.end());
  const double slack = 1e-12 * (1.0 + std::max(std::fabs(lo), std::fabs(hi)));
  run.check(u.min_value() >= lo - slack && u.max_value() <= hi + slack, "maximum principle violated");
  run.doc["interior_size"] = w.interior.size();
  run.doc["boundary_size"] = w.boundary.size();
  run.doc["region"] = *cfg.region;
  run.doc["data"] = cfg.data;
  run.doc["solver"] = {{"method", to_string(info.method)}, {"iterations", info.iterations}, {"residual", info.residual}};
  run.doc["range"] = {u.min_value(), u.max_value()};
  const std::string field_path = cfg.output("field", "field.csv");
  run.write(field_path, field_csv(u, cfg.digest));
  run.doc["field"] = field_path;
  run.finish(cfg.output("report", "solve.json"));
}

void run_mc(Run& run) {
  const auto& cfg = run.cfg;
  if (!cfg.start) fail(ErrorKind::kInvalidConfig, "config.start: required for mc");
  Window w = make_window(cfg);
  if (!w.interior.contains(*cfg.start)) fail(ErrorKind::kInvalidArgument, "start is not in the stop region");
  SimulationConfig sc{cfg.kernel, *cfg.start, w.interior, 0, cfg.seed, cfg.paths, cfg.threads};
  EstimatorResult est;
  double solver = 0.0;
  if (cfg.target.rfind("green:", 0) == 0) {
    LatticePoint y = parse_point(cfg.target.substr(6));
    est = estimate_green(sc, y);
    solver = green_function(w.interior, cfg.kernel, y, run.opts()).at(*cfg.start);
  } else {
    PointSet t = target_set(cfg, w, cfg.target);
    est = estimate_exit_probability(sc, t);
    solver = harmonic_measure(w.interior, cfg.kernel, t, w.collar ? collar_options(run.opts()) : run.opts())
                 .at(*cfg.start);
  }
  const double gap = std::fabs(est.point_estimate - solver);
  const bool agree = est.half_width_95 > 0.0 ? gap <= 3.0 * est.half_width_95 : gap <= 1e-12;
  run.check(agree, "Monte Carlo estimate " + fmt(est.point_estimate) + " differs from the solver value " +
                       fmt(solver) + " by more than 3 half-widths");
  run.doc["estimate"] = est.point_estimate;
  run.doc["half_width_95"] = est.half_width_95;
  run.doc["n_effective"] = est.n_effective;
  run.doc["truncated_paths"] = est.truncated_paths;
  run.doc["path_cap"] = effective_path_cap(sc);
  run.doc["seed"] = cfg.seed;
  run.doc["paths"] = cfg.paths;
  run.doc["start"] = to_json(*cfg.start);
  run.doc["target"] = cfg.target;
  run.doc["solver_value"] = solver;
  run.finish(cfg.output("estimate", cfg.output("report", "est.json")));
}

// --- constructor ------------------------------------------------------------

ExhaustionSchedule schedule(const Run& run, std::vector<std::int64_t> radii, OuterData data) {
  const auto& cfg = run.cfg;
  ExhaustionSchedule s = ExhaustionSchedule::standard(cfg.kernel.dim(), std::move(radii));
  s.anchor = cfg.anchor_or_origin();
  s.reference = cfg.reference_or_default();
  s.inner_radius = cfg.inner_radius;
  s.data = data;
  return s;
}

OuterData primary_data(const ExperimentConfig& cfg) {
  return cfg.outer_data.empty() ? OuterData::kCap : parse_outer_data(cfg.outer_data.front());
}

void run_construct(Run& run) {
  const auto& cfg = run.cfg;
  auto radii = run.ints("radii", {16, 32, 64, 128});
  Construction c = construct_harmonic(schedule(run, radii, primary_data(cfg)), cfg.domain, cfg.kernel, run.opts());
  json log = json::array();
  for (const auto& e : c.log) {
    log.push_back({{"radius_from", e.radius_from}, {"radius_to", e.radius_to}, {"deviation", e.deviation},
                   {"witness", to_json(e.witness)}});
  }
  if (!c.log.empty()) {
    run.check(c.log.back().deviation <= c.log.front().deviation,
              "final deviation " + fmt(c.log.back().deviation) + " exceeds the first " + fmt(c.log.front().deviation));
  }
  const double scale = 1.0 + c.candidate.field.max_value();
  for (std::size_t i = 0; i < c.residuals.size(); ++i) {
    run.check(c.residuals[i] <= cfg.tolerance * scale,
              "harmonicity residual " + fmt(c.residuals[i]) + " at R=" + std::to_string(radii[i]) + " exceeds tol");
  }
  const LatticePoint x0 = cfg.reference_or_default();
  run.check(c.candidate.field.at(x0) == 1.0, "candidate is not normalized at the reference point");

  const std::string field_path = cfg.output("field", "h.csv");
  run.write(field_path, field_csv(c.candidate.field, cfg.digest));
  run.doc["field"] = field_path;
  run.doc["radii"] = radii;
  run.doc["outer_data"] = to_string(primary_data(cfg));
  run.doc["anchor"] = to_json(c.candidate.anchor);
  run.doc["reference"] = to_json(c.candidate.reference);
  run.doc["window_radius"] = c.candidate.window_radius;
  run.doc["interior_size"] = c.candidate.interior_size;
  run.doc["log"] = log;
  run.doc["residuals"] = c.residuals;
  run.finish(cfg.output("log", cfg.output("report", "conv.json")));
}

void run_martin(Run& run) {
  const auto& cfg = run.cfg;
  const int d = cfg.kernel.dim();
  auto radii = run.ints("radii", {16, 32, 64, 128});
  auto ns = run.ints("n", {8, 16, 32, 64});
  std::vector<LatticePoint> dirs = cfg.escape;
  if (dirs.empty()) {
    dirs.push_back(LatticePoint::unit(d, 0));
    if (d >= 2) dirs.push_back(LatticePoint::unit(d, 0) + LatticePoint::unit(d, 1));
  }
  const LatticePoint anchor = cfg.anchor_or_origin();
  const LatticePoint x0 = cfg.reference_or_default();
  Construction c = construct_harmonic(schedule(run, radii, primary_data(cfg)), cfg.domain, cfg.kernel, run.opts());
  const std::int64_t inner = cfg.inner_radius > 0 ? cfg.inner_radius : 4;
  const PointSet eval = enumerate_region(Region::ball(anchor, Rational(inner)), cfg.domain);
  json seqs = json::array();
  for (const auto& dir : dirs) {
    std::vector<LatticePoint> ys;
    for (auto n : ns) ys.push_back(anchor + dir * n);
    auto entries = martin_collapse(ys, eval, c.candidate.field, cfg.domain, cfg.kernel, anchor, x0, run.opts());
    json rows = json::array();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      rows.push_back({{"n", ns[i]}, {"y", to_json(e.y)}, {"deviation", e.deviation},
                      {"witness", to_json(e.witness)}, {"window", e.window}});
      if (i > 0) {
        run.check(e.deviation < entries[i - 1].deviation,
                  "Martin deviation along " + dir.to_string() + " did not decrease at n=" + std::to_string(ns[i]));
      }
    }
    seqs.push_back({{"direction", to_json(dir)}, {"entries", rows}});
  }
  run.doc["inner_radius"] = inner;
  run.doc["h_radius"] = c.candidate.window_radius;
  run.doc["reference"] = to_json(x0);
  run.doc["sequences"] = seqs;
  run.finish(cfg.output("report", "martin.json"));
}

void run_uniq(Run& run) {
  const auto& cfg = run.cfg;
  auto radii = run.ints("radii", {64, 128});
  std::vector<std::string> kinds = cfg.outer_data.size() >= 2 ? cfg.outer_data : std::vector<std::string>{"cap", "height"};
  const LatticePoint anchor = cfg.anchor_or_origin();
  const LatticePoint x0 = cfg.reference_or_default();
  const std::int64_t inner_r = cfg.inner_radius > 0 ? cfg.inner_radius : 8;
  const PointSet inner = enumerate_region(Region::ball(anchor, Rational(inner_r)), cfg.domain);
  json rows = json::array();
  double prev = std::numeric_limits<double>::infinity();
  for (auto R : radii) {
    std::vector<HarmonicCandidate> cands;
    for (const auto& k : kinds) {
      cands.push_back(harmonic_candidate(cfg.domain, cfg.kernel, anchor, R, x0, parse_outer_data(k), run.opts()));
    }
    UniquenessReport rep = uniqueness_check(cands, inner, x0);
    json pairs = json::array();
    for (const auto& p : rep.pairs) {
      pairs.push_back({{"a", kinds[p.a]}, {"b", kinds[p.b]}, {"deviation", p.deviation}, {"witness", to_json(p.witness)}});
    }
    rows.push_back({{"R", R}, {"max_deviation", rep.max_deviation}, {"pairs", pairs}});
    run.check(rep.max_deviation < prev || rep.max_deviation == 0.0,
              "uniqueness deviation did not shrink at R=" + std::to_string(R));
    prev = rep.max_deviation;
  }
  run.doc["outer_data"] = kinds;
  run.doc["inner_radius"] = inner_r;
  run.doc["reference"] = to_json(x0);
  run.doc["radii"] = rows;
  run.finish(cfg.output("report", "uniq.json"));
}

// --- inequality lab ---------------------------------------------------------

struct LabRun {
  Run& run;
  LabReport rep;

  void constant(const std::string& name, double v, std::map<std::string, double> scale) {
    rep.constants.push_back({name, v, std::move(scale)});
  }
  void witness(const std::string& name, std::vector<LatticePoint> pts) { rep.witnesses.push_back({name, std::move(pts)}); }
  void band(const std::string& what, const std::vector<double>& values) {
    const double b = band_ratio(values);
    run.check(b <= run.cfg.band, what + " spread " + fmt(b) + " exceeds the band " + fmt(run.cfg.band));
  }
  void finish() {
    json constants = json::array();
    for (const auto& c : rep.constants) constants.push_back({{"name", c.name}, {"value", number(c.value)}, {"scale", c.scale}});
    json witnesses = json::array();
    for (const auto& w : rep.witnesses) witnesses.push_back({{"name", w.name}, {"points", to_json(w.points)}});
    json grid = json::object();
    for (const auto& [k, v] : rep.grid) grid[k] = v;
    run.doc["grid"] = grid;
    run.doc["constants"] = constants;
    run.doc["witnesses"] = witnesses;
    run.doc["band"] = run.cfg.band;
    run.doc["anchor"] = to_json(run.cfg.anchor_or_origin());
    run.finish(run.cfg.output("report", "report.json"));
  }
};

std::vector<double> as_doubles(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

void lab_harnack(LabRun& lab) {
  const auto& cfg = lab.run.cfg;
  auto Rs = lab.run.ints("R", {4, 8, 16});
  lab.rep.grid["R"] = as_doubles(Rs);
  std::vector<double> cs;
  for (auto R : Rs) {
    HarnackResult h = harnack_constant(cfg.anchor_or_origin(), Rational(R), cfg.kernel);
    const double sR = static_cast<double>(R);
    lab.constant("harnack", h.constant.value, {{"R", sR}});
    lab.constant("local_harnack", h.local.value, {{"R", sR}});
    lab.witness("harnack R=" + std::to_string(R) + " {source, argmax, argmin}", h.constant.witness);
    lab.witness("local R=" + std::to_string(R) + " {source, xi, zeta}", h.local.witness);
    lab.run.check(h.local.value <= h.inverse_alpha * (1.0 + 1e-12),
                  "one-step ratio " + fmt(h.local.value) + " exceeds 1/alpha=" + fmt(h.inverse_alpha));
    cs.push_back(h.constant.value);
  }
  lab.band("harnack constant", cs);
}

template <class F>
void per_R(LabRun& lab, const std::string& name, std::vector<std::int64_t> defaults, F measure, bool banded) {
  auto Rs = lab.run.ints("R", std::move(defaults));
  lab.rep.grid["R"] = as_doubles(Rs);
  std::vector<double> vals;
  for (auto R : Rs) {
    Measurement m = measure(R);
    lab.constant(name, m.value, {{"R", static_cast<double>(R)}});
    lab.witness(name + " R=" + std::to_string(R), m.witness);
    vals.push_back(m.value);
  }
  if (banded) lab.band(name + " constant", vals);
}

void lab_carleson(LabRun& lab) {
  const auto& cfg = lab.run.cfg;
  per_R(lab, "carleson", {8, 16, 32},
        [&](std::int64_t R) { return carleson_constant(cfg.anchor_or_origin(), R, cfg.domain, cfg.kernel); }, true);
}

void lab_prop1(LabRun& lab) {
  const auto& cfg = lab.run.cfg;
  per_R(lab, "prop1_rho", {8, 16},
        [&](std::int64_t R) {
          Measurement m = prop1_contraction(cfg.anchor_or_origin(), R, cfg.domain, cfg.kernel);
          lab.run.check(m.value < 1.0, "contraction rho=" + fmt(m.value) + " is not below 1 at R=" + std::to_string(R));
          return m;
        },
        true);
}

void lab_bhp(LabRun& lab) {
  const auto& cfg = lab.run.cfg;
  auto Ks = lab.run.ints("K", {4});
  lab.rep.grid["K"] = as_doubles(Ks);
  auto Rs = lab.run.ints("R", {4, 8});
  lab.rep.grid["R"] = as_doubles(Rs);
  for (auto K : Ks) {
    std::vector<double> vals;
    for (auto R : Rs) {
      Measurement m = boundary_harnack_constant(cfg.anchor_or_origin(), R, K, cfg.domain, cfg.kernel);
      lab.constant("boundary_harnack", m.value, {{"R", static_cast<double>(R)}, {"K", static_cast<double>(K)}});
      lab.witness("bhp R=" + std::to_string(R) + " K=" + std::to_string(K) + " {u source, v source, argmax}",
                  m.witness);
      lab.run.check(std::isfinite(m.value), "boundary Harnack constant is not finite");
      vals.push_back(m.value);
    }
    lab.band("boundary Harnack constant (K=" + std::to_string(K) + ")", vals);
  }
}

void lab_lemma2(LabRun& lab) {
  const auto& cfg = lab.run.cfg;
  auto rs = lab.run.ints("r", {4});
  auto Ks = lab.run.rationals("K", {2, 4, 8, 16});
  lab.rep.grid["r"] = as_doubles(rs);
  for (const auto& K : Ks) lab.rep.grid["K"].push_back(K.to_double());
  for (auto r : rs) {
    OnsetResult res = lemma2_sweep(cfg.anchor_or_origin(), Rational(r), cfg.domain, cfg.kernel, Ks, lab.run.opts());
    for (const auto& row : res.table) {
      lab.constant("min_ratio", row.min_ratio, {{"r", static_cast<double>(r)}, {"K", row.K.to_double()}});
      lab.witness("lemma2 argmin r=" + std::to_string(r) + " K=" + row.K.to_string(), {row.argmin});
    }
    lab.run.check(res.onset.has_value(), "no K in the grid reaches min p_top/p_side >= 1 at r=" + std::to_string(r));
    if (res.onset) lab.constant("onset_K", res.onset->to_double(), {{"r", static_cast<double>(r)}});
    lab.run.check(res.table.back().min_ratio >= res.table.front().min_ratio,
                  "ratio table is not trending upward at r=" + std::to_string(r));
  }
}

void lab_decay(LabRun& lab) {
  const auto& cfg = lab.run.cfg;
  auto rs = lab.run.ints("r", {8});
  auto Ks = lab.run.ints("K", {kDefaultDecayK});
  lab.rep.grid["r"] = as_doubles(rs);
  lab.rep.grid["K"] = as_doubles(Ks);
  for (auto r : rs) {
    for (auto K : Ks) {
      DecayFit f = boundary_decay_profile(cfg.anchor_or_origin(), Rational(r), cfg.domain, cfg.kernel, Rational(K),
                                          lab.run.opts());
      std::map<std::string, double> s{{"r", static_cast<double>(r)}, {"K", static_cast<double>(K)}};
      lab.constant("beta", f.beta, s);
      lab.constant("floor", f.floor, s);
      lab.constant("levels", static_cast<double>(f.levels), s);
      lab.run.check(f.floor > 0.0, "power-law floor is not positive at r=" + std::to_string(r));
    }
  }
}

void lab_growth(LabRun& lab) {
  const auto& cfg = lab.run.cfg;
  auto Rs = lab.run.ints("R", {8, 16});
  lab.rep.grid["R"] = as_doubles(Rs);
  std::vector<double> gammas;
  for (auto R : Rs) {
    GrowthFit g = interior_growth_exponent(cfg.anchor_or_origin(), R, cfg.domain, cfg.kernel);
    lab.constant("gamma", g.gamma, {{"R", static_cast<double>(R)}});
    lab.constant("growth_constant", g.constant, {{"R", static_cast<double>(R)}});
    lab.run.check(std::isfinite(g.gamma) && std::isfinite(g.constant), "growth fit is not finite");
    gammas.push_back(g.gamma);
  }
  lab.band("growth exponent", gammas);
}

void lab_lateral(LabRun& lab) {
  const auto& cfg = lab.run.cfg;
  auto rs = lab.run.ints("r", {4});
  auto Ks = lab.run.rationals("K", {2, 4, 8, 16});
  lab.rep.grid["r"] = as_doubles(rs);
  for (const auto& K : Ks) lab.rep.grid["K"].push_back(K.to_double());
  for (auto r : rs) {
    LateralResult res = lateral_decay(cfg.anchor_or_origin(), Rational(r), cfg.domain, cfg.kernel, Ks, lab.run.opts());
    for (const auto& row : res.table) {
      lab.constant("max_v", row.max_v, {{"r", static_cast<double>(r)}, {"K", row.K.to_double()}});
      lab.witness("lateral argmax r=" + std::to_string(r) + " K=" + row.K.to_string(), {row.argmax});
    }
    lab.constant("slope", res.slope, {{"r", static_cast<double>(r)}});
    lab.constant("worst_step_slope", res.worst_step_slope, {{"r", static_cast<double>(r)}});
    lab.run.check(res.slope < 0.0, "lateral decay slope is not negative at r=" + std::to_string(r));
    lab.run.check(res.worst_step_slope <= kLateralMinStepSlope,
                  "lateral decay stalls between consecutive K (step slope " + fmt(res.worst_step_slope) + ")");
  }
}

void run_validate(Run& run) { run.finish(run.cfg.output("report", "-")); }

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"validate", "solve",  "mc",    "construct", "martin",
                                                 "uniq",     "harnack", "carleson", "prop1",  "bhp",
                                                 "lemma2",   "decay",   "growth",  "lateral"};
  return names;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& requested) {
  std::string name = requested.empty() ? cfg.experiment : requested;
  if (name.rfind("lab:", 0) == 0) name = name.substr(4);
  if (name.empty()) fail(ErrorKind::kInvalidConfig, "no experiment named (config.experiment or argument)");
  if (std::find(experiment_names().begin(), experiment_names().end(), name) == experiment_names().end()) {
    fail(ErrorKind::kInvalidConfig, "unknown experiment '" + name + "'");
  }
  if (cfg.threads) set_thread_count(cfg.threads);

  Run run{cfg, {}, json::object()};
  run.out.experiment = name;
  if (!validate_inputs(run) || name == "validate") {
    run_validate(run);
    return run.out;
  }
  static const std::map<std::string, std::function<void(LabRun&)>> lab = {
      {"harnack", lab_harnack}, {"carleson", lab_carleson}, {"prop1", lab_prop1}, {"bhp", lab_bhp},
      {"lemma2", lab_lemma2},   {"decay", lab_decay},       {"growth", lab_growth}, {"lateral", lab_lateral}};
  if (auto it = lab.find(name); it != lab.end()) {
    LabRun l{run, {}};
    l.rep.experiment = name;
    it->second(l);
    l.finish();
  } else if (name == "solve") {
    run_solve(run);
  } else if (name == "mc") {
    run_mc(run);
  } else if (name == "construct") {
    run_construct(run);
  } else if (name == "martin") {
    run_martin(run);
  } else if (name == "uniq") {
    run_uniq(run);
  }
  return run.out;
}

}  // namespace lipwalk
