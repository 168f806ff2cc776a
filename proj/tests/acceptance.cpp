// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// numbers and wall time. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lipwalk/dirichlet.hpp"
#include "lipwalk/harmonic.hpp"
#include "lipwalk/lab.hpp"
#include "lipwalk/monte_carlo.hpp"
#include "oracle.hpp"

using namespace lipwalk;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    o.pass = false;
    o.detail += "; over the time budget of " + std::to_string(static_cast<int>(budget_s)) + " s";
  }
  failures += o.pass ? 0 : 1;
  std::printf("[%s] %2d %s | %s | %.1f s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

const LatticePoint kOrigin{0, 0};

LipschitzDomain flat2() { return {LipschitzProfile::flat(2), StepSet::nearest_neighbour(2)}; }
LipschitzDomain cone2() { return {LipschitzProfile::cone(2, Rational(1)), StepSet::nearest_neighbour(2)}; }

struct Family {
  std::string name;
  TransitionKernel kernel;
  LipschitzDomain domain;
};

std::vector<Family> families() {
  auto srw = TransitionKernel::simple_random_walk(2);
  auto per = oracle::parity_kernel();
  return {{"srw/flat", srw, flat2()}, {"srw/cone", srw, cone2()}, {"periodic/flat", per, flat2()},
          {"periodic/cone", per, cone2()}};
}

// 1 -------------------------------------------------------------------------
Outcome solver_vs_dense() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto steps9 = [] {
    std::vector<LatticePoint> s;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        if (a || b) s.push_back(LatticePoint{a, b});
    return StepSet(s);
  }();
  // King-move kernel: axis steps 0.15, diagonals 0.1 (centered by symmetry).
  std::vector<double> kw;
  for (const auto& e : steps9) kw.push_back(e[0] && e[1] ? 0.1 : 0.15);
  std::vector<TransitionKernel> kernels = {TransitionKernel::simple_random_walk(2), oracle::parity_kernel(),
                                           TransitionKernel::cosine(2, 0.6, {0.7, 1.3}),
                                           TransitionKernel::homogeneous(steps9, kw, 0.1)};
  std::vector<LipschitzProfile> profiles = {
      LipschitzProfile::flat(2), LipschitzProfile::cone(2, Rational(1)), LipschitzProfile::cone(2, Rational(-1, 2)),
      LipschitzProfile::table(2, 3, {Rational(2), Rational(1), Rational(1, 2), Rational(0), Rational(1), Rational(1),
                                     Rational(3, 2)}, 1.0)};
  double worst = 0;
  std::size_t biggest = 0;
  const int instances = 24;
  for (int t = 0; t < instances; ++t) {
    const auto& k = kernels[static_cast<std::size_t>(t) % kernels.size()];
    LipschitzDomain dom(profiles[static_cast<std::size_t>(t / 4) % profiles.size()], k.steps());
    // a ball of random radius intersected with C, with a few points removed
    const std::int64_t R = 6 + static_cast<std::int64_t>(rng() % 10);
    PointSet ball = enumerate_region(Region::ball(LatticePoint{static_cast<std::int64_t>(rng() % 5), 0}, Rational(R)), dom);
    std::vector<LatticePoint> keep;
    for (const auto& p : ball)
      if (rng() % 10) keep.push_back(p);
    while (keep.size() > 500) keep.pop_back();
    PointSet in(keep);
    biggest = std::max(biggest, in.size());
    PointSet bd = boundary(in, k.steps());
    std::vector<double> g;
    for (std::size_t i = 0; i < bd.size(); ++i) g.push_back(u(rng));
    DirichletProblem p(in, k, Field(bd, g));
    Field a = solve_dirichlet(p, {1e-10, SolveMethod::kIterative});
    Field b = solve_dirichlet(p, {1e-10, SolveMethod::kDense});
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  }
  return {worst <= 1e-10, std::to_string(instances) + " instances, largest |I| = " + std::to_string(biggest) +
                              ", max |iterative - dense| = " + fmt(worst) + " (limit 1e-10)"};
}

// 2 -------------------------------------------------------------------------
Outcome gamblers_ruin() {
  auto k = TransitionKernel::simple_random_walk(1);
  double worst = 0;
  for (std::int64_t N : {10, 100}) {
    std::vector<LatticePoint> pts;
    for (std::int64_t x = 1; x < N; ++x) pts.push_back(LatticePoint{x});
    Field h = harmonic_measure(PointSet(pts), k, PointSet({LatticePoint{N}}));
    for (std::int64_t x = 1; x < N; ++x) worst = std::max(worst, std::fabs(h.at(LatticePoint{x}) - double(x) / double(N)));
  }
  return {worst <= 1e-12, "N in {10, 100}, default tolerance, max |h - x/N| = " + fmt(worst) + " (limit 1e-12)"};
}

// 3 -------------------------------------------------------------------------
Outcome half_space_truth() {
  auto c = flat2();
  auto k = TransitionKernel::simple_random_walk(2);
  Construction res = construct_harmonic(ExhaustionSchedule::standard(2, {16, 32, 64}), c, k);
  double worst = 0;
  for (const auto& x : enumerate_region(Region::ball(kOrigin, Rational(8)), c))
    worst = std::max(worst, std::fabs(res.candidate.field.at(x) / (double(x[0]) / 8.0) - 1.0));
  std::vector<double> log;
  for (const auto& e : res.log) log.push_back(e.deviation);
  return {worst <= 1e-3, "R = 64, max relative error vs x1/8 on C∩B_8 = " + fmt(worst) + " (limit 1e-3), log " + list(log)};
}

// 4 -------------------------------------------------------------------------
struct McCase {
  std::string name;
  TransitionKernel kernel;
  PointSet region;
  PointSet target;
  LatticePoint start;
  double exact;
};

std::vector<McCase> mc_cases() {
  std::vector<McCase> out;
  auto srw1 = TransitionKernel::simple_random_walk(1);
  {
    std::vector<LatticePoint> pts;
    for (int x = 1; x <= 9; ++x) pts.push_back(LatticePoint{x});
    out.push_back({"ruin 3/10", srw1, PointSet(pts), PointSet({LatticePoint{10}}), LatticePoint{3}, 0.3});
    out.push_back({"ruin 5/10", srw1, PointSet(pts), PointSet({LatticePoint{10}}), LatticePoint{5}, 0.5});
  }
  for (const auto& f : families()) {
    for (auto [K, r, start] : {std::tuple{4, 3, LatticePoint{2, 1}}, std::tuple{3, 4, LatticePoint{4, 0}}}) {
      auto geo = collar_geometry(kOrigin, Rational(K), Rational(r), f.domain);
      ExitSplit s = exit_split(kOrigin, Rational(K), Rational(r), f.domain, f.kernel);
      out.push_back({f.name + " collar K=" + std::to_string(K) + " r=" + std::to_string(r) + " top", f.kernel, geo.collar,
                     geo.top, start, s.top.at(start)});
    }
  }
  return out;
}

Outcome mc_consistency() {
  auto cases = mc_cases();
  int reruns = 0;
  std::vector<double> zs;
  bool ok = true;
  std::string bad;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    for (std::uint64_t attempt = 0;; ++attempt) {
      SimulationConfig cfg{c.kernel, c.start, c.region};
      cfg.n_paths = 100000;
      cfg.seed = 1000 + i + 7919 * attempt;
      cfg.threads = 0;
      auto e = estimate_exit_probability(cfg, c.target);
      const double z = std::fabs(e.point_estimate - c.exact) / std::max(e.half_width_95, 1e-300);
      if (z <= 3.0 || (e.half_width_95 == 0 && e.point_estimate == c.exact)) {
        zs.push_back(z);
        break;
      }
      if (reruns == 0) {
        ++reruns;
        continue;
      }
      ok = false;
      bad += " " + c.name + " off by " + fmt(z) + " half-widths;";
      zs.push_back(z);
      break;
    }
  }
  double worst = 0;
  for (double z : zs) worst = std::max(worst, z);
  ok = ok && cases.size() == 10;
  return {ok, std::to_string(cases.size()) + " instances x 1e5 paths, worst |mc - solver| = " + fmt(worst) +
                  " half-widths (limit 3), reruns used " + std::to_string(reruns) + "/1" + bad};
}

// 5 -------------------------------------------------------------------------
Outcome harnack_uniformity() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, k] : {std::pair{std::string("srw"), TransitionKernel::simple_random_walk(2)},
                                std::pair{std::string("periodic"), oracle::parity_kernel()}}) {
    std::vector<double> cs;
    double local = 0;
    for (int R : {4, 8, 16}) {
      HarnackResult h = harnack_constant(kOrigin, Rational(R), k);
      cs.push_back(h.constant.value);
      local = std::max(local, h.local.value);
    }
    const double band = band_ratio(cs);
    ok = ok && band <= kUniformityBand && local <= 1.0 / k.alpha() * (1 + 1e-12);
    detail += name + ": C(4,8,16) = " + list(cs) + " band " + fmt(band) + ", one-step max " + fmt(local) +
              " <= 1/alpha = " + fmt(1.0 / k.alpha()) + "; ";
  }
  return {ok, detail};
}

// 6 -------------------------------------------------------------------------
Outcome prop1() {
  bool ok = true;
  std::string detail;
  for (const auto& f : families()) {
    std::vector<double> v;
    for (int R : {8, 16}) v.push_back(prop1_contraction(kOrigin, R, f.domain, f.kernel).value);
    for (double x : v) ok = ok && x < 0.999;
    detail += f.name + " rho(8,16) = " + list(v) + "; ";
  }
  return {ok, detail + "limit 0.999"};
}

// 7 -------------------------------------------------------------------------
Outcome carleson() {
  bool ok = true;
  std::string detail;
  for (const auto& f : families()) {
    std::vector<double> v;
    for (int R : {8, 16, 32}) v.push_back(carleson_constant(kOrigin, R, f.domain, f.kernel).value);
    const double band = band_ratio(v);
    ok = ok && band <= kUniformityBand;
    detail += f.name + " " + list(v) + " band " + fmt(band) + "; ";
  }
  return {ok, detail};
}

// 8 -------------------------------------------------------------------------
Outcome lemma2() {
  bool ok = true;
  std::string detail;
  auto k = TransitionKernel::simple_random_walk(2);
  for (const auto& [name, dom] : {std::pair{std::string("flat"), flat2()}, std::pair{std::string("cone"), cone2()}}) {
    OnsetResult r = lemma2_sweep(kOrigin, Rational(4), dom, k, {Rational(2), Rational(4), Rational(8), Rational(16)});
    std::vector<double> ratios;
    for (const auto& row : r.table) ratios.push_back(row.min_ratio);
    const bool found = r.onset.has_value() && *r.onset <= Rational(16);
    ok = ok && found && ratios.back() >= ratios.front();
    detail += name + ": onset K = " + (r.onset ? r.onset->to_string() : std::string("none")) + ", min ratio " + list(ratios) + "; ";
  }
  return {ok, detail + "r = 4"};
}

// 9 -------------------------------------------------------------------------
Outcome boundary_harnack() {
  bool ok = true;
  std::string detail;
  auto k = TransitionKernel::simple_random_walk(2);
  for (const auto& [name, dom] : {std::pair{std::string("flat"), flat2()}, std::pair{std::string("cone"), cone2()}}) {
    std::vector<double> v;
    for (int R : {4, 8}) v.push_back(boundary_harnack_constant(kOrigin, R, 4, dom, k).value);
    const double band = band_ratio(v);
    ok = ok && std::isfinite(v[0]) && std::isfinite(v[1]) && band <= kUniformityBand;
    detail += name + " K=4 " + list(v) + " band " + fmt(band) + "; ";
  }
  // Rescaling: columns at R = 4, K = 4 on the half-plane.
  const std::int64_t R = 4, K = 4;
  auto c = flat2();
  PointSet region = enumerate_region(Region::ball(kOrigin, Rational(R)), c);
  LatticePoint anchor = boundary_anchor(kOrigin, R, c);
  std::vector<LatticePoint> ev(region.begin(), region.end());
  if (!region.contains(anchor)) ev.push_back(anchor);
  const Rational kr2(K * K * R * R);
  HarmonicBasis basis = vanishing_basis(kOrigin, kr2 * Rational(9), kr2 * Rational(4), c, k, PointSet(ev));
  const double base = boundary_harnack_from(basis, region, anchor).value;
  bool exact = true;
  double drift = 0;
  for (double f : {2.0, 0.125, 1024.0}) {
    HarmonicBasis s = basis;
    for (std::size_t j = 0; j < s.columns(); j += 2) s.scale_column(j, f);
    exact = exact && boundary_harnack_from(s, region, anchor).value == base;
  }
  for (double f : {7.0, 0.3}) {
    HarmonicBasis s = basis;
    for (std::size_t j = 1; j < s.columns(); j += 2) s.scale_column(j, f);
    drift = std::max(drift, std::fabs(boundary_harnack_from(s, region, anchor).value / base - 1));
  }
  ok = ok && exact && drift <= 1e-14;
  detail += "rescale by 2^k bit-exact: " + std::string(exact ? "yes" : "no") + ", by 7 and 0.3 rel. change " + fmt(drift);
  return {ok, detail};
}

// 10 ------------------------------------------------------------------------
Outcome lateral() {
  bool ok = true;
  std::string detail;
  auto k = TransitionKernel::simple_random_walk(2);
  for (const auto& [name, dom] : {std::pair{std::string("flat"), flat2()}, std::pair{std::string("cone"), cone2()}}) {
    LateralResult r = lateral_decay(kOrigin, Rational(4), dom, k, {Rational(2), Rational(4), Rational(8), Rational(16)});
    std::vector<double> mv;
    for (const auto& row : r.table) mv.push_back(row.max_v);
    ok = ok && r.slope < 0 && r.worst_step_slope <= -0.1;
    detail += name + ": max v " + list(mv) + ", slope " + fmt(r.slope) + ", worst step " + fmt(r.worst_step_slope) + "; ";
  }
  return {ok, detail + "step limit -0.1"};
}

// 11 ------------------------------------------------------------------------
Outcome martin() {
  auto c = flat2();
  auto k = TransitionKernel::simple_random_walk(2);
  const LatticePoint x0{8, 0};
  Construction h = construct_harmonic(ExhaustionSchedule::standard(2, {16, 32, 64, 128}), c, k);
  PointSet eval = enumerate_region(Region::ball(kOrigin, Rational(4)), c);
  bool ok = true;
  std::string detail;
  for (const auto& dir : {LatticePoint{1, 0}, LatticePoint{1, 1}}) {
    std::vector<LatticePoint> ys;
    for (int n : {8, 16, 32, 64}) ys.push_back(dir * n);
    auto col = martin_collapse(ys, eval, h.candidate.field, c, k, kOrigin, x0);
    std::vector<double> dev;
    bool dec = true;
    for (std::size_t i = 0; i < col.size(); ++i) {
      dev.push_back(col[i].deviation);
      if (i > 0) dec = dec && col[i].deviation < col[i - 1].deviation;
    }
    const bool this_ok = dec && dev.back() < 0.05;
    ok = ok && this_ok;
    detail += "y_n = n" + dir.to_string() + ": " + list(dev) + (this_ok ? "" : " (fails)") + "; ";
  }
  return {ok, detail + "limit 0.05 at n = 64"};
}

// 12 ------------------------------------------------------------------------
Outcome uniqueness(OuterData a, OuterData b) {
  auto c = flat2();
  auto k = TransitionKernel::simple_random_walk(2);
  const LatticePoint x0{8, 0};
  PointSet inner = enumerate_region(Region::ball(kOrigin, Rational(8)), c);
  std::vector<double> dev;
  for (std::int64_t R : {64, 128}) {
    auto ha = harmonic_candidate(c, k, kOrigin, R, x0, a);
    auto hb = harmonic_candidate(c, k, kOrigin, R, x0, b);
    dev.push_back(uniqueness_check({ha, hb}, inner, x0).max_deviation);
  }
  const bool ok = dev[0] <= 1e-2 && dev[1] < dev[0];
  return {ok, to_string(a) + " vs " + to_string(b) + ": deviation at R = 64, 128: " + list(dev) + " (limit 1e-2 at 64, must shrink)"};
}

}  // namespace

int main() {
  criterion(1, "solver vs dense oracle", 60, solver_vs_dense);
  criterion(2, "gambler's ruin", 0, gamblers_ruin);
  criterion(3, "half-space ground truth", 120, half_space_truth);
  criterion(4, "Monte Carlo consistency", 0, mc_consistency);
  criterion(5, "Harnack uniformity", 0, harnack_uniformity);
  criterion(6, "contraction below one", 0, prop1);
  criterion(7, "Carleson uniformity", 0, carleson);
  criterion(8, "collar exit onset", 0, lemma2);
  criterion(9, "boundary Harnack", 0, boundary_harnack);
  criterion(10, "lateral decay", 0, lateral);
  criterion(11, "Martin collapse", 300, martin);
  criterion(12, "uniqueness", 0, [] { return uniqueness(OuterData::kCap, OuterData::kHeight); });
  // Extra, not a criterion of its own: the full-sphere data pair.
  {
    Outcome o = uniqueness(OuterData::kCap, OuterData::kSphere);
    std::printf("[INFO] 12 uniqueness, extra pair | %s\n", o.detail.c_str());
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
