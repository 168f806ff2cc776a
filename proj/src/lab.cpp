#include "lipwalk/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lipwalk/error.hpp"

namespace lipwalk {

void HarmonicBasis::scale_column(std::size_t s, double c) {
  for (std::size_t e = 0; e < eval.size(); ++e) (*this)(e, s) *= c;
}

HarmonicBasis harmonic_basis(const PointSet& window, const TransitionKernel& kernel,
                             const std::function<bool(const LatticePoint&)>& allowed, const PointSet& eval) {
  HarmonicBasis b;
  DirichletOperator op(window, kernel);
  b.window = window;
  b.boundary = op.boundary();
  b.eval = eval;
  for (std::size_t i = 0; i < b.boundary.size(); ++i) {
    if (allowed(b.boundary[i])) b.sources.push_back(i);
  }
  std::vector<std::size_t> rows;
  rows.reserve(eval.size());
  for (const auto& p : eval) {
    auto i = window.find(p);
    if (!i) fail(ErrorKind::kInvalidArgument, "evaluation point " + p.to_string() + " is outside the window");
    rows.push_back(*i);
  }
  b.values = harmonic_measure_matrix(op, rows, b.sources);
  return b;
}

namespace {

std::size_t eval_index(const HarmonicBasis& b, const LatticePoint& p) {
  auto i = b.eval.find(p);
  if (!i) fail(ErrorKind::kInvalidArgument, p.to_string() + " is not an evaluation point");
  return *i;
}

PointSet with_point(const PointSet& s, const LatticePoint& p) {
  if (s.contains(p)) return s;
  return s.set_union(PointSet({p}));
}

}  // namespace

// --- Interior Harnack -------------------------------------------------------

Measurement local_harnack_from(const HarmonicBasis& basis, const TransitionKernel& kernel) {
  Measurement m;
  m.value = 0.0;
  const auto& steps = kernel.steps();
  for (std::size_t z = 0; z < basis.eval.size(); ++z) {
    const LatticePoint& zeta = basis.eval[z];
    for (const auto& e : steps) {
      if (e.is_zero()) continue;
      auto xi = basis.eval.find(zeta + e);
      if (!xi) continue;
      for (std::size_t s = 0; s < basis.columns(); ++s) {
        const double den = basis(z, s);
        if (!(den > 0.0)) fail(ErrorKind::kDegenerate, "basis function vanishes at " + zeta.to_string());
        const double r = basis(*xi, s) / den;
        if (r > m.value) {
          m.value = r;
          m.witness = {basis.source(s), zeta + e, zeta};
        }
      }
    }
  }
  return m;
}

Measurement local_harnack_constant(const PointSet& window, const TransitionKernel& kernel) {
  auto basis = harmonic_basis(window, kernel, [](const LatticePoint&) { return true; }, window);
  return local_harnack_from(basis, kernel);
}

HarnackResult harnack_constant(const LatticePoint& y, const Rational& R, const TransitionKernel& kernel) {
  if (R < Rational(1)) fail(ErrorKind::kInvalidRegion, "Harnack radius must be at least 1");
  const PointSet window = enumerate_region(Region::ball(y, R * Rational(2)));
  const PointSet inner = enumerate_region(Region::ball(y, R));
  auto basis = harmonic_basis(window, kernel, [](const LatticePoint&) { return true; }, window);

  HarnackResult res;
  res.window_size = window.size();
  res.basis_size = basis.columns();
  res.inverse_alpha = 1.0 / kernel.alpha();
  std::vector<std::size_t> rows;
  for (const auto& p : inner) rows.push_back(eval_index(basis, p));
  for (std::size_t s = 0; s < basis.columns(); ++s) {
    double hi = -1.0, lo = std::numeric_limits<double>::infinity();
    std::size_t ih = 0, il = 0;
    for (std::size_t r : rows) {
      double v = basis(r, s);
      if (v > hi) hi = v, ih = r;
      if (v < lo) lo = v, il = r;
    }
    if (!(lo > 0.0)) {
      fail(ErrorKind::kDegenerate, "basis function of " + basis.source(s).to_string() + " vanishes on B_R");
    }
    if (hi / lo > res.constant.value) {
      res.constant.value = hi / lo;
      res.constant.witness = {basis.source(s), basis.eval[ih], basis.eval[il]};
    }
  }
  res.local = local_harnack_from(basis, kernel);
  return res;
}

// --- Boundary estimates -----------------------------------------------------

HarmonicBasis vanishing_basis(const LatticePoint& y, const Rational& outer_sq, const Rational& vanish_sq,
                              const LipschitzDomain& domain, const TransitionKernel& kernel, const PointSet& eval) {
  const PointSet window = enumerate_region(Region::ball_sq(y, outer_sq), domain);
  const Region vanish = Region::ball_sq(y, vanish_sq);
  return harmonic_basis(
      window, kernel, [&](const LatticePoint& z) { return domain.contains(z) || !vanish.in_outer(z); }, eval);
}

LatticePoint boundary_anchor(const LatticePoint& y, std::int64_t R, const LipschitzDomain& domain) {
  LatticePoint a = y + LatticePoint::unit(y.dim(), 0) * R;
  if (!domain.contains(a)) fail(ErrorKind::kInvalidAnchor, "anchor " + a.to_string() + " is not in C");
  return a;
}

Measurement carleson_from(const HarmonicBasis& basis, const PointSet& region, const LatticePoint& anchor) {
  const std::size_t ia = eval_index(basis, anchor);
  std::vector<std::size_t> rows;
  for (const auto& p : region) rows.push_back(eval_index(basis, p));
  Measurement m;
  for (std::size_t s = 0; s < basis.columns(); ++s) {
    const double ua = basis(ia, s);
    if (!(ua > 0.0)) fail(ErrorKind::kDegenerate, "basis function vanishes at the anchor");
    for (std::size_t r : rows) {
      const double q = basis(r, s) / ua;
      if (q > m.value) {
        m.value = q;
        m.witness = {basis.source(s), basis.eval[r]};
      }
    }
  }
  return m;
}

double carleson_ratio(const Field& u, const PointSet& region, const LatticePoint& anchor) {
  const double ua = u.at(anchor);
  if (!(ua > 0.0)) fail(ErrorKind::kDegenerate, "field vanishes at the anchor");
  double best = 0.0;
  for (const auto& p : region) best = std::max(best, u.at(p) / ua);
  return best;
}

Measurement carleson_constant(const LatticePoint& y, std::int64_t R, const LipschitzDomain& domain,
                              const TransitionKernel& kernel) {
  if (R < 1) fail(ErrorKind::kInvalidRegion, "Carleson radius must be at least 1");
  const LatticePoint a = boundary_anchor(y, R, domain);
  const PointSet region = enumerate_region(Region::ball(y, Rational(R)), domain);
  const Rational r2(R * R);
  auto basis = vanishing_basis(y, r2 * Rational(9), r2 * Rational(4), domain, kernel, with_point(region, a));
  return carleson_from(basis, region, a);
}

Measurement prop1_contraction(const LatticePoint& y, std::int64_t R, const LipschitzDomain& domain,
                              const TransitionKernel& kernel) {
  if (R < 1) fail(ErrorKind::kInvalidRegion, "radius must be at least 1");
  const int d = domain.dim();
  const Rational r2(R * R);
  const Rational outer_sq = r2 * Rational(9 * d);
  const Rational mid_sq = r2 * Rational(4 * d);
  const PointSet window = enumerate_region(Region::ball_sq(y, outer_sq), domain);
  const PointSet small_closure = closure(enumerate_region(Region::ball(y, Rational(R)), domain), domain.steps());
  const PointSet mid_closure = closure(enumerate_region(Region::ball_sq(y, mid_sq), domain), domain.steps());
  const PointSet eval = mid_closure.set_intersection(window);
  auto basis = vanishing_basis(y, outer_sq, mid_sq, domain, kernel, eval);

  // Closure points outside the window are boundary points of it; a basis
  // function equals 1 at its own source there and 0 elsewhere.
  auto closure_max = [&](const PointSet& cl, std::size_t s, LatticePoint& arg) {
    double best = 0.0;
    arg = cl.empty() ? y : cl[0];
    for (const auto& p : cl) {
      double v;
      if (auto i = basis.eval.find(p)) {
        v = basis(*i, s);
      } else {
        v = p == basis.source(s) ? 1.0 : 0.0;
      }
      if (v > best) best = v, arg = p;
    }
    return best;
  };
  Measurement m;
  for (std::size_t s = 0; s < basis.columns(); ++s) {
    LatticePoint ai, ao;
    const double inner = closure_max(small_closure, s, ai);
    const double outer = closure_max(mid_closure, s, ao);
    if (!(outer > 0.0)) fail(ErrorKind::kDegenerate, "basis function vanishes on the middle ball");
    if (inner / outer > m.value) {
      m.value = inner / outer;
      m.witness = {basis.source(s), ai, ao};
    }
  }
  m.extra["margin"] = 1.0 - m.value;
  m.extra["basis_size"] = static_cast<double>(basis.columns());
  m.extra["window_size"] = static_cast<double>(window.size());
  return m;
}

Measurement boundary_harnack_from(const HarmonicBasis& basis, const PointSet& region, const LatticePoint& anchor) {
  const std::size_t ia = eval_index(basis, anchor);
  const std::size_t m = basis.columns();
  // Normalize every column at the anchor; the pair constant is then
  // max_x max_u û(x) / min_v v̂(x).
  for (std::size_t s = 0; s < m; ++s) {
    if (!(basis(ia, s) > 0.0)) fail(ErrorKind::kDegenerate, "basis function vanishes at the anchor");
  }
  Measurement out;
  out.value = 0.0;
  for (const auto& p : region) {
    const std::size_t r = eval_index(basis, p);
    double hi = -1.0, lo = std::numeric_limits<double>::infinity();
    std::size_t sh = 0, sl = 0;
    for (std::size_t s = 0; s < m; ++s) {
      const double v = basis(r, s) / basis(ia, s);
      if (v > hi) hi = v, sh = s;
      if (v < lo) lo = v, sl = s;
    }
    if (!(lo > 0.0)) fail(ErrorKind::kDegenerate, "basis function vanishes at " + p.to_string());
    if (hi / lo > out.value) {
      out.value = hi / lo;
      out.witness = {basis.source(sh), basis.source(sl), p};
    }
  }
  return out;
}

Measurement boundary_harnack_constant(const LatticePoint& y, std::int64_t R, std::int64_t K,
                                      const LipschitzDomain& domain, const TransitionKernel& kernel) {
  if (R < 1 || K < 1) fail(ErrorKind::kInvalidRegion, "R and K must be at least 1");
  const LatticePoint a = boundary_anchor(y, R, domain);
  const PointSet region = enumerate_region(Region::ball(y, Rational(R)), domain);
  const Rational kr2(K * K * R * R);
  auto basis = vanishing_basis(y, kr2 * Rational(9), kr2 * Rational(4), domain, kernel, with_point(region, a));
  auto m = boundary_harnack_from(basis, region, a);
  m.extra["basis_size"] = static_cast<double>(basis.columns());
  return m;
}

// --- Collar experiments -----------------------------------------------------

OnsetResult lemma2_sweep(const LatticePoint& y, const Rational& r, const LipschitzDomain& domain,
                         const TransitionKernel& kernel, const std::vector<Rational>& K_grid,
                         const SolveOptions& opts) {
  for (std::size_t i = 1; i < K_grid.size(); ++i) {
    if (!(K_grid[i - 1] < K_grid[i])) fail(ErrorKind::kInvalidArgument, "K grid must increase");
  }
  OnsetResult res;
  for (const auto& K : K_grid) {
    ExitSplit s = exit_split(y, K, r, domain, kernel, opts);
    res.table.push_back({K, s.min_ratio, s.argmin});
    if (!res.onset && s.min_ratio >= 1.0) res.onset = K;
  }
  return res;
}

OnsetResult lemma2_onset(const LatticePoint& y, const Rational& r, const LipschitzDomain& domain,
                         const TransitionKernel& kernel, const std::vector<Rational>& K_grid,
                         const SolveOptions& opts) {
  auto res = lemma2_sweep(y, r, domain, kernel, K_grid, opts);
  if (!res.onset) {
    std::ostringstream msg;
    msg << "no K in the grid reaches min p_top/p_side >= 1:";
    for (const auto& row : res.table) msg << " K=" << row.K.to_string() << ":" << row.min_ratio;
    fail(ErrorKind::kOnsetNotFound, msg.str());
  }
  return res;
}

std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorKind::kInsufficientData, "least squares needs two or more points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) fail(ErrorKind::kInsufficientData, "least squares needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

DecayFit fit_decay(const Field& u, const PointSet& points, const LipschitzDomain& domain, const Rational& r) {
  std::map<std::int64_t, double> level_min;
  for (const auto& p : points) {
    const std::int64_t d2 = domain.boundary_distance_sq(p);
    const double v = u.at(p);
    auto [it, fresh] = level_min.emplace(d2, v);
    if (!fresh) it->second = std::min(it->second, v);
  }
  if (level_min.size() < 5) {
    fail(ErrorKind::kInsufficientData,
         "only " + std::to_string(level_min.size()) + " distinct δ levels (need at least 5)");
  }
  DecayFit fit;
  fit.levels = level_min.size();
  const double rr = r.to_double();
  std::vector<double> lx, ly;
  for (const auto& [d2, v] : level_min) {
    if (!(v > 0.0)) fail(ErrorKind::kInsufficientData, "nonpositive value on the decay envelope");
    const double t = std::sqrt(static_cast<double>(d2)) / rr;
    fit.envelope.emplace_back(t, v);
    lx.push_back(std::log(t));
    ly.push_back(std::log(v));
  }
  std::tie(fit.beta, fit.intercept) = least_squares(lx, ly);
  fit.floor = std::numeric_limits<double>::infinity();
  for (const auto& [t, v] : fit.envelope) fit.floor = std::min(fit.floor, v / std::pow(t, fit.beta));
  return fit;
}

DecayFit boundary_decay_profile(const LatticePoint& y, const Rational& r, const LipschitzDomain& domain,
                                const TransitionKernel& kernel, const Rational& K, const SolveOptions& opts) {
  CollarGeometry geo = collar_geometry(y, K, r, domain);
  if (geo.top.empty()) fail(ErrorKind::kInvalidGeometry, "collar has no top exit set");
  Field u = harmonic_measure(geo.collar, kernel, geo.top, collar_options(opts));
  return fit_decay(u, enumerate_region(Region::ball(y, r), domain), domain, r);
}

LateralResult lateral_decay(const LatticePoint& y, const Rational& r, const LipschitzDomain& domain,
                            const TransitionKernel& kernel, const std::vector<Rational>& K_grid,
                            const SolveOptions& opts) {
  if (K_grid.size() < 2) fail(ErrorKind::kInsufficientData, "lateral decay needs at least two K values");
  const PointSet inner = closure(enumerate_region(Region::collar(y, r, r), domain), domain.steps());
  LateralResult res;
  std::vector<double> ks, logs;
  for (const auto& K : K_grid) {
    CollarGeometry geo = collar_geometry(y, K, r, domain);
    if (geo.side.empty()) {
      fail(ErrorKind::kEmptyGeometry, "collar with K = " + K.to_string() + " has no lateral exit set");
    }
    Field v = harmonic_measure(geo.collar, kernel, geo.side, collar_options(opts));
    LateralRow row{K, 0.0, y};
    for (const auto& p : inner) {
      double val = v.contains(p) ? v.at(p) : (geo.side.contains(p) ? 1.0 : 0.0);
      if (val > row.max_v) row.max_v = val, row.argmax = p;
    }
    res.table.push_back(row);
    if (!(row.max_v > 0.0)) fail(ErrorKind::kDegenerate, "lateral harmonic measure vanishes on the inner collar");
    ks.push_back(K.to_double());
    logs.push_back(std::log(row.max_v));
  }
  res.slope = least_squares(ks, logs).first;
  res.worst_step_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ks.size(); ++i) {
    res.worst_step_slope = std::max(res.worst_step_slope, (logs[i] - logs[i - 1]) / (ks[i] - ks[i - 1]));
  }
  return res;
}

GrowthFit interior_growth_exponent(const LatticePoint& y, std::int64_t R, const LipschitzDomain& domain,
                                   const TransitionKernel& kernel) {
  if (R < 1) fail(ErrorKind::kInvalidRegion, "radius must be at least 1");
  const LatticePoint a = boundary_anchor(y, R, domain);
  const PointSet region = enumerate_region(Region::ball(y, Rational(R)), domain);
  const Rational r2(R * R);
  auto basis = vanishing_basis(y, r2 * Rational(9), r2 * Rational(4), domain, kernel, with_point(region, a));
  const std::size_t ia = eval_index(basis, a);
  std::map<std::int64_t, double> level_max;
  for (const auto& p : region) {
    const std::size_t i = eval_index(basis, p);
    double best = 0.0;
    for (std::size_t s = 0; s < basis.columns(); ++s) best = std::max(best, basis(i, s) / basis(ia, s));
    const std::int64_t d2 = domain.boundary_distance_sq(p);
    auto [it, fresh] = level_max.emplace(d2, best);
    if (!fresh) it->second = std::max(it->second, best);
  }
  GrowthFit fit;
  std::vector<double> lx, ly;
  for (const auto& [d2, v] : level_max) {
    const double t = static_cast<double>(R) / std::sqrt(static_cast<double>(d2));
    fit.envelope.emplace_back(t, v);
    lx.push_back(std::log(t));
    ly.push_back(std::log(v));
  }
  if (lx.size() < 2) fail(ErrorKind::kInsufficientData, "growth fit needs two or more δ levels");
  fit.gamma = least_squares(lx, ly).first;
  fit.constant = 0.0;
  for (const auto& [t, v] : fit.envelope) fit.constant = std::max(fit.constant, v / std::pow(t, fit.gamma));
  return fit;
}

double band_ratio(const std::vector<double>& values) {
  if (values.empty()) return 1.0;
  const bool pos = std::all_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
  const bool neg = std::all_of(values.begin(), values.end(), [](double v) { return v < 0.0; });
  if (!pos && !neg) return std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : values) {
    lo = std::min(lo, std::fabs(v));
    hi = std::max(hi, std::fabs(v));
  }
  return hi / lo;
}

}  // namespace lipwalk
