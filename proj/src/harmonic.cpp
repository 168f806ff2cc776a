#include "lipwalk/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lipwalk/error.hpp"

namespace lipwalk {

std::string to_string(OuterData d) {
  switch (d) {
    case OuterData::kCap: return "cap";
    case OuterData::kSphere: return "sphere";
    case OuterData::kHeight: return "height";
  }
  return "?";
}

OuterData parse_outer_data(const std::string& s) {
  if (s == "cap") return OuterData::kCap;
  if (s == "sphere") return OuterData::kSphere;
  if (s == "height") return OuterData::kHeight;
  fail(ErrorKind::kInvalidArgument, "unknown outer data '" + s + "' (expected cap, sphere or height)");
}

ExhaustionSchedule ExhaustionSchedule::standard(int dim, std::vector<std::int64_t> radii) {
  ExhaustionSchedule s;
  s.radii = std::move(radii);
  s.anchor = LatticePoint(dim);
  s.reference = LatticePoint::unit(dim, 0) * kDefaultReferenceHeight;
  return s;
}

HarmonicCandidate harmonic_candidate(const LipschitzDomain& domain, const TransitionKernel& kernel,
                                     const LatticePoint& anchor, std::int64_t radius, const LatticePoint& reference,
                                     OuterData data, const SolveOptions& opts) {
  if (radius < 1) fail(ErrorKind::kInvalidRegion, "window radius must be at least 1");
  PointSet interior = enumerate_region(Region::ball(anchor, Rational(radius)), domain);
  auto iref = interior.find(reference);
  if (!iref) {
    fail(ErrorKind::kInvalidArgument,
         "reference " + reference.to_string() + " is not inside the window of radius " + std::to_string(radius));
  }
  DirichletOperator op(interior, kernel);
  const PointSet& bd = op.boundary();
  std::vector<double> g(bd.size(), 0.0);
  const Rational half(radius, 2);
  for (std::size_t i = 0; i < bd.size(); ++i) {
    const LatticePoint& z = bd[i];
    if (!domain.contains(z)) continue;
    switch (data) {
      case OuterData::kSphere: g[i] = 1.0; break;
      case OuterData::kCap: g[i] = domain.height(z) >= half ? 1.0 : 0.0; break;
      case OuterData::kHeight: g[i] = domain.height(z).to_double(); break;
    }
  }
  HarmonicCandidate c;
  auto u = op.solve(op.rhs(g), opts, &c.solve);
  const double norm = u[*iref];
  if (!(norm > 0.0)) fail(ErrorKind::kDegenerateCandidate, "candidate vanishes at the reference point");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) {
      fail(ErrorKind::kDegenerateCandidate, "candidate is not positive at " + interior[i].to_string());
    }
  }
  PointSet all = interior.set_union(bd);
  std::vector<double> values(all.size());
  for (std::size_t i = 0; i < interior.size(); ++i) values[*all.find(interior[i])] = u[i] / norm;
  for (std::size_t i = 0; i < bd.size(); ++i) values[*all.find(bd[i])] = g[i] / norm;
  c.field = Field(std::move(all), std::move(values));
  c.window_radius = radius;
  c.anchor = anchor;
  c.reference = reference;
  c.data = data;
  c.interior_size = interior.size();
  c.solve.residual = op.max_abs_L(u, g) / norm;
  return c;
}

Construction construct_harmonic(const ExhaustionSchedule& s, const LipschitzDomain& domain,
                                const TransitionKernel& kernel, const SolveOptions& opts) {
  if (s.radii.empty()) fail(ErrorKind::kInvalidArgument, "exhaustion schedule has no radii");
  for (std::size_t i = 1; i < s.radii.size(); ++i) {
    if (s.radii[i] <= s.radii[i - 1]) fail(ErrorKind::kInvalidArgument, "exhaustion radii must increase strictly");
  }
  if (!domain.on_boundary(s.anchor)) fail(ErrorKind::kInvalidAnchor, "anchor " + s.anchor.to_string() + " is not on ∂C");
  if (!domain.contains(s.reference)) {
    fail(ErrorKind::kInvalidAnchor, "reference " + s.reference.to_string() + " is not in C");
  }
  const std::int64_t inner_r = s.inner_radius > 0 ? s.inner_radius : s.radii.front();
  if (inner_r > s.radii.front()) fail(ErrorKind::kInvalidArgument, "inner window exceeds the smallest radius");
  if (Rational(distance_sq(s.reference, s.anchor)) > Rational(s.radii.front()) * Rational(s.radii.front())) {
    fail(ErrorKind::kInvalidArgument, "reference lies outside the smallest window");
  }
  const PointSet inner = enumerate_region(Region::ball(s.anchor, Rational(inner_r)), domain);

  Construction out;
  std::optional<HarmonicCandidate> prev;
  for (std::int64_t R : s.radii) {
    HarmonicCandidate cur = harmonic_candidate(domain, kernel, s.anchor, R, s.reference, s.data, opts);
    out.residuals.push_back(cur.solve.residual);
    if (prev) {
      ConvergenceEntry e{prev->window_radius, R, 0.0, s.anchor};
      for (const auto& p : inner) {
        double dev = std::fabs(cur.field.at(p) / prev->field.at(p) - 1.0);
        if (dev > e.deviation) {
          e.deviation = dev;
          e.witness = p;
        }
      }
      out.log.push_back(e);
    }
    prev = std::move(cur);
  }
  out.candidate = std::move(*prev);

  // Deviations at the solver's noise level carry no trend.
  const double noise = 1e4 * opts.tol;
  for (std::size_t i = 1; i < out.log.size(); ++i) {
    if (out.log[i].deviation >= out.log[i - 1].deviation && out.log[i - 1].deviation > noise) {
      std::ostringstream msg;
      msg << "deviation did not decrease across radii " << out.log[i - 1].radius_from << ", "
          << out.log[i].radius_from << ", " << out.log[i].radius_to << ": " << out.log[i - 1].deviation << " then "
          << out.log[i].deviation;
      fail(ErrorKind::kNonConvergence, msg.str());
    }
  }
  return out;
}

Region martin_window(const LatticePoint& y, const LatticePoint& anchor) {
  return Region::ball_sq(anchor, Rational(16 * distance_sq(y, anchor)));
}

MartinResult martin_kernel_field(const LatticePoint& y, const PointSet& eval, const Region& window,
                                 const LipschitzDomain& domain, const TransitionKernel& kernel,
                                 const LatticePoint& x0, const SolveOptions& opts) {
  PointSet interior = enumerate_region(window, domain);
  for (const LatticePoint* p : {&y, &x0}) {
    if (!interior.contains(*p)) {
      fail(ErrorKind::kInvalidArgument, p->to_string() + " is not inside the window " + window.describe());
    }
  }
  for (const auto& p : eval) {
    if (!interior.contains(p)) fail(ErrorKind::kInvalidArgument, p.to_string() + " is not inside the window");
  }
  Field g = green_from(interior, kernel, y, opts);
  const double den = g.at(x0);
  if (!(den > 0.0)) {
    fail(ErrorKind::kUnreachableReference, "G from " + y.to_string() + " to the reference " + x0.to_string() + " is 0");
  }
  std::vector<double> v(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) v[i] = g.at(eval[i]) / den;
  return {Field(eval, std::move(v)), window.describe(), interior.size()};
}

double martin_kernel(const LatticePoint& y, const LatticePoint& x, const Region& window,
                     const LipschitzDomain& domain, const TransitionKernel& kernel, const LatticePoint& x0,
                     const SolveOptions& opts) {
  if (x == x0) {
    // Still validate the inputs through the general path.
    martin_kernel_field(y, PointSet({x}), window, domain, kernel, x0, opts);
    return 1.0;
  }
  return martin_kernel_field(y, PointSet({x}), window, domain, kernel, x0, opts).values[0];
}

std::vector<CollapseEntry> martin_collapse(const std::vector<LatticePoint>& ys, const PointSet& eval,
                                           const Field& h, const LipschitzDomain& domain,
                                           const TransitionKernel& kernel, const LatticePoint& anchor,
                                           const LatticePoint& x0, const SolveOptions& opts) {
  std::vector<CollapseEntry> out;
  for (const auto& y : ys) {
    Region window = martin_window(y, anchor);
    MartinResult m = martin_kernel_field(y, eval, window, domain, kernel, x0, opts);
    CollapseEntry e{y, 0.0, eval.empty() ? y : eval[0], m.window};
    for (std::size_t i = 0; i < eval.size(); ++i) {
      double dev = std::fabs(m.values[i] / h.at(eval[i]) - 1.0);
      if (dev > e.deviation) {
        e.deviation = dev;
        e.witness = eval[i];
      }
    }
    out.push_back(e);
  }
  return out;
}

UniquenessReport uniqueness_check(const std::vector<HarmonicCandidate>& candidates, const PointSet& inner,
                                  const LatticePoint& x0) {
  if (candidates.size() < 2) fail(ErrorKind::kInvalidArgument, "uniqueness check needs at least two candidates");
  std::vector<std::vector<double>> v(candidates.size(), std::vector<double>(inner.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Field& f = candidates[c].field;
    const double n0 = f.at(x0);
    if (!(n0 > 0.0)) fail(ErrorKind::kDegenerateCandidate, "candidate " + std::to_string(c) + " vanishes at x0");
    for (std::size_t i = 0; i < inner.size(); ++i) {
      v[c][i] = f.at(inner[i]) / n0;
      if (!(v[c][i] > 0.0)) {
        fail(ErrorKind::kDegenerateCandidate,
             "candidate " + std::to_string(c) + " is not positive at " + inner[i].to_string());
      }
    }
  }
  UniquenessReport rep;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    for (std::size_t b = a + 1; b < candidates.size(); ++b) {
      PairDeviation pd{a, b, 0.0, x0};
      for (std::size_t i = 0; i < inner.size(); ++i) {
        double dev = std::fabs(v[a][i] / v[b][i] - 1.0);
        if (dev > pd.deviation) {
          pd.deviation = dev;
          pd.witness = inner[i];
        }
      }
      rep.max_deviation = std::max(rep.max_deviation, pd.deviation);
      rep.pairs.push_back(pd);
    }
  }
  return rep;
}

}  // namespace lipwalk
