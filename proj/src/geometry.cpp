#include "lipwalk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lipwalk/error.hpp"

namespace lipwalk {

namespace {

// Visits every point of the box lo..hi (inclusive, per coordinate) in
// lexicographic order.
void for_each_in_box(const LatticePoint& lo, const LatticePoint& hi, const std::function<void(const LatticePoint&)>& fn) {
  const int d = lo.dim();
  for (int k = 0; k < d; ++k) {
    if (lo[k] > hi[k]) return;
  }
  LatticePoint p = lo;
  while (true) {
    fn(p);
    int k = d - 1;
    while (k >= 0) {
      if (p[k] < hi[k]) {
        ++p[k];
        break;
      }
      p[k] = lo[k];
      --k;
    }
    if (k < 0) return;
  }
}

std::int64_t isqrt_floor(std::int64_t v) {
  if (v <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

// ∫_a^b of the piecewise-constant slope function, a <= b.
Rational axis_integral(const LipschitzProfile::Axis& axis, const Rational& a, const Rational& b) {
  Rational total(0);
  const auto& bp = axis.breakpoints;
  for (std::size_t i = 0; i <= bp.size(); ++i) {
    // piece i covers [bp[i-1], bp[i])
    Rational lo = a, hi = b;
    if (i > 0 && bp[i - 1] > lo) lo = bp[i - 1];
    if (i < bp.size() && bp[i] < hi) hi = bp[i];
    if (lo < hi) total += axis.slopes[i] * (hi - lo);
  }
  return total;
}

Rational axis_value(const LipschitzProfile::Axis& axis, std::int64_t t) {
  if (t >= 0) return axis_integral(axis, Rational(0), Rational(t));
  return -axis_integral(axis, Rational(t), Rational(0));
}

}  // namespace

// ---------------------------------------------------------------------------
// LipschitzProfile

LipschitzProfile LipschitzProfile::flat(int dim) {
  LatticePoint check(dim);  // validates dim
  LipschitzProfile p;
  p.kind_ = Kind::kFlat;
  p.dim_ = dim;
  return p;
}

LipschitzProfile LipschitzProfile::piecewise_linear(int dim, std::vector<Axis> axes, double lipschitz_constant) {
  LatticePoint check(dim);
  if (static_cast<int>(axes.size()) != dim - 1) {
    fail(ErrorKind::kInvalidProfile, "piecewise-linear profile needs d-1 = " + std::to_string(dim - 1) + " axes");
  }
  double sum_sq = 0.0;
  for (const auto& ax : axes) {
    if (ax.slopes.size() != ax.breakpoints.size() + 1) {
      fail(ErrorKind::kInvalidProfile, "each axis needs one more slope than breakpoints");
    }
    for (std::size_t i = 1; i < ax.breakpoints.size(); ++i) {
      if (!(ax.breakpoints[i - 1] < ax.breakpoints[i])) fail(ErrorKind::kInvalidProfile, "breakpoints must increase");
    }
    double m = 0.0;
    for (const auto& s : ax.slopes) m = std::max(m, s.abs().to_double());
    sum_sq += m * m;
  }
  LipschitzProfile p;
  p.kind_ = Kind::kPiecewiseLinear;
  p.dim_ = dim;
  p.axes_ = std::move(axes);
  p.intrinsic_ = std::sqrt(sum_sq);
  p.lipschitz_ = lipschitz_constant > 0.0 ? lipschitz_constant : p.intrinsic_;
  if (p.lipschitz_ + 1e-12 < p.intrinsic_) {
    fail(ErrorKind::kInvalidProfile, "declared Lipschitz constant " + std::to_string(p.lipschitz_) +
                                         " is below the slope bound " + std::to_string(p.intrinsic_));
  }
  return p;
}

LipschitzProfile LipschitzProfile::cone(int dim, Rational slope) {
  std::vector<Axis> axes(static_cast<std::size_t>(dim - 1), Axis{{Rational(0)}, {-slope, slope}});
  return piecewise_linear(dim, std::move(axes), 0.0);
}

LipschitzProfile LipschitzProfile::table(int dim, std::int64_t half_width, std::vector<Rational> values,
                                         double lipschitz_constant) {
  LatticePoint check(dim);
  if (dim < 2) fail(ErrorKind::kInvalidProfile, "table profile needs d >= 2");
  if (half_width < 0) fail(ErrorKind::kInvalidProfile, "negative table half-width");
  std::size_t side = static_cast<std::size_t>(2 * half_width + 1);
  std::size_t expected = 1;
  for (int k = 1; k < dim; ++k) expected *= side;
  if (values.size() != expected) {
    fail(ErrorKind::kInvalidProfile, "table needs " + std::to_string(expected) + " values");
  }
  LipschitzProfile p;
  p.kind_ = Kind::kTable;
  p.dim_ = dim;
  p.half_width_ = half_width;
  p.values_ = std::move(values);
  if (p.value_at(LatticePoint(dim)) != Rational(0)) fail(ErrorKind::kInvalidProfile, "table profile must satisfy φ(0) = 0");

  // Per-axis maximum neighbour difference.
  double sum_sq = 0.0;
  for (int axis = 1; axis < dim; ++axis) {
    double m = 0.0;
    LatticePoint lo(dim), hi(dim);
    for (int k = 1; k < dim; ++k) {
      lo[k] = -half_width;
      hi[k] = half_width;
    }
    hi[axis] = half_width - 1;
    for_each_in_box(lo, hi, [&](const LatticePoint& a) {
      LatticePoint b = a;
      ++b[axis];
      m = std::max(m, (p.value_at(a) - p.value_at(b)).abs().to_double());
    });
    sum_sq += m * m;
  }
  p.intrinsic_ = std::sqrt(sum_sq);
  p.lipschitz_ = lipschitz_constant > 0.0 ? lipschitz_constant : p.intrinsic_;
  return p;
}

Rational LipschitzProfile::value_at(const LatticePoint& x) const {
  switch (kind_) {
    case Kind::kFlat: return Rational(0);
    case Kind::kPiecewiseLinear: {
      Rational v(0);
      for (int k = 1; k < dim_; ++k) v += axis_value(axes_[static_cast<std::size_t>(k - 1)], x[k]);
      return v;
    }
    case Kind::kTable: {
      std::size_t side = static_cast<std::size_t>(2 * half_width_ + 1);
      std::size_t idx = 0;
      for (int k = 1; k < dim_; ++k) {
        std::int64_t c = std::clamp(x[k], -half_width_, half_width_);
        idx = idx * side + static_cast<std::size_t>(c + half_width_);
      }
      return values_[idx];
    }
  }
  return Rational(0);
}

double LipschitzProfile::spot_check_lipschitz(std::int64_t radius) const {
  if (dim_ == 1) return 0.0;
  LatticePoint lo(dim_), hi(dim_);
  for (int k = 1; k < dim_; ++k) {
    lo[k] = -radius;
    hi[k] = radius;
  }
  std::vector<LatticePoint> pts;
  for_each_in_box(lo, hi, [&](const LatticePoint& p) { pts.push_back(p); });
  double worst = 0.0;
  auto offer = [&](const LatticePoint& a, const LatticePoint& b) {
    std::int64_t dsq = distance_sq(a, b);
    if (dsq == 0) return;
    double diff = (value_at(a) - value_at(b)).abs().to_double();
    worst = std::max(worst, diff / std::sqrt(static_cast<double>(dsq)));
  };
  const std::size_t n = pts.size();
  if (n * n <= 200000) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) offer(pts[i], pts[j]);
  } else {
    std::uint64_t s = 0x853c49e6748fea9bULL;
    auto next = [&] {
      s += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      return z ^ (z >> 31);
    };
    for (int t = 0; t < 200000; ++t) offer(pts[next() % n], pts[next() % n]);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// LipschitzDomain

LipschitzDomain::LipschitzDomain(LipschitzProfile profile, StepSet steps)
    : profile_(std::move(profile)), steps_(std::move(steps)) {
  if (steps_.dim() != profile_.dim()) fail(ErrorKind::kInvalidArgument, "profile and step set differ in dimension");
  double a = std::max(profile_.lipschitz_constant(), profile_.intrinsic_lipschitz_bound());
  band_ = (a + 1.0) * steps_.max_length() + 1.0;
}

bool LipschitzDomain::on_boundary(const LatticePoint& x) const {
  if (contains(x)) return false;
  for (const auto& e : steps_) {
    if (contains(x - e)) return true;
  }
  return false;
}

std::int64_t LipschitzDomain::boundary_distance_sq(const LatticePoint& x) const {
  const int d = dim();
  const auto depth = static_cast<std::int64_t>(std::ceil(band_));
  std::int64_t best = std::numeric_limits<std::int64_t>::max();

  // Nearest boundary point within one transverse column, if any.
  auto scan_column = [&](const LatticePoint& column) {
    LatticePoint z = column;
    std::int64_t top = profile_.value_at(column).floor();
    std::int64_t lateral = 0;
    for (int k = 1; k < d; ++k) lateral += (column[k] - x[k]) * (column[k] - x[k]);
    std::int64_t vertical = x[0] - top;
    if (lateral + vertical * vertical >= best) return;
    for (std::int64_t z1 = top; z1 >= top - depth; --z1) {
      z[0] = z1;
      if (on_boundary(z)) {
        std::int64_t dsq = lateral + (x[0] - z1) * (x[0] - z1);
        best = std::min(best, dsq);
        return;
      }
    }
  };

  LatticePoint lo = x, hi = x;
  for (std::int64_t rho = 0; best == std::numeric_limits<std::int64_t>::max(); ++rho) {
    if (rho > 1000000) fail(ErrorKind::kInvalidGeometry, "no boundary point found near " + x.to_string());
    for (int k = 1; k < d; ++k) {
      lo[k] = x[k] - rho;
      hi[k] = x[k] + rho;
    }
    for_each_in_box(lo, hi, scan_column);
    if (d == 1) break;
  }
  if (best == std::numeric_limits<std::int64_t>::max()) fail(ErrorKind::kInvalidGeometry, "empty boundary");

  std::int64_t reach = isqrt_floor(best);
  for (int k = 1; k < d; ++k) {
    lo[k] = x[k] - reach;
    hi[k] = x[k] + reach;
  }
  for_each_in_box(lo, hi, scan_column);
  return best;
}

// ---------------------------------------------------------------------------
// Boundaries

PointSet boundary(const PointSet& a, const StepSet& steps) {
  if (steps.size() == 0) fail(ErrorKind::kInvalidStepSet, "empty step set");
  std::vector<LatticePoint> out;
  for (const auto& z : a) {
    for (const auto& e : steps) {
      LatticePoint x = z + e;
      if (!a.contains(x)) out.push_back(x);
    }
  }
  return PointSet(std::move(out));
}

PointSet closure(const PointSet& a, const StepSet& steps) { return a.set_union(boundary(a, steps)); }

double distance_to_boundary(const LatticePoint& x, const LipschitzDomain& domain) {
  if (!domain.contains(x)) fail(ErrorKind::kOutsideDomain, x.to_string() + " is not in the domain");
  return std::sqrt(static_cast<double>(domain.boundary_distance_sq(x)));
}

// ---------------------------------------------------------------------------
// Regions

namespace {

void check_outer(const Rational& radius_sq) {
  if (radius_sq < Rational(1)) fail(ErrorKind::kInvalidRegion, "radius must be >= 1");
}

}  // namespace

Region Region::ball(LatticePoint center, Rational radius) {
  if (radius < Rational(0)) fail(ErrorKind::kInvalidRegion, "negative radius");
  Region r = ball_sq(std::move(center), radius * radius);
  r.radius_ = radius;
  return r;
}

Region Region::ball_sq(LatticePoint center, Rational radius_sq) {
  check_outer(radius_sq);
  Region r;
  r.kind_ = Kind::kBall;
  r.center_ = std::move(center);
  r.radius_sq_ = radius_sq;
  return r;
}

Region Region::cube(LatticePoint center, Rational radius) {
  if (radius < Rational(1)) fail(ErrorKind::kInvalidRegion, "radius must be >= 1");
  Region r;
  r.kind_ = Kind::kCube;
  r.center_ = std::move(center);
  r.radius_ = radius;
  r.radius_sq_ = radius * radius;
  return r;
}

Region Region::collar(LatticePoint center, Rational outer, Rational inner) {
  if (inner < Rational(0)) fail(ErrorKind::kInvalidRegion, "collar inner radius r < 0");
  if (outer < inner) fail(ErrorKind::kInvalidRegion, "collar needs R >= r");
  Region r = ball(std::move(center), outer);
  r.kind_ = Kind::kCollar;
  r.inner_sq_ = inner * inner;
  r.inner_ = inner;
  return r;
}

Region Region::slab(LatticePoint center, Rational outer, Rational inner) {
  Region r = collar(std::move(center), outer, inner);
  r.kind_ = Kind::kSlab;
  return r;
}

std::string Region::describe() const {
  std::string kind;
  switch (kind_) {
    case Kind::kBall: kind = "ball"; break;
    case Kind::kCube: kind = "cube"; break;
    case Kind::kCollar: kind = "collar"; break;
    case Kind::kSlab: kind = "slab"; break;
  }
  std::string s = kind + ":y=" + center_.to_string();
  if (kind_ == Kind::kCube) return s + ",R=" + radius_->to_string();
  s += radius_ ? ",R=" + radius_->to_string() : ",R^2=" + radius_sq_.to_string();
  if (kind_ == Kind::kCollar || kind_ == Kind::kSlab) s += ",r^2=" + inner_sq_.to_string();
  return s;
}

bool Region::in_outer(const LatticePoint& x) const {
  if (kind_ == Kind::kCube) {
    for (int k = 0; k < x.dim(); ++k) {
      if (Rational(std::abs(x[k] - center_[k])) > *radius_) return false;
    }
    return true;
  }
  return Rational(distance_sq(x, center_)) <= radius_sq_;
}

Region parse_region(const std::string& text, int dim) {
  auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorKind::kInvalidRegion, "region needs 'kind:...': " + text);
  std::string kind = text.substr(0, colon);
  std::vector<std::pair<std::string, std::string>> kv;
  std::size_t pos = colon + 1;
  while (pos <= text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    std::string tok = text.substr(pos, next - pos);
    auto eq = tok.find('=');
    if (eq != std::string::npos) kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    else if (!kv.empty()) kv.back().second += "," + tok;
    else fail(ErrorKind::kInvalidRegion, "bad region token '" + tok + "'");
    pos = next + 1;
  }
  std::optional<LatticePoint> center;
  std::optional<Rational> big, big_sq, small;
  for (const auto& [k, v] : kv) {
    if (k == "y") {
      LatticePoint p = parse_point(v);
      if (p.dim() == 1 && dim > 1) {
        LatticePoint q(dim);
        for (int i = 0; i < dim; ++i) q[i] = p[0];
        p = q;
      }
      if (p.dim() != dim) fail(ErrorKind::kInvalidRegion, "center dimension differs from domain");
      center = p;
    } else if (k == "R") {
      big = Rational::parse(v);
    } else if (k == "R2") {
      big_sq = Rational::parse(v);
    } else if (k == "r") {
      small = Rational::parse(v);
    } else {
      fail(ErrorKind::kInvalidRegion, "unknown region key '" + k + "'");
    }
  }
  if (!center) center = LatticePoint(dim);
  if (kind == "ball") {
    if (big_sq) return Region::ball_sq(*center, *big_sq);
    if (!big) fail(ErrorKind::kInvalidRegion, "ball needs R");
    return Region::ball(*center, *big);
  }
  if (!big) fail(ErrorKind::kInvalidRegion, kind + " needs R");
  if (kind == "cube") return Region::cube(*center, *big);
  if (!small) fail(ErrorKind::kInvalidRegion, kind + " needs r");
  if (kind == "collar") return Region::collar(*center, *big, *small);
  if (kind == "slab") return Region::slab(*center, *big, *small);
  fail(ErrorKind::kInvalidRegion, "unknown region kind '" + kind + "'");
}

PointSet enumerate_region(const Region& region) {
  if (region.kind() == Region::Kind::kCollar || region.kind() == Region::Kind::kSlab) {
    fail(ErrorKind::kInvalidRegion, "collar and slab regions need a domain");
  }
  const LatticePoint& c = region.center();
  std::int64_t reach = region.kind() == Region::Kind::kCube
                           ? region.radius()->floor()
                           : isqrt_floor(region.radius_sq().floor());
  LatticePoint lo = c, hi = c;
  for (int k = 0; k < c.dim(); ++k) {
    lo[k] -= reach;
    hi[k] += reach;
  }
  std::vector<LatticePoint> pts;
  for_each_in_box(lo, hi, [&](const LatticePoint& p) {
    if (region.in_outer(p)) pts.push_back(p);
  });
  return PointSet(std::move(pts));
}

PointSet enumerate_region(const Region& region, const LipschitzDomain& domain) {
  if (region.center().dim() != domain.dim()) fail(ErrorKind::kInvalidRegion, "region and domain differ in dimension");
  Region outer = region.kind() == Region::Kind::kCube ? region : Region::ball_sq(region.center(), region.radius_sq());
  std::vector<LatticePoint> pts;
  for (const auto& p : enumerate_region(outer)) {
    if (!domain.contains(p)) continue;
    if (region.kind() == Region::Kind::kCollar || region.kind() == Region::Kind::kSlab) {
      bool deep = Rational(domain.boundary_distance_sq(p)) > region.inner_sq();
      if (deep != (region.kind() == Region::Kind::kSlab)) continue;
    }
    pts.push_back(p);
  }
  return PointSet(std::move(pts));
}

double exterior_cone_fraction(const LatticePoint& y, Rational radius, const LipschitzDomain& domain) {
  PointSet cube = closure(enumerate_region(Region::cube(y, radius)), domain.steps());
  std::size_t outside = 0;
  for (const auto& p : cube) {
    if (!domain.contains(p)) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(cube.size());
}

}  // namespace lipwalk
