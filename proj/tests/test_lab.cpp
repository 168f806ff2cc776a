#include <doctest.h>

#include <random>

#include "lipwalk/error.hpp"
#include "lipwalk/harmonic.hpp"
#include "lipwalk/lab.hpp"
#include "oracle.hpp"

using namespace lipwalk;

namespace {

LipschitzDomain half_plane() { return {LipschitzProfile::flat(2), StepSet::nearest_neighbour(2)}; }
LipschitzDomain abs_cone() { return {LipschitzProfile::cone(2, Rational(1)), StepSet::nearest_neighbour(2)}; }

const LatticePoint kOrigin{0, 0};

}  // namespace

TEST_CASE("Harnack at R = 1 matches an oracle built column by column") {
  auto k = TransitionKernel::simple_random_walk(2);
  HarnackResult h = harnack_constant(kOrigin, Rational(1), k);
  auto window = enumerate_region(Region::ball(kOrigin, Rational(2)));
  std::vector<LatticePoint> win(window.begin(), window.end());
  auto inner = enumerate_region(Region::ball(kOrigin, Rational(1)));
  long double best = 0;
  for (const auto& b : oracle::boundary(win, k.steps())) {
    auto u = oracle::dirichlet(win, k, [&](const LatticePoint& p) -> long double { return p == b ? 1 : 0; });
    long double hi = 0, lo = 1e300L;
    for (const auto& x : inner) hi = std::max(hi, u[x]), lo = std::min(lo, u[x]);
    best = std::max(best, hi / lo);
  }
  CHECK(h.constant.value == doctest::Approx(double(best)).epsilon(1e-12));
  CHECK(h.local.value <= 1.0 / k.alpha() + 1e-12);
  CHECK(h.inverse_alpha == doctest::Approx(4.0));
}

TEST_CASE("local Harnack bound 1/alpha on a 9x9 window") {
  for (const auto& k : {TransitionKernel::simple_random_walk(2), oracle::parity_kernel()}) {
    auto w = enumerate_region(Region::cube(kOrigin, Rational(4)));
    Measurement m = local_harnack_constant(w, k);
    CHECK(m.value > 1.0);
    CHECK(m.value <= 1.0 / k.alpha() + 1e-12);
    CHECK(m.witness.size() == 3);
  }
}

TEST_CASE("basis extremality: random positive combinations never beat the basis") {
  auto c = half_plane();
  auto k = oracle::parity_kernel();
  const std::int64_t R = 4;
  PointSet region = enumerate_region(Region::ball(kOrigin, Rational(R)), c);
  // Carleson basis on C ∩ B_12 vanishing on ∂C ∩ B_8, evaluated on C ∩ B_4.
  LatticePoint anchor = boundary_anchor(kOrigin, R, c);
  HarmonicBasis basis = vanishing_basis(kOrigin, Rational(144), Rational(64), c, k, region);
  const double carl = carleson_from(basis, region, anchor).value;
  const double bhp = boundary_harnack_from(basis, region, anchor).value;
  std::mt19937_64 rng(31);
  std::exponential_distribution<double> w(1.0);
  const std::size_t m = basis.columns();
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(m), b(m);
    for (auto& v : a) v = w(rng) * (rng() % 4 == 0 ? 0.0 : 1.0) + 1e-300;
    for (auto& v : b) v = w(rng);
    std::vector<double> u(region.size()), v(region.size());
    for (std::size_t e = 0; e < region.size(); ++e)
      for (std::size_t s = 0; s < m; ++s) u[e] += a[s] * basis(e, s), v[e] += b[s] * basis(e, s);
    Field fu(region, u), fv(region, v);
    CHECK(carleson_ratio(fu, region, anchor) <= carl * (1 + 1e-12));
    double hi = 0;
    const double at = fu.at(anchor) / fv.at(anchor);
    for (std::size_t e = 0; e < region.size(); ++e) hi = std::max(hi, u[e] / v[e]);
    CHECK(hi / at <= bhp * (1 + 1e-12));
  }
}

TEST_CASE("Harnack basis extremality on B_4") {
  auto k = oracle::parity_kernel();
  HarnackResult h = harnack_constant(kOrigin, Rational(2), k);
  auto window = enumerate_region(Region::ball(kOrigin, Rational(4)));
  auto eval = enumerate_region(Region::ball(kOrigin, Rational(2)));
  HarmonicBasis basis = harmonic_basis(window, k, [](const LatticePoint&) { return true; }, eval);
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> w(1.0);
  for (int t = 0; t < 100; ++t) {
    double hi = 0, lo = 1e300;
    std::vector<double> a(basis.columns());
    for (auto& v : a) v = w(rng);
    for (std::size_t e = 0; e < eval.size(); ++e) {
      double s = 0;
      for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * basis(e, j);
      hi = std::max(hi, s), lo = std::min(lo, s);
    }
    CHECK(hi / lo <= h.constant.value * (1 + 1e-12));
  }
  // the constant function (all columns with weight one) has ratio 1
  double hi = 0, lo = 1e300;
  for (std::size_t e = 0; e < eval.size(); ++e) {
    double s = 0;
    for (std::size_t j = 0; j < basis.columns(); ++j) s += basis(e, j);
    hi = std::max(hi, s), lo = std::min(lo, s);
  }
  CHECK(hi / lo == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Carleson: exhaustion candidate stays under the constant; bad anchor") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  Measurement m = carleson_constant(kOrigin, 8, c, k);
  auto h = harmonic_candidate(c, k, kOrigin, 48, LatticePoint{8, 0}, OuterData::kCap);
  PointSet region = enumerate_region(Region::ball(kOrigin, Rational(8)), c);
  CHECK(carleson_ratio(h.field, region, LatticePoint{8, 0}) <= m.value);
  // Outside the cone the anchor y + R e1 lies below the graph.
  try {
    (void)carleson_constant(LatticePoint{-4, 4}, 2, abs_cone(), k);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidAnchor);
  }
}

TEST_CASE("prop1 contraction below one") {
  for (const auto& c : {half_plane(), abs_cone()}) {
    Measurement m = prop1_contraction(kOrigin, 4, c, TransitionKernel::simple_random_walk(2));
    CHECK(m.value < 1.0);
    CHECK(m.extra.at("margin") == doctest::Approx(1.0 - m.value));
  }
}

TEST_CASE("boundary Harnack: identical pair gives one, rescaling is harmless") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  const std::int64_t R = 2;
  PointSet region = enumerate_region(Region::ball(kOrigin, Rational(R)), c);
  LatticePoint anchor = boundary_anchor(kOrigin, R, c);
  HarmonicBasis basis = vanishing_basis(kOrigin, Rational(36 * 4), Rational(16 * 4), c, k, region);
  const double base = boundary_harnack_from(basis, region, anchor).value;
  CHECK(std::isfinite(base));
  CHECK(base >= 1.0);

  HarmonicBasis single = basis;
  single.sources = {basis.sources[0]};
  single.values.clear();
  for (std::size_t e = 0; e < region.size(); ++e) single.values.push_back(basis(e, 0));
  CHECK(boundary_harnack_from(single, region, anchor).value == doctest::Approx(1.0).epsilon(1e-15));

  for (double f : {2.0, 0.25, 1024.0}) {
    HarmonicBasis scaled = basis;
    for (std::size_t s = 0; s < basis.columns(); s += 3) scaled.scale_column(s, f);
    CHECK(boundary_harnack_from(scaled, region, anchor).value == base);
  }
  for (double f : {7.0, 0.3}) {
    HarmonicBasis scaled = basis;
    for (std::size_t s = 1; s < basis.columns(); s += 2) scaled.scale_column(s, f);
    CHECK(boundary_harnack_from(scaled, region, anchor).value == doctest::Approx(base).epsilon(1e-14));
  }
}

TEST_CASE("lemma2 sweep and onset") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  OnsetResult r = lemma2_onset(kOrigin, Rational(4), c, k, {Rational(2), Rational(4), Rational(8), Rational(16)});
  REQUIRE(r.onset.has_value());
  CHECK(r.table.back().min_ratio >= r.table.front().min_ratio);
  try {
    (void)lemma2_onset(kOrigin, Rational(4), c, k, {Rational(4), Rational(2)});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
}

TEST_CASE("lemma2 on the half-line is gambler's ruin") {
  LipschitzDomain line(LipschitzProfile::flat(1), StepSet::nearest_neighbour(1));
  auto k = TransitionKernel::simple_random_walk(1);
  // collar {1..r}, top r+1, bottom 0, no side: the ratio is infinite
  ExitSplit s = exit_split(LatticePoint{0}, Rational(4), Rational(3), line, k);
  for (std::int64_t x = 1; x <= 3; ++x) CHECK(s.top.at(LatticePoint{x}) == doctest::Approx(double(x) / 4).epsilon(1e-14));
  try {
    (void)lateral_decay(LatticePoint{0}, Rational(2), line, k, {Rational(2), Rational(4)});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyGeometry);
  }
}

TEST_CASE("enlarging the target cannot lower the top-exit probability") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  auto geo = collar_geometry(kOrigin, Rational(4), Rational(3), c);
  std::vector<LatticePoint> bigger(geo.top.begin(), geo.top.end());
  for (const auto& p : geo.side) bigger.push_back(p);
  Field a = harmonic_measure(geo.collar, k, geo.top);
  Field b = harmonic_measure(geo.collar, k, PointSet(bigger));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] >= a[i]);
}

TEST_CASE("decay: beta near one on the half-plane, zero for certainty") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  DecayFit f = boundary_decay_profile(kOrigin, Rational(8), c, k);
  CHECK(f.beta == doctest::Approx(1.0).epsilon(0.15));
  CHECK(f.floor > 0.0);
  PointSet pts = enumerate_region(Region::ball(kOrigin, Rational(8)), c);
  DecayFit one = fit_decay(Field(pts, 1.0), pts, c, Rational(8));
  CHECK(std::fabs(one.beta) < 1e-12);
  PointSet few = enumerate_region(Region::ball(kOrigin, Rational(2)), c);
  try {
    (void)fit_decay(Field(few, 1.0), few, c, Rational(2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInsufficientData);
  }
}

TEST_CASE("lateral decay: negative slope, doubling K shrinks max v") {
  auto r = lateral_decay(kOrigin, Rational(4), half_plane(), TransitionKernel::simple_random_walk(2),
                         {Rational(2), Rational(4), Rational(8)});
  CHECK(r.slope < 0.0);
  for (std::size_t i = 1; i < r.table.size(); ++i) CHECK(r.table[i].max_v < r.table[i - 1].max_v);
}

TEST_CASE("growth exponent is finite and the anchor ratio is one") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  GrowthFit g = interior_growth_exponent(kOrigin, 8, c, k);
  CHECK(std::isfinite(g.gamma));
  CHECK(g.constant > 0.0);
  // at the anchor, δ = R so R/δ = 1 and every basis column has ratio 1
  bool saw_anchor = false;
  for (const auto& [x, y] : g.envelope) {
    if (x != 1.0) continue;
    saw_anchor = true;
    CHECK(y >= 1.0);
  }
  CHECK(saw_anchor);
}

TEST_CASE("band ratio") {
  CHECK(band_ratio({1.0, 2.0, 1.5}) == 2.0);
  CHECK(band_ratio({-1.0, -4.0}) == 4.0);
  CHECK(std::isinf(band_ratio({1.0, -1.0})));
  auto [slope, icpt] = least_squares({0, 1, 2}, {1, 3, 5});
  CHECK(slope == doctest::Approx(2.0));
  CHECK(icpt == doctest::Approx(1.0));
}
