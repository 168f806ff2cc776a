#include <doctest.h>

#include "lipwalk/error.hpp"
#include "lipwalk/harmonic.hpp"
#include "oracle.hpp"

using namespace lipwalk;

namespace {

LipschitzDomain half_plane() { return {LipschitzProfile::flat(2), StepSet::nearest_neighbour(2)}; }

PointSet inner_window(const LipschitzDomain& c, std::int64_t r) {
  return enumerate_region(Region::ball(LatticePoint(c.dim()), Rational(r)), c);
}

}  // namespace

TEST_CASE("half-plane candidate: normalized, vanishing on the boundary, harmonic, close to x1/8") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  HarmonicCandidate h = harmonic_candidate(c, k, LatticePoint{0, 0}, 32, LatticePoint{8, 0}, OuterData::kCap);
  CHECK(h.field.at(LatticePoint{8, 0}) == 1.0);
  double worst_l = 0;
  PointSet win = enumerate_region(Region::ball(LatticePoint{0, 0}, Rational(32)), c);
  for (const auto& x : win) {
    CHECK(h.field.at(x) > 0.0);
    worst_l = std::max(worst_l, std::fabs(apply_L(k, h.field, x)));
  }
  CHECK(worst_l <= 1e-10);
  for (const auto& b : boundary(win, k.steps()))
    if (!c.contains(b)) CHECK(h.field.at(b) == 0.0);
  for (const auto& x : inner_window(c, 8)) CHECK(h.field.at(x) == doctest::Approx(double(x[0]) / 8).epsilon(5e-2));
}

TEST_CASE("construction log shrinks and approaches x1/8") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  auto sched = ExhaustionSchedule::standard(2, {16, 32, 64});
  Construction res = construct_harmonic(sched, c, k);
  REQUIRE(res.log.size() == 2);
  CHECK(res.log.back().deviation <= res.log.front().deviation);
  double err = 0;
  for (const auto& x : inner_window(c, 8)) err = std::max(err, std::fabs(res.candidate.field.at(x) * 8 / double(x[0]) - 1));
  CHECK(err <= 1e-3);
  for (double r : res.residuals) CHECK(r <= 1e-10 * 100);
}

TEST_CASE("half-line candidate is x/x0") {
  LipschitzDomain line(LipschitzProfile::flat(1), StepSet::nearest_neighbour(1));
  auto k = TransitionKernel::simple_random_walk(1);
  HarmonicCandidate h = harmonic_candidate(line, k, LatticePoint{0}, 64, LatticePoint{8}, OuterData::kSphere);
  for (std::int64_t x = 1; x <= 20; ++x) CHECK(h.field.at(LatticePoint{x}) == doctest::Approx(double(x) / 8).epsilon(1e-12));
}

TEST_CASE("Martin kernel: one at the reference, half-line limit, unreachable reference") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  const LatticePoint x0{8, 0}, y{16, 0};
  Region w = martin_window(y, LatticePoint{0, 0});
  CHECK(martin_kernel(y, x0, w, c, k, x0) == 1.0);

  LipschitzDomain line(LipschitzProfile::flat(1), StepSet::nearest_neighbour(1));
  auto k1 = TransitionKernel::simple_random_walk(1);
  for (std::int64_t n : {8, 32}) {
    LatticePoint yn{n};
    double kv = martin_kernel(yn, LatticePoint{3}, martin_window(yn, LatticePoint{0}), line, k1, LatticePoint{2});
    CHECK(kv == doctest::Approx(1.5).epsilon(1e-12));
  }

  // A profile with walls at x2 = ±1 cuts C ∩ B_3 into three pieces, so the
  // walk from (2, 0) never reaches (1, 2).
  LipschitzDomain walls(LipschitzProfile::table(2, 2, {Rational(0), Rational(3), Rational(0), Rational(3), Rational(0)}, 3.0),
                        StepSet::nearest_neighbour(2));
  try {
    (void)martin_kernel(LatticePoint{2, 0}, LatticePoint{1, 0}, Region::ball(LatticePoint{0, 0}, Rational(3)), walls, k,
                        LatticePoint{1, 2});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnreachableReference);
  }
}

TEST_CASE("Martin collapse along (n, 0) decreases") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  auto res = construct_harmonic(ExhaustionSchedule::standard(2, {16, 32, 64}), c, k);
  std::vector<LatticePoint> ys = {LatticePoint{8, 0}, LatticePoint{16, 0}, LatticePoint{32, 0}};
  auto col = martin_collapse(ys, inner_window(c, 4), res.candidate.field, c, k, LatticePoint{0, 0}, LatticePoint{8, 0});
  REQUIRE(col.size() == 3);
  CHECK(col[1].deviation < col[0].deviation);
  CHECK(col[2].deviation < col[1].deviation);
}

TEST_CASE("uniqueness: identical candidates, rescaling, and shrinking disagreement") {
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  const LatticePoint y{0, 0}, x0{8, 0};
  PointSet inner = inner_window(c, 8);
  auto a = harmonic_candidate(c, k, y, 32, x0, OuterData::kCap);
  auto b = harmonic_candidate(c, k, y, 32, x0, OuterData::kCap);
  CHECK(uniqueness_check({a, b}, inner, x0).max_deviation == 0.0);

  auto s32 = harmonic_candidate(c, k, y, 32, x0, OuterData::kSphere);
  auto s64 = harmonic_candidate(c, k, y, 64, x0, OuterData::kSphere);
  auto a64 = harmonic_candidate(c, k, y, 64, x0, OuterData::kCap);
  const double d32 = uniqueness_check({a, s32}, inner, x0).max_deviation;
  const double d64 = uniqueness_check({a64, s64}, inner, x0).max_deviation;
  CHECK(d64 < d32);

  auto scaled = s32;
  for (auto& v : scaled.field.values()) v *= 7.0;
  CHECK(uniqueness_check({a, scaled}, inner, x0).max_deviation == doctest::Approx(d32).epsilon(1e-14));

  auto bad = a;
  for (auto& v : bad.field.values()) v = 0.0;
  try {
    (void)uniqueness_check({a, bad}, inner, x0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateCandidate);
  }
}

TEST_CASE("candidates are invariant under scaling the outer data") {
  // Height data is linear in the data; the normalized candidate built from
  // 3 * height agrees with the one built from height, both equal to x1/8.
  auto c = half_plane();
  auto k = TransitionKernel::simple_random_walk(2);
  auto h = harmonic_candidate(c, k, LatticePoint{0, 0}, 24, LatticePoint{8, 0}, OuterData::kHeight);
  PointSet win = enumerate_region(Region::ball(LatticePoint{0, 0}, Rational(24)), c);
  PointSet bd = boundary(win, k.steps());
  std::vector<double> g;
  for (const auto& p : bd) g.push_back(c.contains(p) ? 3.0 * double(p[0]) : 0.0);
  Field u = solve_dirichlet(DirichletProblem(win, k, Field(bd, g)));
  const double norm = u.at(LatticePoint{8, 0});
  for (const auto& x : win) CHECK(u.at(x) / norm == doctest::Approx(h.field.at(x)).epsilon(1e-9));
}
