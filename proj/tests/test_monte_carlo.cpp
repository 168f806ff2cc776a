#include <doctest.h>

#include "lipwalk/dirichlet.hpp"
#include "lipwalk/error.hpp"
#include "lipwalk/monte_carlo.hpp"
#include "oracle.hpp"

using namespace lipwalk;

namespace {

PointSet interval(std::int64_t lo, std::int64_t hi) {
  std::vector<LatticePoint> v;
  for (auto x = lo; x <= hi; ++x) v.push_back(LatticePoint{x});
  return PointSet(v);
}

SimulationConfig cfg1(std::int64_t lo, std::int64_t hi, std::int64_t start, std::uint64_t paths) {
  SimulationConfig c{TransitionKernel::simple_random_walk(1), LatticePoint{start}, interval(lo, hi)};
  c.n_paths = paths;
  c.seed = 42;
  return c;
}

}  // namespace

TEST_CASE("single-point region exits in one step") {
  auto c = cfg1(0, 0, 0, 1000);
  for (const auto& o : simulate_exit(c)) {
    CHECK(o.steps == 1);
    CHECK_FALSE(o.truncated);
    CHECK(std::llabs(o.exit[0]) == 1);
  }
  auto g = estimate_green(c, LatticePoint{0});
  CHECK(g.point_estimate == 1.0);
  CHECK(g.half_width_95 == 0.0);
}

TEST_CASE("gambler's ruin frequencies") {
  auto c = cfg1(1, 9, 5, 20000);
  auto e = estimate_exit_probability(c, PointSet({LatticePoint{10}}));
  CHECK(std::fabs(e.point_estimate - 0.5) <= 3 * e.half_width_95);
  CHECK(e.half_width_95 == doctest::Approx(1.96 * std::sqrt(e.point_estimate * (1 - e.point_estimate) / 20000)));
  c.start = LatticePoint{3};
  e = estimate_exit_probability(c, PointSet({LatticePoint{10}}));
  CHECK(std::fabs(e.point_estimate - 0.3) <= 3 * e.half_width_95);
  auto full = estimate_exit_probability(c, PointSet({LatticePoint{0}, LatticePoint{10}}));
  CHECK(full.point_estimate == 1.0);
  CHECK(full.truncated_paths == 0);
}

TEST_CASE("Green estimate: interval, unreachable point") {
  auto c = cfg1(1, 19, 10, 20000);
  Field g = green_function(interval(1, 19), TransitionKernel::simple_random_walk(1), LatticePoint{10});
  auto e = estimate_green(c, LatticePoint{10});
  CHECK(std::fabs(e.point_estimate - g.at(LatticePoint{10})) <= 3 * e.half_width_95);

  SimulationConfig two{TransitionKernel::simple_random_walk(1), LatticePoint{1},
                       PointSet({LatticePoint{1}, LatticePoint{2}, LatticePoint{7}})};
  two.n_paths = 500;
  auto z = estimate_green(two, LatticePoint{7});
  CHECK(z.point_estimate == 0.0);
  CHECK(z.half_width_95 == 0.0);
}

TEST_CASE("Green from an inhomogeneous start agrees with the transposed solve") {
  auto k = oracle::parity_kernel();
  std::vector<LatticePoint> pts;
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 3; ++b) pts.push_back(LatticePoint{a, b});
  PointSet in(pts);
  const LatticePoint y{1, 1}, x{3, 2};
  Field row = green_from(in, k, y);
  SimulationConfig c{k, y, in};
  c.n_paths = 40000;
  c.seed = 5;
  auto e = estimate_green(c, x);
  CHECK(std::fabs(e.point_estimate - row.at(x)) <= 3 * e.half_width_95);
}

TEST_CASE("results do not depend on the thread count") {
  auto k = oracle::parity_kernel();
  std::vector<LatticePoint> pts;
  for (int a = 0; a <= 8; ++a)
    for (int b = -4; b <= 4; ++b) pts.push_back(LatticePoint{a, b});
  SimulationConfig c{k, LatticePoint{2, 0}, PointSet(pts)};
  c.n_paths = 5000;
  c.seed = 1234;
  c.threads = 1;
  auto one = simulate_exit(c);
  for (unsigned t : {2u, 3u, 8u}) {
    c.threads = t;
    auto many = simulate_exit(c);
    REQUIRE(many.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(many[i].exit == one[i].exit);
      CHECK(many[i].steps == one[i].steps);
    }
  }
  c.seed = 1235;
  auto other = simulate_exit(c);
  bool differs = false;
  for (std::size_t i = 0; i < one.size(); ++i) differs = differs || other[i].steps != one[i].steps;
  CHECK(differs);
}

TEST_CASE("truncation is counted and all-truncated runs are inconclusive") {
  auto c = cfg1(1, 99, 50, 200);
  c.path_cap = 1;
  try {
    (void)simulate_exit(c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInconclusiveSimulation);
  }
  c.path_cap = 400;
  c.start = LatticePoint{2};
  auto e = estimate_exit_probability(c, PointSet({LatticePoint{0}}));
  CHECK(e.truncated_paths > 0);
  CHECK(e.n_effective + e.truncated_paths == 200);
  CHECK(effective_path_cap(cfg1(1, 9, 5, 1)) >= 100 * 8 * 8);
}

TEST_CASE("collar top exit agrees with the solver") {
  LipschitzDomain flat(LipschitzProfile::flat(2), StepSet::nearest_neighbour(2));
  auto k = TransitionKernel::simple_random_walk(2);
  auto geo = collar_geometry(LatticePoint{0, 0}, Rational(4), Rational(3), flat);
  ExitSplit s = exit_split(LatticePoint{0, 0}, Rational(4), Rational(3), flat, k);
  SimulationConfig c{k, LatticePoint{2, 1}, geo.collar};
  c.n_paths = 20000;
  c.seed = 9;
  auto e = estimate_exit_probability(c, geo.top);
  CHECK(std::fabs(e.point_estimate - s.top.at(LatticePoint{2, 1})) <= 3 * e.half_width_95);
}
