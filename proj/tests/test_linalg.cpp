#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "lipwalk/linalg.hpp"
#include "lipwalk/rng.hpp"
#include "lipwalk/simd/kernels.hpp"
#include "oracle.hpp"

using namespace lipwalk;
using linalg::EllMatrix;

namespace {

// Random substochastic Q with row sums at most 0.95 and ragged row lengths.
EllMatrix random_q(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<EllMatrix::Entry> e;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 1 + rng() % 7;
    std::vector<double> w(len);
    double s = 0;
    for (auto& v : w) s += (v = u(rng));
    const double total = 0.5 + 0.45 * u(rng);
    for (std::size_t j = 0; j < len; ++j)
      e.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(rng() % n), w[j] / s * total});
  }
  return EllMatrix(n, std::move(e));
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("every available kernel variant matches the scalar reference") {
  std::mt19937_64 rng(2024);
  const auto& ref = simd::scalar::table();
  for (auto level : simd::available_levels()) {
    const auto& kt = simd::table_for(level);
    CAPTURE(simd::to_string(level));
    for (std::size_t n : {1u, 3u, 7u, 8u, 15u, 16u, 33u, 257u, 1000u}) {
      auto q = random_q(n, rng);
      auto x = random_vec(n, rng), b = random_vec(n, rng);
      std::vector<double> y0(n), y1(n);
      ref.apply_a(q.view(), x.data(), y0.data());
      kt.apply_a(q.view(), x.data(), y1.data());
      CHECK(bits_equal(y0, y1));
      ref.residual(q.view(), b.data(), x.data(), y0.data());
      kt.residual(q.view(), b.data(), x.data(), y1.data());
      CHECK(bits_equal(y0, y1));

      auto a0 = b, a1 = b;
      ref.axpy(0.37, x.data(), a0.data(), n);
      kt.axpy(0.37, x.data(), a1.data(), n);
      CHECK(bits_equal(a0, a1));
      a0 = b, a1 = b;
      ref.xpay(x.data(), -1.3, a0.data(), n);
      kt.xpay(x.data(), -1.3, a1.data(), n);
      CHECK(bits_equal(a0, a1));
      CHECK(ref.norm_inf(x.data(), n) == kt.norm_inf(x.data(), n));

      // Reductions may associate differently across lanes.
      double bound = 0;
      for (std::size_t i = 0; i < n; ++i) bound += std::fabs(x[i] * b[i]);
      CHECK(std::fabs(ref.dot(x.data(), b.data(), n) - kt.dot(x.data(), b.data(), n)) <= 1e-15 * bound + 1e-300);
    }
  }
}

TEST_CASE("apply_a against a hand-rolled product") {
  std::mt19937_64 rng(9);
  auto q = random_q(50, rng);
  auto x = random_vec(50, rng);
  std::vector<double> y(50);
  simd::scalar::table().apply_a(q.view(), x.data(), y.data());
  for (std::size_t i = 0; i < 50; ++i) {
    long double s = x[i];
    for (const auto& e : q.row_entries(i)) s -= static_cast<long double>(e.value) * x[static_cast<std::size_t>(e.col)];
    CHECK(y[i] == doctest::Approx(static_cast<double>(s)).epsilon(1e-13));
  }
}

TEST_CASE("transpose round trip and duplicate summation") {
  EllMatrix q(3, {{0, 1, 0.25}, {0, 1, 0.25}, {2, 0, 0.3}, {1, 2, 0.1}});
  auto t = q.transpose();
  auto tt = t.transpose();
  auto d0 = linalg::dense_system(q), d1 = linalg::dense_system(tt), dt = linalg::dense_system(t);
  CHECK(d0 == d1);
  CHECK(d0[0 * 3 + 1] == doctest::Approx(-0.5));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(d0[i * 3 + j] == dt[j * 3 + i]);
}

TEST_CASE("BiCGSTAB, dense LU and sparse LU agree with a long-double oracle") {
  std::mt19937_64 rng(77);
  for (auto level : simd::available_levels()) {
    const auto& kt = simd::table_for(level);
    for (std::size_t n : {5u, 40u, 300u}) {
      auto q = random_q(n, rng);
      auto b = random_vec(n, rng);
      auto a = linalg::dense_system(q);
      oracle::Mat m(n, std::vector<long double>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i * n + j];
      auto ref = oracle::gauss(m, std::vector<long double>(b.begin(), b.end()));

      std::vector<double> x(n, 0.0);
      auto res = linalg::bicgstab(q, b, x, 1e-13, 10 * n + 100, kt);
      CHECK(res.converged);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(x[i] - double(ref[i])) < 1e-11);

      linalg::DenseLU lu(a, n);
      auto xd = b;
      lu.solve(xd);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(xd[i] - double(ref[i])) < 1e-12);

      linalg::SparseDirect sd(q);
      auto xs = b;
      sd.solve(xs, 1);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(xs[i] - double(ref[i])) < 1e-12);

      // transpose solve: (I - Q)^T z = b
      oracle::Mat mt(n, std::vector<long double>(n));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mt[i][j] = a[j * n + i];
      auto reft = oracle::gauss(mt, std::vector<long double>(b.begin(), b.end()));
      auto xt = b;
      sd.solve_transpose(xt, 1);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(xt[i] - double(reft[i])) < 1e-12);
    }
  }
}

TEST_CASE("sparse LU handles blocks of right-hand sides") {
  std::mt19937_64 rng(4);
  const std::size_t n = 60, k = 5;
  auto q = random_q(n, rng);
  linalg::SparseDirect sd(q);
  std::vector<double> block(n * k);
  for (auto& v : block) v = random_vec(1, rng)[0];
  auto one_by_one = block;
  sd.solve(block, k);
  for (std::size_t c = 0; c < k; ++c) sd.solve(std::span<double>(one_by_one.data() + c * n, n), 1);
  CHECK(bits_equal(block, one_by_one));
}

TEST_CASE("Philox4x32-10 known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("path streams are reproducible, distinct and uniform") {
  PathStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differ_path = false, differ_seed = false;
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differ_path = differ_path || x != c.uniform();
    differ_seed = differ_seed || x != d.uniform();
    sum += x;
  }
  CHECK(differ_path);
  CHECK(differ_seed);
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}
