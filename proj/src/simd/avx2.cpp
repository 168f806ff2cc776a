// AVX2 variants. Built with -mavx2 -mfma -ffp-contract=off; row kernels use
// separate multiply and add so each lane reproduces the scalar sum exactly.

#include <immintrin.h>

#include <cmath>

#include "lipwalk/simd/kernels.hpp"

namespace lipwalk::simd::avx2 {

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
  }
  __m256d a = _mm256_add_pd(a0, a1);
  __m128d lo = _mm256_castpd256_pd128(a);
  __m128d hi = _mm256_extractf128_pd(a, 1);
  lo = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d yv = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(av, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

double norm_inf(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

inline __m256d row_sum4(const EllView& p, const double* x, std::size_t i) {
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t j = 0; j < p.width; ++j) {
    std::size_t k = j * p.stride + i;
    __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p.col + k));
    __m256d xv = _mm256_i32gather_pd(x, idx, 8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(p.weight + k), xv));
  }
  return acc;
}

double row_sum1(const EllView& p, const double* x, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.width; ++j) {
    std::size_t k = j * p.stride + i;
    s += p.weight[k] * x[p.col[k]];
  }
  return s;
}

void apply_a(const EllView& p, const double* x, double* y) {
  std::size_t i = 0;
  for (; i + 4 <= p.rows; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), row_sum4(p, x, i)));
  }
  for (; i < p.rows; ++i) y[i] = x[i] - row_sum1(p, x, i);
}

void residual(const EllView& p, const double* b, const double* x, double* r) {
  std::size_t i = 0;
  for (; i + 4 <= p.rows; i += 4) {
    __m256d ax = _mm256_sub_pd(_mm256_loadu_pd(x + i), row_sum4(p, x, i));
    _mm256_storeu_pd(r + i, _mm256_sub_pd(_mm256_loadu_pd(b + i), ax));
  }
  for (; i < p.rows; ++i) r[i] = b[i] - (x[i] - row_sum1(p, x, i));
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Level::kAvx2, dot, axpy, xpay, norm_inf, apply_a, residual};
  return t;
}

}  // namespace lipwalk::simd::avx2
