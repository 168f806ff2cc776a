// AVX-512F variants, eight rows per gather. Same exactness rules as avx2.cpp.

#include <immintrin.h>

#include <cmath>

#include "lipwalk/simd/kernels.hpp"

namespace lipwalk::simd::avx512 {

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  __m512d a0 = _mm512_setzero_pd();
  __m512d a1 = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    a0 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i), a0);
    a1 = _mm512_fmadd_pd(_mm512_loadu_pd(x + i + 8), _mm512_loadu_pd(y + i + 8), a1);
  }
  double s = _mm512_reduce_add_pd(_mm512_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m512d av = _mm512_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm512_storeu_pd(y + i, _mm512_add_pd(_mm512_loadu_pd(y + i), _mm512_mul_pd(av, _mm512_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  const __m512d av = _mm512_set1_pd(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm512_storeu_pd(y + i, _mm512_add_pd(_mm512_loadu_pd(x + i), _mm512_mul_pd(av, _mm512_loadu_pd(y + i))));
  }
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

double norm_inf(const double* x, std::size_t n) {
  __m512d m = _mm512_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) m = _mm512_max_pd(m, _mm512_abs_pd(_mm512_loadu_pd(x + i)));
  double r = _mm512_reduce_max_pd(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

inline __m512d row_sum8(const EllView& p, const double* x, std::size_t i) {
  __m512d acc = _mm512_setzero_pd();
  for (std::size_t j = 0; j < p.width; ++j) {
    std::size_t k = j * p.stride + i;
    __m256i idx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p.col + k));
    __m512d xv = _mm512_i32gather_pd(idx, x, 8);
    acc = _mm512_add_pd(acc, _mm512_mul_pd(_mm512_loadu_pd(p.weight + k), xv));
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
  for (; i + 8 <= p.rows; i += 8) {
    _mm512_storeu_pd(y + i, _mm512_sub_pd(_mm512_loadu_pd(x + i), row_sum8(p, x, i)));
  }
  for (; i < p.rows; ++i) y[i] = x[i] - row_sum1(p, x, i);
}

void residual(const EllView& p, const double* b, const double* x, double* r) {
  std::size_t i = 0;
  for (; i + 8 <= p.rows; i += 8) {
    __m512d ax = _mm512_sub_pd(_mm512_loadu_pd(x + i), row_sum8(p, x, i));
    _mm512_storeu_pd(r + i, _mm512_sub_pd(_mm512_loadu_pd(b + i), ax));
  }
  for (; i < p.rows; ++i) r[i] = b[i] - (x[i] - row_sum1(p, x, i));
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Level::kAvx512, dot, axpy, xpay, norm_inf, apply_a, residual};
  return t;
}

}  // namespace lipwalk::simd::avx512
