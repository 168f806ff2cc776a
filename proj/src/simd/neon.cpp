// NEON variants for aarch64. There is no gather, so each row pair loads its
// two operands by lane.

#include <arm_neon.h>

#include <cmath>

#include "lipwalk/simd/kernels.hpp"

namespace lipwalk::simd::neon {

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
    a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(av, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(x + i), vmulq_f64(av, vld1q_f64(y + i))));
  for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

double norm_inf(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

inline float64x2_t row_sum2(const EllView& p, const double* x, std::size_t i) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t j = 0; j < p.width; ++j) {
    std::size_t k = j * p.stride + i;
    float64x2_t xv = vdupq_n_f64(x[p.col[k]]);
    xv = vsetq_lane_f64(x[p.col[k + 1]], xv, 1);
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(p.weight + k), xv));
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
  for (; i + 2 <= p.rows; i += 2) vst1q_f64(y + i, vsubq_f64(vld1q_f64(x + i), row_sum2(p, x, i)));
  for (; i < p.rows; ++i) y[i] = x[i] - row_sum1(p, x, i);
}

void residual(const EllView& p, const double* b, const double* x, double* r) {
  std::size_t i = 0;
  for (; i + 2 <= p.rows; i += 2) {
    float64x2_t ax = vsubq_f64(vld1q_f64(x + i), row_sum2(p, x, i));
    vst1q_f64(r + i, vsubq_f64(vld1q_f64(b + i), ax));
  }
  for (; i < p.rows; ++i) r[i] = b[i] - (x[i] - row_sum1(p, x, i));
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Level::kNeon, dot, axpy, xpay, norm_inf, apply_a, residual};
  return t;
}

}  // namespace lipwalk::simd::neon
