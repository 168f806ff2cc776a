// Reference implementations. Every vector variant must agree with these:
// bit-for-bit for the row-wise kernels, to rounding for the reductions.

#include <cmath>

#include "lipwalk/simd/kernels.hpp"

namespace lipwalk::simd::scalar {

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

double norm_inf(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

double row_sum(const EllView& p, const double* x, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.width; ++j) {
    std::size_t k = j * p.stride + i;
    s += p.weight[k] * x[p.col[k]];
  }
  return s;
}

void apply_a(const EllView& p, const double* x, double* y) {
  for (std::size_t i = 0; i < p.rows; ++i) y[i] = x[i] - row_sum(p, x, i);
}

void residual(const EllView& p, const double* b, const double* x, double* r) {
  for (std::size_t i = 0; i < p.rows; ++i) r[i] = b[i] - (x[i] - row_sum(p, x, i));
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Level::kScalar, dot, axpy, xpay, norm_inf, apply_a, residual};
  return t;
}

}  // namespace lipwalk::simd::scalar
