#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace lipwalk::simd {

/// Column-major ELLPACK view of the killed transition matrix P restricted to
/// the interior unknowns: entry j of row i lives at [j * stride + i]. Unused
/// slots carry weight 0 and point at their own row, so they read a finite
/// value and contribute nothing.
struct EllView {
  const std::int32_t* col = nullptr;
  const double* weight = nullptr;
  std::size_t rows = 0;
  std::size_t width = 0;
  std::size_t stride = 0;
};

enum class Level { kScalar, kAvx2, kAvx512, kNeon };

std::string_view to_string(Level level);

/// One implementation of every inner loop the solvers need.
struct KernelTable {
  Level level;
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// y = x + a * y
  void (*xpay)(const double* x, double a, double* y, std::size_t n);
  double (*norm_inf)(const double* x, std::size_t n);
  /// y = x - P x
  void (*apply_a)(const EllView& p, const double* x, double* y);
  /// r = b - (x - P x)
  void (*residual)(const EllView& p, const double* b, const double* x, double* r);
};

namespace scalar {
const KernelTable& table();
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
const KernelTable& table();
}
namespace avx512 {
const KernelTable& table();
}
#endif
#if defined(__aarch64__)
namespace neon {
const KernelTable& table();
}
#endif

/// Levels this CPU can run, scalar first.
std::vector<Level> available_levels();

/// The table in use. Chosen on first call: the LIPWALK_SIMD environment
/// variable (scalar|avx2|avx512|neon) if set, else the widest supported.
const KernelTable& active();

/// Switches the active table; invalid-argument error if unsupported here.
void set_level(Level level);

const KernelTable& table_for(Level level);

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}

inline double norm_inf(std::span<const double> x) { return active().norm_inf(x.data(), x.size()); }

}  // namespace lipwalk::simd
