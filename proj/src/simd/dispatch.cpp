#include <atomic>
#include <cstdlib>
#include <string>

#include "lipwalk/error.hpp"
#include "lipwalk/simd/kernels.hpp"

namespace lipwalk::simd {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kScalar: return "scalar";
    case Level::kAvx2: return "avx2";
    case Level::kAvx512: return "avx512";
    case Level::kNeon: return "neon";
  }
  return "?";
}

std::vector<Level> available_levels() {
  std::vector<Level> levels{Level::kScalar};
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) levels.push_back(Level::kAvx2);
  if (__builtin_cpu_supports("avx512f")) levels.push_back(Level::kAvx512);
#elif defined(__aarch64__)
  levels.push_back(Level::kNeon);
#endif
  return levels;
}

const KernelTable& table_for(Level level) {
  for (Level l : available_levels()) {
    if (l != level) continue;
    switch (level) {
      case Level::kScalar: return scalar::table();
#if defined(__x86_64__) || defined(_M_X64)
      case Level::kAvx2: return avx2::table();
      case Level::kAvx512: return avx512::table();
#endif
#if defined(__aarch64__)
      case Level::kNeon: return neon::table();
#endif
      default: break;
    }
  }
  fail(ErrorKind::kInvalidArgument, "SIMD level " + std::string(to_string(level)) + " is not supported here");
}

namespace {

const KernelTable* initial_table() {
  if (const char* env = std::getenv("LIPWALK_SIMD")) {
    std::string want(env);
    for (Level l : {Level::kScalar, Level::kAvx2, Level::kAvx512, Level::kNeon}) {
      if (want == to_string(l)) return &table_for(l);
    }
    fail(ErrorKind::kInvalidArgument, "LIPWALK_SIMD='" + want + "' is not a SIMD level");
  }
  return &table_for(available_levels().back());
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{initial_table()};
  return t;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_level(Level level) { current().store(&table_for(level), std::memory_order_release); }

}  // namespace lipwalk::simd
