#pragma once

#include <array>
#include <cstdint>

namespace lipwalk {

/// Philox4x32-10 (Salmon et al., counter-based). A block function: the same
/// (counter, key) always maps to the same four 32-bit words.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Independent stream for one path: key = seed, counter = (path, position).
/// Draw n of path p is the same regardless of which thread runs the path.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

 private:
  Philox4x32::Key key_;
  std::uint64_t path_;
  std::uint64_t position_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace lipwalk
