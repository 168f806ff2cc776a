#include "lipwalk/rng.hpp"

namespace lipwalk {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

PathStream::PathStream(std::uint64_t seed, std::uint64_t path)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, path_(path) {}

double PathStream::uniform() {
  if (used_ >= 4) {
    buffer_ = Philox4x32::block({static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
                                 static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)},
                                key_);
    ++position_;
    used_ = 0;
  }
  const std::uint64_t hi = buffer_[static_cast<std::size_t>(used_)];
  const std::uint64_t lo = buffer_[static_cast<std::size_t>(used_ + 1)];
  used_ += 2;
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace lipwalk
