#include "phaseforge/rng.hpp"

#include <cmath>
#include <numbers>

namespace phaseforge {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

// (0, 1]: never zero so log() stays finite.
inline double open_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }
// [0, 1)
inline double half_open_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

Philox4x64::Counter Philox4x64::block(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

GaussianStream::GaussianStream(std::uint64_t seed, Domain domain, std::uint64_t stream)
    : key_{seed, static_cast<std::uint64_t>(domain)}, stream_(stream) {}

std::array<double, 4> GaussianStream::block(std::uint64_t b) const {
  const auto w = Philox4x64::block({b, stream_, 0, 0}, key_);
  std::array<double, 4> out{};
  for (int pair = 0; pair < 2; ++pair) {
    const double radius = std::sqrt(-2.0 * std::log(open_unit(w[2 * pair])));
    const double angle = 2.0 * std::numbers::pi * half_open_unit(w[2 * pair + 1]);
    out[2 * pair] = radius * std::cos(angle);
    out[2 * pair + 1] = radius * std::sin(angle);
  }
  return out;
}

double GaussianStream::at(std::uint64_t i) const { return block(i / 4)[i % 4]; }

double GaussianStream::uniform_at(std::uint64_t i) const {
  // Counter word 2 distinguishes the uniform stream from the normal one.
  const auto w = Philox4x64::block({i / 4, stream_, 1, 0}, key_);
  return half_open_unit(w[i % 4]);
}

}  // namespace phaseforge
