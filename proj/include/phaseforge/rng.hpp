#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace phaseforge {

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11).
/// Every output block is a pure function of (counter, key), so any block of
/// any sub-stream can be produced without draining the ones before it.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// splitmix64 finalizer; a bijective 64-bit mixer used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

/// Key domain tags so ensembles, signals and solver-internal draws never collide.
enum class Domain : std::uint64_t {
  Ensemble = 0,
  Signal = 1,
  Internal = 2,
};

/// Deterministic standard normals addressed by (seed, domain, stream, index).
///
/// Uniforms come from 53-bit mantissas of Philox words and are mapped through
/// Box-Muller, so each block yields exactly four normals with no rejection.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, Domain domain, std::uint64_t stream);

  /// The four normals of block `b`.
  std::array<double, 4> block(std::uint64_t b) const;

  /// The i-th normal of the stream.
  double at(std::uint64_t i) const;

  /// Uniform in [0, 1) from the i-th 64-bit word of a parallel uniform stream.
  double uniform_at(std::uint64_t i) const;

 private:
  Philox4x64::Key key_;
  std::uint64_t stream_;
};

}  // namespace phaseforge
