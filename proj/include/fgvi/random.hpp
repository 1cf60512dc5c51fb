#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace fgvi {

/// Seeded source for every random draw in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniforms and normals are produced by our own transforms rather
/// than std::*_distribution (whose algorithms are implementation-defined), so
/// a seed replays the same draws on every platform:
///   - uniform: top 53 bits of one engine output, mapped to the open interval
///     (0, 1) as (k + 0.5) / 2^53;
///   - normal: Marsaglia's polar method on pairs of uniforms on (-1, 1), the
///     second variate of each accepted pair cached for the next call.
/// Changing either transform requires bumping kName.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64+polar/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace fgvi
