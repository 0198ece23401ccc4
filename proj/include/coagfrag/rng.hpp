#pragma once

// Reproducible random streams identified by (seed, stream_id).

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace coagfrag {

/// A 64-bit Mersenne Twister keyed by (seed, stream_id) through splitmix64.
/// Identical keys reproduce identical draws. A stream is a value; copy it to
/// fork an identical sequence, derive() to get an unrelated one. Not to be
/// shared between threads.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream for sub-task `index` (e.g. a Monte Carlo chunk).
  RngStream derive(std::uint64_t index) const;

  /// Uniform on the open interval (0, 1).
  double uniform();
  double gamma(double shape);
  double beta(double a, double b);
  /// Index drawn with probability proportional to weights.
  std::size_t categorical(std::span<const double> weights);

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::gamma_distribution<double> gamma_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a, used to turn case names into stream ids.
std::uint64_t fnv1a(std::string_view text);

}  // namespace coagfrag
