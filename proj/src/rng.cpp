#include "coagfrag/rng.hpp"

#include <cmath>

#include <boost/random/uniform_01.hpp>
#include <fmt/format.h>

#include "coagfrag/errors.hpp"

namespace coagfrag {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

RngStream RngStream::derive(std::uint64_t index) const {
  return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(index + 1)));
}

double RngStream::uniform() {
  boost::random::uniform_01<double> u;
  double x;
  do {
    x = u(engine_);
  } while (x == 0.0);
  return x;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw DomainError(fmt::format("gamma draw: shape={} must be positive", shape));
  return gamma_(engine_, std::gamma_distribution<double>::param_type(shape));
}

double RngStream::beta(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError(fmt::format("beta draw: parameters ({}, {}) must be positive", a, b));
  // Ratio of gammas; for shape < 1 use Gamma(a) = Gamma(a + 1) U^{1/a} in log
  // form so tiny draws do not underflow to 0/0.
  using Param = std::gamma_distribution<double>::param_type;
  auto log_gamma_draw = [this](double shape) {
    if (shape >= 1.0) return std::log(gamma_(engine_, Param(shape)));
    return std::log(gamma_(engine_, Param(shape + 1.0))) + std::log(uniform()) / shape;
  };
  const double la = log_gamma_draw(a);
  const double lb = log_gamma_draw(b);
  return 1.0 / (1.0 + std::exp(lb - la));
}

std::size_t RngStream::categorical(std::span<const double> weights) {
  if (weights.empty()) throw DomainError("categorical: no weights");
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

}  // namespace coagfrag
