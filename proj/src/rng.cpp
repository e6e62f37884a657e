#include "kinmv/rng.hpp"

#include <cmath>
#include <numbers>

namespace kinmv {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void MulHiLo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline double ToUnit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::Generate(Counter counter, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, counter[0], hi0, lo0);
    MulHiLo(kPhiloxM1, counter[2], hi1, lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return counter;
}

CounterRng::CounterRng(std::uint64_t seed, StreamDomain domain) noexcept
    : seed_(seed),
      domain_(domain),
      key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)} {}

std::array<double, 2> CounterRng::UniformPair(std::uint32_t stream,
                                              std::uint32_t step,
                                              std::uint32_t block) const noexcept {
  const auto bits = Philox4x32::Generate(
      {stream, step, block, static_cast<std::uint32_t>(domain_)}, key_);
  return {ToUnit(bits[0], bits[1]), ToUnit(bits[2], bits[3])};
}

std::array<double, 2> CounterRng::NormalPair(std::uint32_t stream,
                                             std::uint32_t step,
                                             std::uint32_t block) const noexcept {
  const auto u = UniformPair(stream, step, block);
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u[0]));
  const double angle = 2.0 * std::numbers::pi * u[1];
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double CounterRng::Uniform(std::uint32_t stream, std::uint32_t step,
                           std::uint32_t index) const noexcept {
  return UniformPair(stream, step, index / 2)[index % 2];
}

double CounterRng::Normal(std::uint32_t stream, std::uint32_t step,
                          std::uint32_t index) const noexcept {
  return NormalPair(stream, step, index / 2)[index % 2];
}

}  // namespace kinmv
