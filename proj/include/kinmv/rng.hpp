#pragma once

#include <array>
#include <cstdint>

namespace kinmv {

// Philox4x32-10 (Salmon, Moraes, Dror, Shaw; SC'11). A keyed bijection on
// 128-bit counters: the value for a given (key, counter) never depends on
// how many values were drawn before it.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter Generate(Counter counter, Key key) noexcept;
};

// Disjoint counter spaces. Every random quantity in the library is drawn from
// exactly one domain, so e.g. initial states never share bits with Wiener
// increments.
enum class StreamDomain : std::uint32_t {
  kWiener = 0,
  kInitial = 1,
  kReferenceWiener = 2,
  kReferenceInitial = 3,
  kSubsample = 4,
  kSampler = 5,
  kQuadrature = 6,
  kProjection = 7,
};

// Counter-based stream. Value `index` of the substream (stream, step) is
//
//   block  = Philox(key = seed, counter = {stream, step, index / 2, domain})
//   u0     = ((w0 << 32 | w1) >> 11) * 2^-53, u1 likewise from (w2, w3)
//   g0, g1 = sqrt(-2 ln(1 - u0)) * (cos, sin)(2 pi u1)
//
// and uniform()/normal() return component index % 2.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamDomain domain) noexcept;

  std::array<double, 2> UniformPair(std::uint32_t stream, std::uint32_t step,
                                    std::uint32_t block) const noexcept;
  std::array<double, 2> NormalPair(std::uint32_t stream, std::uint32_t step,
                                   std::uint32_t block) const noexcept;

  double Uniform(std::uint32_t stream, std::uint32_t step,
                 std::uint32_t index) const noexcept;
  double Normal(std::uint32_t stream, std::uint32_t step,
                std::uint32_t index) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  StreamDomain domain() const noexcept { return domain_; }

 private:
  std::uint64_t seed_;
  StreamDomain domain_;
  Philox4x32::Key key_;
};

}  // namespace kinmv
