#pragma once

#include <cstdint>
#include <initializer_list>

namespace wrg {

// Finalizer of the splitmix64 generator; full-avalanche 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Hash an integer tuple into a stream seed. Every random quantity in the
// library is drawn from a stream keyed this way, so sampling order and
// thread layout cannot change results.
inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (std::uint64_t p : parts) {
    h += 0x9e3779b97f4a7c15ull;
    h = mix64(h ^ p);
  }
  return h;
}

// Domain separation tags for derived streams.
inline constexpr std::uint64_t kNodeStream = 0x6e6f6465ull;
inline constexpr std::uint64_t kEdgeStream = 0x65646765ull;
inline constexpr std::uint64_t kTrialStream = 0x7472696cull;

// Small keyed PRNG (splitmix64). One instance per sampled quantity.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to pass to log().
  double next_unit_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace wrg
