#include "augkit/rng.hpp"

#include <cmath>

#include "augkit/error.hpp"

namespace augkit {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t splitmix_next(std::uint64_t& s) {
  s += kGolden;
  return mix64(s);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t s = seed ^ mix64(stream_id + kGolden);
  for (auto& word : state_) word = splitmix_next(s);
  // xoshiro256++ must not start from the all-zero state.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw InvalidParameterError("next_below: bound must be >= 1");
  // Rejection below 2^64 mod bound keeps the draw unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

double RngStream::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidParameterError("uniform: bounds must be finite");
  if (lo > hi) throw InvalidParameterError("uniform: lo > hi");
  // 53-bit mantissa draw in [0,1).
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  double v = lo + (hi - lo) * u;
  if (v < lo) v = lo;
  if (v >= hi && lo < hi) v = std::nextafter(hi, lo);
  return v;
}

RngStream derive_stream(const RngStream& master, std::uint64_t index) {
  const std::uint64_t child_id =
      mix64(master.stream_id() ^ mix64(index + kGolden));
  return RngStream(master.seed(), child_id);
}

}  // namespace augkit
