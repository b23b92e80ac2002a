#pragma once

#include <array>
#include <cstdint>

namespace augkit {

// Deterministic stream of pseudo-random numbers, fully specified by
// (seed, stream_id).  The generator and the uniform mapping are fixed
// here rather than taken from <random> distributions, whose output is
// not pinned down across standard libraries; identical (seed, stream_id)
// therefore reproduces identical draws on every platform.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Raw 64-bit draw; advances the stream.
  std::uint64_t next_u64();

  // Unbiased draw in [0, bound); bound must be >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  // Draw in [lo, hi); lo == hi returns lo.  Always consumes exactly one
  // raw draw.  Throws InvalidParameterError when lo > hi or either bound
  // is non-finite.
  double uniform(double lo, double hi);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_;
};

// Child stream for a work item.  Pure function of (master.seed,
// master.stream_id, index): does not read or advance the master's
// position, so items can be processed in any order or in parallel.
RngStream derive_stream(const RngStream& master, std::uint64_t index);

}  // namespace augkit
