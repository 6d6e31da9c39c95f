#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace ppthin {

/// Seeded random stream. A stream is identified by (master seed, stream
/// index); distinct indices give statistically independent substreams and the
/// same pair reproduces the exact same draws. All variate generation below is
/// implemented directly on top of the raw 64-bit engine output, so sequences
/// are identical across standard libraries and platforms.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0);

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_index() const { return index_; }

  /// Child stream derived from this stream's identity. Children with distinct
  /// indices are independent of each other and of the parent.
  RngStream substream(std::uint64_t child_index) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0,1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform on {0, 1, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);
  /// Exponential with the given rate.
  double exponential(double rate);
  /// Exact Poisson variate (product method, mean split into bounded chunks).
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  std::uint64_t master_ = 0;
  std::uint64_t index_ = 0;
};

}  // namespace ppthin
