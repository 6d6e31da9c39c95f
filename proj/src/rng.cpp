#include "ppthin/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ppthin {

namespace {

// SplitMix64; used only to turn (seed, index) into well-mixed engine seeds.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_engine_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= index * 0xD1B54A32D192ED03ULL + 0x63652362A2B5F4A3ULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9E3779B97F4A7C15ULL);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : engine_(derive_engine_seed(master_seed, stream_index)),
      master_(master_seed),
      index_(stream_index) {}

RngStream RngStream::substream(std::uint64_t child_index) const {
  std::uint64_t s = index_;
  std::uint64_t mixed = splitmix64(s) ^ (child_index + 1) * 0x2545F4914F6CDD1DULL;
  std::uint64_t t = mixed;
  return RngStream(master_, splitmix64(t));
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

double RngStream::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be positive");
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return -std::log(u) / rate;
}

std::uint64_t RngStream::poisson(double mean) {
  if (mean < 0.0) throw std::invalid_argument("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  // Additivity: split large means into chunks small enough for the product
  // method to stay in double range.
  constexpr double kChunk = 30.0;
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double m = remaining > kChunk ? kChunk : remaining;
    remaining -= m;
    const double threshold = std::exp(-m);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > threshold) {
      ++k;
      prod *= uniform();
    }
    total += k;
  }
  return total;
}

}  // namespace ppthin
