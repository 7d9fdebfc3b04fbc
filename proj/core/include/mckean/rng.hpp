#ifndef MCKEAN_RNG_HPP
#define MCKEAN_RNG_HPP

#include <cstdint>
#include <limits>

namespace mckean {

// Named sub-stream families derived from the single experiment seed.
enum class StreamTag : std::uint64_t {
  kParticle = 0x70617274ULL,
  kReplica = 0x7265706cULL,
  kMode = 0x6d6f6465ULL,
  kGibbs = 0x67696262ULL,
  kSampling = 0x73616d70ULL,
  kPerturbation = 0x70657274ULL,
  kInitial = 0x696e6974ULL,
};

// SplitMix64 finaliser; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Key of the stream (seed, tag, a, b). Distinct tuples give unrelated keys,
// so streams can be created in any order on any thread.
constexpr std::uint64_t stream_key(std::uint64_t seed, StreamTag tag,
                                   std::uint64_t a = 0,
                                   std::uint64_t b = 0) noexcept {
  std::uint64_t k = mix64(seed ^ 0x6d636b65616e6c62ULL);
  k = mix64(k ^ static_cast<std::uint64_t>(tag));
  k = mix64(k ^ mix64(a + 0x1234567ULL));
  k = mix64(k ^ mix64(b + 0x89abcdefULL));
  return k;
}

/// Counter-based generator: the n-th output is a pure function of
/// (key, n), which makes every stream reproducible regardless of how work is
/// scheduled. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng() = default;
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  friend bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace mckean

#endif  // MCKEAN_RNG_HPP
