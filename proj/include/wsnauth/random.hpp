#ifndef WSNAUTH_RANDOM_HPP
#define WSNAUTH_RANDOM_HPP

#include <cstdint>
#include <span>

#include "wsnauth/bytes.hpp"

namespace wsnauth {

class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  Bytes bytes(std::size_t n) {
    Bytes b(n);
    fill(b);
    return b;
  }
};

// Process-wide CSPRNG.
class SystemRandom : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

// Deterministic stream for reproducible runs: hash-counter DRBG keyed by
// the seed. Identical seeds yield identical byte streams.
class SeededRandom : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : seed_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  Bytes buffer_;
};

}  // namespace wsnauth

#endif
