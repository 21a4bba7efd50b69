#ifndef WSNAUTH_CLOCK_HPP
#define WSNAUTH_CLOCK_HPP

#include <cstdint>

namespace wsnauth {

// Seconds since the Unix epoch. Wire encoding is 8-byte big-endian.
using Timestamp = std::int64_t;

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock : public Clock {
 public:
  Timestamp now() const override;
};

// Adversary-controllable time for the harness: starts at a fixed base and
// only moves forward.
class VirtualClock : public Clock {
 public:
  static constexpr Timestamp kDefaultBase = 1'700'000'000;

  explicit VirtualClock(Timestamp base = kDefaultBase) : t_(base) {}
  Timestamp now() const override { return t_; }

  void advance(std::int64_t seconds) {
    if (seconds > 0) t_ += seconds;
  }

 private:
  Timestamp t_;
};

}  // namespace wsnauth

#endif
