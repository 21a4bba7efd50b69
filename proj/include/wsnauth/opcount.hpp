#ifndef WSNAUTH_OPCOUNT_HPP
#define WSNAUTH_OPCOUNT_HPP

#include <cstdint>
#include <string>

namespace wsnauth {

// Cost-model tally: point multiplications (M), map-to-point hashes (P,
// unused by this scheme but kept for table parity), symmetric cipher
// calls (E), MAC computations (A), and plain hashes (H). XORs and point
// validation are free.
struct OpCounter {
  std::uint32_t m = 0;  // scalar-point multiplication
  std::uint32_t p = 0;  // map-to-point hash
  std::uint32_t e = 0;  // symmetric encryption / decryption
  std::uint32_t a = 0;  // MAC generation / verification
  std::uint32_t h = 0;  // one-way hash

  OpCounter& operator+=(const OpCounter& o) {
    m += o.m;
    p += o.p;
    e += o.e;
    a += o.a;
    h += o.h;
    return *this;
  }
  friend OpCounter operator+(OpCounter x, const OpCounter& y) { return x += y; }
  bool operator==(const OpCounter&) const = default;
};

std::string format_ops(const OpCounter& c);

struct SessionAudit {
  OpCounter user;
  OpCounter gateway;
  OpCounter sensor;

  OpCounter total() const { return user + gateway + sensor; }
};

// Published per-session costs this implementation must reproduce exactly.
inline constexpr OpCounter kExpectedUserOps{2, 0, 1, 1, 4};
inline constexpr OpCounter kExpectedGatewayOps{1, 0, 3, 2, 1};
inline constexpr OpCounter kExpectedSensorOps{0, 0, 1, 1, 2};
inline constexpr OpCounter kExpectedTotalOps{3, 0, 5, 4, 7};

// Runs one honest authenticated key exchange with a metered crypto layer
// per role and returns the exact operation counts. Registration and any
// test bookkeeping are excluded from the tally.
SessionAudit audited_session(std::uint64_t seed);

// Human-readable table plus a PASS/FAIL line per row. Byte-stable for
// equal inputs.
std::string audit_report(const SessionAudit& audit);

// `role.op = n` lines (roles u, gw, sn, total; ops M, P, E, A, H).
std::string audit_machine_report(const SessionAudit& audit);

bool audit_matches_expected(const SessionAudit& audit);

}  // namespace wsnauth

#endif
