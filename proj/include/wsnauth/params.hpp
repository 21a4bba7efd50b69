#ifndef WSNAUTH_PARAMS_HPP
#define WSNAUTH_PARAMS_HPP

#include <cstddef>
#include <cstdint>
#include <string>

#include "wsnauth/bytes.hpp"
#include "wsnauth/errors.hpp"

namespace wsnauth {

// System-wide parameters fixed at setup time and shared by every party.
// The default suite is P-256 with 256-bit keys; omega (the bit length of
// the masked-identity hash) is not stored because it is fully determined
// by id_len and the cipher nonce length.
struct SysParams {
  std::string curve_id = "p256";
  std::uint32_t kappa = 256;   // session-key bits
  std::uint32_t ell = 256;     // MAC / symmetric-key bits
  std::uint32_t id_len = 16;   // identity field width, bytes
  std::int64_t ts_window = 60; // freshness window, seconds

  static constexpr std::size_t kNonceLen = 16;  // cipher nonce, bytes
  static constexpr std::size_t kPointLen = 33;  // compressed point, bytes
  static constexpr std::size_t kMacLen = 32;    // MAC tag, bytes

  std::size_t kappa_bytes() const { return kappa / 8; }
  std::size_t ell_bytes() const { return ell / 8; }

  // Masked-identity width: XOR pad must cover the whole encrypted identity
  // record, i.e. nonce plus a two-identity plaintext.
  std::size_t omega_bytes() const { return kNonceLen + 2 * id_len; }

  bool operator==(const SysParams&) const = default;
};

// Canonical key = value text; parse(format(p)) == p.
std::string format_params(const SysParams& p);
Result<SysParams> parse_params(std::string_view text);

// Rejects parameter combinations the default suite cannot serve.
Result<void> validate_params(const SysParams& p);

// Pads an application identity to the fixed field width with trailing
// zero bytes. Longer inputs are refused, never truncated.
Result<Bytes> pad_id(const SysParams& p, BytesView raw);

}  // namespace wsnauth

#endif
