#ifndef WSNAUTH_PRIMITIVES_HPP
#define WSNAUTH_PRIMITIVES_HPP

#include <cstdint>

#include "wsnauth/bytes.hpp"
#include "wsnauth/errors.hpp"
#include "wsnauth/opcount.hpp"
#include "wsnauth/params.hpp"
#include "wsnauth/random.hpp"

namespace wsnauth {

// Domain separation tags for the hash family. Every hash input is
// tag-prefixed, so outputs of different families never collide even on
// identical messages. Legacy is reserved for the reference scheme under
// attack in attacks.hpp and is never used by this protocol.
enum class HashDomain : std::uint8_t {
  H = 0x01,       // kappa-bit outputs (session keys, authenticators)
  J = 0x02,       // ell-bit outputs (MAC / cipher keys)
  I = 0x03,       // omega-bit outputs (identity masking pad)
  Legacy = 0x10,  // fixed 256-bit, reference scheme only
};

// Group order of P-256, big-endian.
Bytes p256_order_be();

// Scalar in [1, q-1], held as 32 big-endian bytes.
class Scalar {
 public:
  // Empty placeholder; usable values come from the named constructors.
  Scalar() = default;

  static Result<Scalar> from_bytes(BytesView be32);
  static Result<Scalar> from_u64(std::uint64_t v);
  static Scalar random(RandomSource& rng);

  BytesView bytes() const { return be_; }
  bool operator==(const Scalar&) const = default;

 private:
  Bytes be_;
};

Scalar scalar_mul_mod_order(const Scalar& a, const Scalar& b);

// Point on P-256 in compressed form (33 bytes, 0x02/0x03 prefix). decode
// enforces a canonical on-curve, non-identity encoding; cofactor 1 makes
// every such point a member of the prime-order group.
class GroupElement {
 public:
  // Empty placeholder; every usable value comes from decode().
  GroupElement() = default;

  static Result<GroupElement> decode(BytesView compressed);

  BytesView bytes() const { return compressed_; }
  bool operator==(const GroupElement&) const = default;

 private:
  Bytes compressed_;
};

struct SymKey {
  Bytes k;
  bool operator==(const SymKey&) const = default;
};

struct MacTag {
  Bytes t;
  bool operator==(const MacTag&) const = default;
};

// Nonce-prefixed stream-cipher output; body length equals plaintext
// length, so record sizes stay fixed-width on the wire.
struct Ciphertext {
  Bytes nonce;
  Bytes body;

  Bytes encoded() const;
  static Result<Ciphertext> from_bytes(BytesView raw);
  bool operator==(const Ciphertext&) const = default;
};

// Crypto suite bound to one parameter set. All protocol-level cost-model
// operations flow through here; attach a meter to tally them. The suite
// itself is stateless apart from the optional meter, so const methods are
// safe to share across threads when no meter is attached.
class Suite {
 public:
  explicit Suite(SysParams params);

  const SysParams& params() const { return params_; }
  void set_meter(OpCounter* meter) { meter_ = meter; }

  GroupElement generator() const;

  // Counts one M.
  GroupElement scalar_mult(const Scalar& s, const GroupElement& p) const;

  // Tag-length output per domain: H -> kappa/8, J -> ell/8, I -> omega/8
  // (built by counter-mode expansion), Legacy -> 32. Counts one H.
  Bytes hash(HashDomain d, BytesView msg) const;

  // HMAC over the ell-bit key; tag is kMacLen bytes. Each call counts one
  // A; verification does not route through generation.
  MacTag mac_generate(const SymKey& key, BytesView msg) const;
  Result<bool> mac_verify(const SymKey& key, BytesView msg,
                          const MacTag& tag) const;

  // Length-preserving stream encryption under a fresh random nonce.
  // Counts one E per call (either direction).
  Ciphertext sym_encrypt(const SymKey& key, BytesView plaintext,
                         RandomSource& rng) const;
  Bytes sym_decrypt(const SymKey& key, const Ciphertext& ct) const;

  // Group addition; not a cost-model operation. Used as an independent
  // cross-check of scalar_mult. Adding a point to its own inverse has no
  // affine result and reports InvalidPoint.
  Result<GroupElement> add(const GroupElement& a, const GroupElement& b) const;
  GroupElement negate(const GroupElement& p) const;

 private:
  SysParams params_;
  OpCounter* meter_ = nullptr;
};

}  // namespace wsnauth

#endif
