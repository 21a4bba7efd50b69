#include "wsnauth/primitives.hpp"

#include <openssl/bn.h>
#include <openssl/crypto.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/obj_mac.h>

#include <cstring>
#include <stdexcept>

namespace wsnauth {

namespace {

constexpr std::size_t kScalarLen = 32;
constexpr std::size_t kDigestLen = 32;

struct CurveCtx {
  EC_GROUP* group = nullptr;
  BIGNUM* order = nullptr;
  Bytes order_be;
  Bytes generator;
};

// Process-lifetime curve context; never freed.
const CurveCtx& curve() {
  static const CurveCtx* ctx = [] {
    auto* c = new CurveCtx;
    c->group = EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1);
    c->order = BN_new();
    if (c->group == nullptr || c->order == nullptr ||
        EC_GROUP_get_order(c->group, c->order, nullptr) != 1) {
      throw std::runtime_error("curve setup failed");
    }
    c->order_be.resize(kScalarLen);
    BN_bn2binpad(c->order, c->order_be.data(), kScalarLen);

    const EC_POINT* g = EC_GROUP_get0_generator(c->group);
    c->generator.resize(SysParams::kPointLen);
    if (EC_POINT_point2oct(c->group, g, POINT_CONVERSION_COMPRESSED,
                           c->generator.data(), c->generator.size(),
                           nullptr) != SysParams::kPointLen) {
      throw std::runtime_error("curve setup failed");
    }
    return c;
  }();
  return *ctx;
}

struct BnCtx {
  BN_CTX* ctx = BN_CTX_new();
  ~BnCtx() { BN_CTX_free(ctx); }
};

struct OwnedPoint {
  EC_POINT* p = nullptr;
  explicit OwnedPoint(const EC_GROUP* g) : p(EC_POINT_new(g)) {}
  ~OwnedPoint() { EC_POINT_free(p); }
};

struct OwnedBn {
  BIGNUM* n = BN_new();
  ~OwnedBn() { BN_free(n); }
};

// Decodes bytes that are already known to be a valid canonical encoding.
void must_decode(const EC_GROUP* g, EC_POINT* out, BytesView b, BN_CTX* ctx) {
  if (EC_POINT_oct2point(g, out, b.data(), b.size(), ctx) != 1) {
    throw std::logic_error("corrupt group element");
  }
}

Bytes point_bytes(const EC_GROUP* g, const EC_POINT* p, BN_CTX* ctx) {
  Bytes out(SysParams::kPointLen);
  if (EC_POINT_point2oct(g, p, POINT_CONVERSION_COMPRESSED, out.data(),
                         out.size(), ctx) != SysParams::kPointLen) {
    throw std::runtime_error("point encoding failed");
  }
  return out;
}

Bytes digest(BytesView msg) {
  Bytes out(kDigestLen);
  unsigned int len = 0;
  if (EVP_Digest(msg.data(), msg.size(), out.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != kDigestLen) {
    throw std::runtime_error("digest failed");
  }
  return out;
}

Bytes ctr_stream(const SymKey& key, BytesView nonce, BytesView input) {
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("cipher ctx failed");
  Bytes out(input.size());
  int len = 0;
  int ok = EVP_EncryptInit_ex(ctx, EVP_aes_256_ctr(), nullptr, key.k.data(),
                              nonce.data());
  if (ok == 1 && !input.empty()) {
    ok = EVP_EncryptUpdate(ctx, out.data(), &len, input.data(),
                           static_cast<int>(input.size()));
  }
  EVP_CIPHER_CTX_free(ctx);
  if (ok != 1) throw std::runtime_error("cipher failed");
  return out;
}

}  // namespace

Bytes p256_order_be() { return curve().order_be; }

Result<Scalar> Scalar::from_bytes(BytesView be32) {
  if (be32.size() != kScalarLen) return Error::InvalidScalar;
  OwnedBn v;
  BN_bin2bn(be32.data(), kScalarLen, v.n);
  if (BN_is_zero(v.n) || BN_cmp(v.n, curve().order) >= 0) {
    return Error::InvalidScalar;
  }
  Scalar s;
  s.be_.assign(be32.begin(), be32.end());
  return s;
}

Result<Scalar> Scalar::from_u64(std::uint64_t v) {
  Bytes be(kScalarLen, 0x00);
  for (int i = 0; i < 8; ++i) {
    be[kScalarLen - 1 - i] = static_cast<std::uint8_t>(v >> (8 * i));
  }
  return from_bytes(be);
}

Scalar Scalar::random(RandomSource& rng) {
  Bytes draw(kScalarLen);
  for (;;) {
    rng.fill(draw);
    auto s = from_bytes(draw);
    if (s.ok()) return std::move(s).value();
  }
}

Scalar scalar_mul_mod_order(const Scalar& a, const Scalar& b) {
  BnCtx bc;
  OwnedBn x, y, r;
  BN_bin2bn(a.bytes().data(), kScalarLen, x.n);
  BN_bin2bn(b.bytes().data(), kScalarLen, y.n);
  BN_mod_mul(r.n, x.n, y.n, curve().order, bc.ctx);
  Bytes be(kScalarLen);
  BN_bn2binpad(r.n, be.data(), kScalarLen);
  auto s = Scalar::from_bytes(be);
  if (!s.ok()) throw std::logic_error("scalar product out of range");
  return std::move(s).value();
}

Result<GroupElement> GroupElement::decode(BytesView compressed) {
  if (compressed.size() != SysParams::kPointLen) return Error::DecodeError;
  std::uint8_t prefix = compressed[0];
  if (prefix != 0x02 && prefix != 0x03) return Error::InvalidPoint;
  BnCtx bc;
  OwnedPoint p(curve().group);
  if (EC_POINT_oct2point(curve().group, p.p, compressed.data(),
                         compressed.size(), bc.ctx) != 1) {
    return Error::InvalidPoint;
  }
  if (EC_POINT_is_at_infinity(curve().group, p.p) == 1) {
    return Error::InvalidPoint;
  }
  GroupElement e;
  e.compressed_.assign(compressed.begin(), compressed.end());
  return e;
}

Bytes Ciphertext::encoded() const { return concat({nonce, body}); }

Result<Ciphertext> Ciphertext::from_bytes(BytesView raw) {
  if (raw.size() < SysParams::kNonceLen) return Error::DecodeError;
  Ciphertext ct;
  ct.nonce.assign(raw.begin(), raw.begin() + SysParams::kNonceLen);
  ct.body.assign(raw.begin() + SysParams::kNonceLen, raw.end());
  return ct;
}

Suite::Suite(SysParams params) : params_(std::move(params)) {
  if (auto v = validate_params(params_); !v.ok()) {
    throw std::invalid_argument("unsupported parameter set");
  }
}

GroupElement Suite::generator() const {
  auto g = GroupElement::decode(curve().generator);
  return std::move(g).value();
}

GroupElement Suite::scalar_mult(const Scalar& s, const GroupElement& p) const {
  if (meter_ != nullptr) meter_->m += 1;
  BnCtx bc;
  OwnedPoint in(curve().group), out(curve().group);
  must_decode(curve().group, in.p, p.bytes(), bc.ctx);
  OwnedBn k;
  BN_bin2bn(s.bytes().data(), kScalarLen, k.n);
  if (EC_POINT_mul(curve().group, out.p, nullptr, in.p, k.n, bc.ctx) != 1) {
    throw std::runtime_error("point multiplication failed");
  }
  auto e = GroupElement::decode(point_bytes(curve().group, out.p, bc.ctx));
  return std::move(e).value();
}

Bytes Suite::hash(HashDomain d, BytesView msg) const {
  if (meter_ != nullptr) meter_->h += 1;
  std::size_t out_len = 0;
  switch (d) {
    case HashDomain::H:
      out_len = params_.kappa_bytes();
      break;
    case HashDomain::J:
      out_len = params_.ell_bytes();
      break;
    case HashDomain::I:
      out_len = params_.omega_bytes();
      break;
    case HashDomain::Legacy:
      out_len = kDigestLen;
      break;
  }
  const std::uint8_t tag = static_cast<std::uint8_t>(d);
  if (out_len <= kDigestLen && d != HashDomain::I) {
    Bytes input;
    input.reserve(1 + msg.size());
    input.push_back(tag);
    append(input, msg);
    Bytes full = digest(input);
    full.resize(out_len);
    return full;
  }
  // Counter-mode expansion: block_i = digest(tag | be32(i) | msg).
  Bytes out;
  std::uint32_t counter = 0;
  while (out.size() < out_len) {
    Bytes input;
    input.reserve(5 + msg.size());
    input.push_back(tag);
    for (int shift = 24; shift >= 0; shift -= 8) {
      input.push_back(static_cast<std::uint8_t>(counter >> shift));
    }
    append(input, msg);
    append(out, digest(input));
    ++counter;
  }
  out.resize(out_len);
  return out;
}

MacTag Suite::mac_generate(const SymKey& key, BytesView msg) const {
  if (meter_ != nullptr) meter_->a += 1;
  MacTag tag;
  tag.t.resize(SysParams::kMacLen);
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.k.data(), static_cast<int>(key.k.size()),
           msg.data(), msg.size(), tag.t.data(), &len) == nullptr ||
      len != SysParams::kMacLen) {
    throw std::runtime_error("mac failed");
  }
  return tag;
}

Result<bool> Suite::mac_verify(const SymKey& key, BytesView msg,
                               const MacTag& tag) const {
  if (tag.t.size() != SysParams::kMacLen) return Error::DecodeError;
  if (meter_ != nullptr) meter_->a += 1;
  std::uint8_t expect[SysParams::kMacLen];
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.k.data(), static_cast<int>(key.k.size()),
           msg.data(), msg.size(), expect, &len) == nullptr ||
      len != SysParams::kMacLen) {
    throw std::runtime_error("mac failed");
  }
  return CRYPTO_memcmp(expect, tag.t.data(), SysParams::kMacLen) == 0;
}

Ciphertext Suite::sym_encrypt(const SymKey& key, BytesView plaintext,
                              RandomSource& rng) const {
  if (meter_ != nullptr) meter_->e += 1;
  Ciphertext ct;
  ct.nonce = rng.bytes(SysParams::kNonceLen);
  ct.body = ctr_stream(key, ct.nonce, plaintext);
  return ct;
}

Bytes Suite::sym_decrypt(const SymKey& key, const Ciphertext& ct) const {
  if (meter_ != nullptr) meter_->e += 1;
  return ctr_stream(key, ct.nonce, ct.body);
}

Result<GroupElement> Suite::add(const GroupElement& a,
                                const GroupElement& b) const {
  BnCtx bc;
  OwnedPoint pa(curve().group), pb(curve().group), r(curve().group);
  must_decode(curve().group, pa.p, a.bytes(), bc.ctx);
  must_decode(curve().group, pb.p, b.bytes(), bc.ctx);
  if (EC_POINT_add(curve().group, r.p, pa.p, pb.p, bc.ctx) != 1) {
    throw std::runtime_error("point addition failed");
  }
  if (EC_POINT_is_at_infinity(curve().group, r.p) == 1) {
    return Error::InvalidPoint;
  }
  return GroupElement::decode(point_bytes(curve().group, r.p, bc.ctx));
}

GroupElement Suite::negate(const GroupElement& p) const {
  BnCtx bc;
  OwnedPoint q(curve().group);
  must_decode(curve().group, q.p, p.bytes(), bc.ctx);
  if (EC_POINT_invert(curve().group, q.p, bc.ctx) != 1) {
    throw std::runtime_error("point negation failed");
  }
  auto e = GroupElement::decode(point_bytes(curve().group, q.p, bc.ctx));
  return std::move(e).value();
}

}  // namespace wsnauth
