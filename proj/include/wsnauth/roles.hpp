#ifndef WSNAUTH_ROLES_HPP
#define WSNAUTH_ROLES_HPP

#include <map>
#include <optional>
#include <set>
#include <utility>

#include "wsnauth/clock.hpp"
#include "wsnauth/wire.hpp"

namespace wsnauth {

// Remembers (t, x) pairs seen inside the freshness window so a captured
// message cannot be replayed while its timestamp is still live. Entries
// older than the window are pruned on use; outside the window the
// timestamp check already rejects.
class ReplayCache {
 public:
  bool contains(Timestamp t, BytesView x) const;
  void insert(Timestamp t, BytesView x);
  void prune(Timestamp now, std::int64_t window);
  std::size_t size() const { return entries_.size(); }

 private:
  std::set<std::pair<Timestamp, Bytes>> entries_;
};

// Long-lived gateway state. Not internally synchronized: the registry and
// replay cache expect one mutator at a time.
struct GatewaySecrets {
  Scalar y;              // master scalar
  SymKey z;              // master symmetric key
  GroupElement y_pub;    // y * P, published
  Bytes id_gw;           // id_len
  std::map<Bytes, SymKey> sensor_registry;  // sensor id -> shared key
  ReplayCache replay_cache;
};

// Everything a card stores. Deliberately absent: the user identity, the
// password, and any password verifier. xeid is the encrypted identity
// record XORed with a pad derived from (id, password), so the record is
// only recoverable with both factors.
struct SmartCard {
  Bytes xeid;            // omega/8
  GroupElement y_pub;
  Bytes id_gw;
  SysParams params;

  // xeid | y_pub | id_gw | params digest
  Bytes image(const Suite& suite) const;
  static Result<SmartCard> from_image(const Suite& suite, BytesView raw);
  bool operator==(const SmartCard&) const = default;
};

// Registration output delivered to the user over the secure channel.
struct CardPayload {
  Bytes eid;             // Enc_z(id_u | id_gw), omega/8 bytes
  GroupElement y_pub;
  Bytes id_gw;
  SysParams params;
};

struct SensorIdentity {
  Bytes id;              // id_len
  SymKey k_gs;           // J(id | z)
};

struct SessionKey {
  Bytes k;               // kappa/8
  bool operator==(const SessionKey&) const = default;
};

enum class SessionStatus { Running, Accepted, Aborted };

// Per-login state the user keeps between emitting M1 and receiving M3.
struct UserSession {
  SessionStatus status = SessionStatus::Running;
  Timestamp t_u = 0;
  Bytes id_sn;
  Bytes k_us;            // session-key seed sent inside c_u
  std::optional<SessionKey> sk;
};

GatewaySecrets gw_init(const Suite& suite, BytesView id_gw_raw,
                       RandomSource& rng);

// Registration needs only the identity; passwords never reach the
// gateway, at registration or later.
Result<CardPayload> gw_register_user(const Suite& suite,
                                     const GatewaySecrets& gw,
                                     BytesView id_u_raw, RandomSource& rng);

Result<SensorIdentity> gw_register_sensor(const Suite& suite,
                                          GatewaySecrets& gw,
                                          BytesView id_sn_raw);

// The user folds the password in before first use: the card keeps
// eid XOR pad(id, pw) and forgets both inputs.
Result<SmartCard> card_personalize(const Suite& suite,
                                   const CardPayload& payload,
                                   BytesView id_u_raw, BytesView pw);

struct LoginStart {
  LoginM1 m1;
  UserSession session;
};

// A wrong password is not detectable here; it surfaces at the gateway as
// IdMismatch. That property is what keeps the card verifier-free.
Result<LoginStart> user_login_start(const Suite& suite, const SmartCard& card,
                                    BytesView id_u_raw, BytesView pw,
                                    BytesView id_sn_raw, Timestamp now,
                                    RandomSource& rng);

// Verification order: freshness, replay, MAC, identity-record match,
// sensor lookup. The replay cache is only updated on full success.
Result<ForwardM2> gw_process_m1(const Suite& suite, GatewaySecrets& gw,
                                const LoginM1& m1, Timestamp now,
                                RandomSource& rng);

struct SensorAccept {
  ConfirmM3 m3;
  SessionKey sk;
};

Result<SensorAccept> sensor_process_m2(const Suite& suite,
                                       const SensorIdentity& sensor,
                                       const ForwardM2& m2, Timestamp now);

// Accept or abort; either way the session is finished and later calls
// refuse with NotAccepted.
Result<SessionKey> user_process_m3(const Suite& suite, UserSession& session,
                                   const ConfirmM3& m3);

// Session identifier both accepting ends agree on: hash of the first two
// messages. Harness bookkeeping, not a protocol step.
Bytes session_id(const Suite& suite, const LoginM1& m1, const ForwardM2& m2);

// Offline password change: re-masks the identity record. With a wrong old
// password the result is silently corrupt and every later login aborts
// with IdMismatch; that trade-off is inherent to the verifier-free card.
Result<SmartCard> pwd_update_offline(const Suite& suite, const SmartCard& card,
                                     BytesView id_u_raw, BytesView pw_old,
                                     BytesView pw_new);

// Gateway-checked password change. The card commits to the new password
// only after the gateway proves it recovered the same identity record.
struct PwdUpdatePending {
  SmartCard card;        // unchanged original
  Bytes id_u;            // padded
  Bytes eid;             // unmasked identity record
  GroupElement x;
  SymKey k_ug;
};

struct PwdUpdateStart {
  PwdUpdateReq request;
  PwdUpdatePending pending;
};

Result<PwdUpdateStart> pwd_update_start(const Suite& suite,
                                        const SmartCard& card,
                                        BytesView id_u_raw, BytesView pw_old,
                                        Timestamp now, RandomSource& rng);

// Always yields a response message; reject_reason says why a fail
// response was produced.
struct PwdUpdateOutcome {
  PwdUpdateResp response;
  std::optional<Error> reject_reason;
};

PwdUpdateOutcome gw_process_pwd_update(const Suite& suite, GatewaySecrets& gw,
                                       const PwdUpdateReq& req, Timestamp now);

Result<SmartCard> user_finish_pwd_update(const Suite& suite,
                                         const PwdUpdatePending& pending,
                                         const PwdUpdateResp& resp,
                                         BytesView pw_new);

}  // namespace wsnauth

#endif
