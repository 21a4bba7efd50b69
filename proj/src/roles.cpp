#include "wsnauth/roles.hpp"

#include <stdexcept>

namespace wsnauth {

namespace {

Bytes ts_bytes(Timestamp t) {
  Bytes out;
  append_u64_be(out, static_cast<std::uint64_t>(t));
  return out;
}

// k_ug = J(t_u | x | y_pub | shared), shared = x*Y on the card and y*X at
// the gateway. Every field is fixed-width.
SymKey derive_link_key(const Suite& suite, Timestamp t_u,
                       const GroupElement& x, const GroupElement& y_pub,
                       const GroupElement& shared) {
  Bytes input = concat(
      {ts_bytes(t_u), x.bytes(), y_pub.bytes(), shared.bytes()});
  return SymKey{suite.hash(HashDomain::J, input)};
}

SymKey sensor_key(const Suite& suite, BytesView id_sn, const SymKey& z) {
  return SymKey{suite.hash(HashDomain::J, concat({id_sn, z.k}))};
}

Bytes identity_pad(const Suite& suite, BytesView id_u, BytesView pw) {
  return suite.hash(HashDomain::I, concat({id_u, pw}));
}

Bytes card_params_digest(const Suite& suite) {
  std::string text = format_params(suite.params());
  return suite.hash(HashDomain::H, to_bytes(text));
}

bool fresh_enough(Timestamp now, Timestamp t, std::int64_t window) {
  const std::int64_t delta = now >= t ? now - t : t - now;
  return delta <= window;
}

Bytes session_key_input(BytesView k_us, Timestamp t_u, BytesView id_sn) {
  return concat({k_us, ts_bytes(t_u), id_sn});
}

Bytes confirm_input(BytesView k_us, BytesView id_sn, Timestamp t_u) {
  return concat({k_us, id_sn, ts_bytes(t_u)});
}

}  // namespace

bool ReplayCache::contains(Timestamp t, BytesView x) const {
  return entries_.count({t, Bytes(x.begin(), x.end())}) != 0;
}

void ReplayCache::insert(Timestamp t, BytesView x) {
  entries_.insert({t, Bytes(x.begin(), x.end())});
}

void ReplayCache::prune(Timestamp now, std::int64_t window) {
  auto it = entries_.begin();
  while (it != entries_.end() && it->first < now - window) {
    it = entries_.erase(it);
  }
}

Bytes SmartCard::image(const Suite& suite) const {
  return concat({xeid, y_pub.bytes(), id_gw, card_params_digest(suite)});
}

Result<SmartCard> SmartCard::from_image(const Suite& suite, BytesView raw) {
  const SysParams& p = suite.params();
  const std::size_t digest_len = p.kappa_bytes();
  const std::size_t expect =
      p.omega_bytes() + SysParams::kPointLen + p.id_len + digest_len;
  if (raw.size() != expect) return Error::LengthMismatch;

  std::size_t pos = 0;
  auto take = [&](std::size_t n) {
    BytesView v = raw.subspan(pos, n);
    pos += n;
    return v;
  };

  SmartCard card;
  auto xeid = take(p.omega_bytes());
  card.xeid.assign(xeid.begin(), xeid.end());
  auto y = GroupElement::decode(take(SysParams::kPointLen));
  if (!y.ok()) return Error::InvalidPoint;
  card.y_pub = std::move(y).value();
  auto id = take(p.id_len);
  card.id_gw.assign(id.begin(), id.end());
  card.params = p;
  if (!equal(take(digest_len), card_params_digest(suite))) {
    return Error::DecodeError;
  }
  return card;
}

GatewaySecrets gw_init(const Suite& suite, BytesView id_gw_raw,
                       RandomSource& rng) {
  auto id = pad_id(suite.params(), id_gw_raw);
  if (!id.ok()) throw std::invalid_argument("gateway id too long");
  GatewaySecrets gw;
  gw.y = Scalar::random(rng);
  gw.z = SymKey{rng.bytes(suite.params().ell_bytes())};
  gw.y_pub = suite.scalar_mult(gw.y, suite.generator());
  gw.id_gw = std::move(id).value();
  return gw;
}

Result<CardPayload> gw_register_user(const Suite& suite,
                                     const GatewaySecrets& gw,
                                     BytesView id_u_raw, RandomSource& rng) {
  auto id = pad_id(suite.params(), id_u_raw);
  if (!id.ok()) return id.error();
  CardPayload payload;
  payload.eid =
      suite.sym_encrypt(gw.z, concat({id.value(), gw.id_gw}), rng).encoded();
  payload.y_pub = gw.y_pub;
  payload.id_gw = gw.id_gw;
  payload.params = suite.params();
  return payload;
}

Result<SensorIdentity> gw_register_sensor(const Suite& suite,
                                          GatewaySecrets& gw,
                                          BytesView id_sn_raw) {
  auto id = pad_id(suite.params(), id_sn_raw);
  if (!id.ok()) return id.error();
  if (gw.sensor_registry.count(id.value()) != 0) {
    return Error::AlreadyRegistered;
  }
  SensorIdentity sensor{id.value(), sensor_key(suite, id.value(), gw.z)};
  gw.sensor_registry.emplace(sensor.id, sensor.k_gs);
  return sensor;
}

Result<SmartCard> card_personalize(const Suite& suite,
                                   const CardPayload& payload,
                                   BytesView id_u_raw, BytesView pw) {
  auto id = pad_id(suite.params(), id_u_raw);
  if (!id.ok()) return id.error();
  if (payload.eid.size() != suite.params().omega_bytes()) {
    return Error::LengthMismatch;
  }
  SmartCard card;
  card.xeid = xor_bytes(payload.eid, identity_pad(suite, id.value(), pw));
  card.y_pub = payload.y_pub;
  card.id_gw = payload.id_gw;
  card.params = payload.params;
  return card;
}

Result<LoginStart> user_login_start(const Suite& suite, const SmartCard& card,
                                    BytesView id_u_raw, BytesView pw,
                                    BytesView id_sn_raw, Timestamp now,
                                    RandomSource& rng) {
  const SysParams& p = suite.params();
  auto id_u = pad_id(p, id_u_raw);
  if (!id_u.ok()) return id_u.error();
  auto id_sn = pad_id(p, id_sn_raw);
  if (!id_sn.ok()) return id_sn.error();

  Scalar x = Scalar::random(rng);
  GroupElement x_pub = suite.scalar_mult(x, suite.generator());
  GroupElement shared = suite.scalar_mult(x, card.y_pub);
  SymKey k_ug = derive_link_key(suite, now, x_pub, card.y_pub, shared);

  // The card cannot tell a wrong password here: the unmasked record is
  // opaque without z. It ships the result and lets the gateway decide.
  Bytes eid = xor_bytes(card.xeid, identity_pad(suite, id_u.value(), pw));
  Bytes k_us = rng.bytes(p.kappa_bytes());

  LoginM1 m1;
  m1.t_u = now;
  m1.id_sn = id_sn.value();
  m1.x = x_pub;
  m1.c_u =
      suite.sym_encrypt(k_ug, concat({id_u.value(), eid, k_us}), rng);
  auto mac_in = mac_input_m1(p, card.id_gw, m1.id_sn, m1.t_u, m1.c_u);
  if (!mac_in.ok()) return mac_in.error();
  m1.sigma_u = suite.mac_generate(k_ug, mac_in.value());

  UserSession session;
  session.t_u = now;
  session.id_sn = id_sn.value();
  session.k_us = std::move(k_us);
  return LoginStart{std::move(m1), std::move(session)};
}

Result<ForwardM2> gw_process_m1(const Suite& suite, GatewaySecrets& gw,
                                const LoginM1& m1, Timestamp now,
                                RandomSource& rng) {
  const SysParams& p = suite.params();
  if (m1.id_sn.size() != p.id_len) return Error::LengthMismatch;
  if (!fresh_enough(now, m1.t_u, p.ts_window)) return Error::StaleTimestamp;

  gw.replay_cache.prune(now, p.ts_window);
  if (gw.replay_cache.contains(m1.t_u, m1.x.bytes())) {
    return Error::ReplayDetected;
  }

  GroupElement shared = suite.scalar_mult(gw.y, m1.x);
  SymKey k_ug = derive_link_key(suite, m1.t_u, m1.x, gw.y_pub, shared);

  auto mac_in = mac_input_m1(p, gw.id_gw, m1.id_sn, m1.t_u, m1.c_u);
  if (!mac_in.ok()) return mac_in.error();
  auto mac_ok = suite.mac_verify(k_ug, mac_in.value(), m1.sigma_u);
  if (!mac_ok.ok()) return mac_ok.error();
  if (!mac_ok.value()) return Error::BadMac;

  Bytes plain = suite.sym_decrypt(k_ug, m1.c_u);
  if (plain.size() != p.id_len + p.omega_bytes() + p.kappa_bytes()) {
    return Error::LengthMismatch;
  }
  BytesView view(plain);
  BytesView id_u = view.subspan(0, p.id_len);
  BytesView eid_raw = view.subspan(p.id_len, p.omega_bytes());
  BytesView k_us = view.subspan(p.id_len + p.omega_bytes());

  // Both decryptions must agree on the identity, and the record must name
  // this gateway. A wrong password breaks the XOR pad and surfaces here.
  auto eid = Ciphertext::from_bytes(eid_raw);
  if (!eid.ok()) return eid.error();
  Bytes record = suite.sym_decrypt(gw.z, eid.value());
  if (record.size() != 2 * p.id_len) return Error::IdMismatch;
  const bool id_match =
      ct_equal(BytesView(record).subspan(0, p.id_len), id_u) &
      ct_equal(BytesView(record).subspan(p.id_len), gw.id_gw);
  if (!id_match) return Error::IdMismatch;

  auto reg = gw.sensor_registry.find(m1.id_sn);
  if (reg == gw.sensor_registry.end()) return Error::UnknownSensor;
  const SymKey& k_gs = reg->second;

  ForwardM2 m2;
  m2.id_gw = gw.id_gw;
  m2.t_gw = now;
  m2.t_u = m1.t_u;
  m2.c_gw = suite.sym_encrypt(k_gs, k_us, rng);
  auto mac_in2 =
      mac_input_m2(p, gw.id_gw, m1.id_sn, m2.t_gw, m2.t_u, m2.c_gw);
  if (!mac_in2.ok()) return mac_in2.error();
  m2.sigma_gw = suite.mac_generate(k_gs, mac_in2.value());

  gw.replay_cache.insert(m1.t_u, m1.x.bytes());
  return m2;
}

Result<SensorAccept> sensor_process_m2(const Suite& suite,
                                       const SensorIdentity& sensor,
                                       const ForwardM2& m2, Timestamp now) {
  const SysParams& p = suite.params();
  if (m2.id_gw.size() != p.id_len) return Error::LengthMismatch;
  if (!fresh_enough(now, m2.t_gw, p.ts_window)) return Error::StaleTimestamp;

  // The sensor's own identity goes into the MAC input, so a forward meant
  // for any other sensor fails here no matter who signed it.
  auto mac_in =
      mac_input_m2(p, m2.id_gw, sensor.id, m2.t_gw, m2.t_u, m2.c_gw);
  if (!mac_in.ok()) return mac_in.error();
  auto mac_ok = suite.mac_verify(sensor.k_gs, mac_in.value(), m2.sigma_gw);
  if (!mac_ok.ok()) return mac_ok.error();
  if (!mac_ok.value()) return Error::BadMac;

  Bytes k_us = suite.sym_decrypt(sensor.k_gs, m2.c_gw);
  if (k_us.size() != p.kappa_bytes()) return Error::LengthMismatch;

  SensorAccept accept;
  accept.sk = SessionKey{
      suite.hash(HashDomain::H, session_key_input(k_us, m2.t_u, sensor.id))};
  accept.m3.rho_sn =
      suite.hash(HashDomain::H, confirm_input(k_us, sensor.id, m2.t_u));
  return accept;
}

Result<SessionKey> user_process_m3(const Suite& suite, UserSession& session,
                                   const ConfirmM3& m3) {
  if (session.status != SessionStatus::Running) return Error::NotAccepted;

  Bytes expect = suite.hash(
      HashDomain::H, confirm_input(session.k_us, session.id_sn, session.t_u));
  if (!ct_equal(expect, m3.rho_sn)) {
    session.status = SessionStatus::Aborted;
    return Error::BadAuthenticator;
  }
  session.sk = SessionKey{suite.hash(
      HashDomain::H,
      session_key_input(session.k_us, session.t_u, session.id_sn))};
  session.status = SessionStatus::Accepted;
  return *session.sk;
}

Bytes session_id(const Suite& suite, const LoginM1& m1, const ForwardM2& m2) {
  Bytes joined = concat(
      {encode(suite.params(), m1), encode(suite.params(), m2)});
  return suite.hash(HashDomain::H, joined);
}

Result<SmartCard> pwd_update_offline(const Suite& suite, const SmartCard& card,
                                     BytesView id_u_raw, BytesView pw_old,
                                     BytesView pw_new) {
  auto id = pad_id(suite.params(), id_u_raw);
  if (!id.ok()) return id.error();
  SmartCard out = card;
  out.xeid = xor_bytes(
      xor_bytes(card.xeid, identity_pad(suite, id.value(), pw_old)),
      identity_pad(suite, id.value(), pw_new));
  return out;
}

Result<PwdUpdateStart> pwd_update_start(const Suite& suite,
                                        const SmartCard& card,
                                        BytesView id_u_raw, BytesView pw_old,
                                        Timestamp now, RandomSource& rng) {
  auto id_u = pad_id(suite.params(), id_u_raw);
  if (!id_u.ok()) return id_u.error();

  Scalar x = Scalar::random(rng);
  GroupElement x_pub = suite.scalar_mult(x, suite.generator());
  GroupElement shared = suite.scalar_mult(x, card.y_pub);
  SymKey k_ug = derive_link_key(suite, now, x_pub, card.y_pub, shared);
  Bytes eid = xor_bytes(card.xeid, identity_pad(suite, id_u.value(), pw_old));

  PwdUpdateStart start;
  start.request.t_u = now;
  start.request.x = x_pub;
  start.request.c_u =
      suite.sym_encrypt(k_ug, concat({id_u.value(), eid}), rng);
  start.pending.card = card;
  start.pending.id_u = std::move(id_u).value();
  start.pending.eid = std::move(eid);
  start.pending.x = x_pub;
  start.pending.k_ug = std::move(k_ug);
  return start;
}

PwdUpdateOutcome gw_process_pwd_update(const Suite& suite, GatewaySecrets& gw,
                                       const PwdUpdateReq& req,
                                       Timestamp now) {
  const SysParams& p = suite.params();
  auto fail = [](Error e) {
    return PwdUpdateOutcome{PwdUpdateResp{false, {}}, e};
  };

  if (!fresh_enough(now, req.t_u, p.ts_window)) {
    return fail(Error::StaleTimestamp);
  }
  gw.replay_cache.prune(now, p.ts_window);
  if (gw.replay_cache.contains(req.t_u, req.x.bytes())) {
    return fail(Error::ReplayDetected);
  }

  GroupElement shared = suite.scalar_mult(gw.y, req.x);
  SymKey k_ug = derive_link_key(suite, req.t_u, req.x, gw.y_pub, shared);
  Bytes plain = suite.sym_decrypt(k_ug, req.c_u);
  if (plain.size() != p.id_len + p.omega_bytes()) {
    return fail(Error::IdMismatch);
  }
  BytesView view(plain);
  BytesView id_u = view.subspan(0, p.id_len);
  auto eid = Ciphertext::from_bytes(view.subspan(p.id_len));
  if (!eid.ok()) return fail(Error::IdMismatch);
  Bytes record = suite.sym_decrypt(gw.z, eid.value());
  if (record.size() != 2 * p.id_len) return fail(Error::IdMismatch);
  const bool id_match =
      ct_equal(BytesView(record).subspan(0, p.id_len), id_u) &
      ct_equal(BytesView(record).subspan(p.id_len), gw.id_gw);
  if (!id_match) return fail(Error::IdMismatch);

  gw.replay_cache.insert(req.t_u, req.x.bytes());

  Bytes rho_in = concat({gw.id_gw, id_u, req.x.bytes(), k_ug.k});
  PwdUpdateResp resp;
  resp.ok = true;
  resp.rho_gw = suite.hash(HashDomain::H, rho_in);
  return PwdUpdateOutcome{std::move(resp), std::nullopt};
}

Result<SmartCard> user_finish_pwd_update(const Suite& suite,
                                         const PwdUpdatePending& pending,
                                         const PwdUpdateResp& resp,
                                         BytesView pw_new) {
  if (!resp.ok) return Error::BadAuthenticator;
  Bytes rho_in = concat({pending.card.id_gw, pending.id_u,
                         pending.x.bytes(), pending.k_ug.k});
  Bytes expect = suite.hash(HashDomain::H, rho_in);
  if (!ct_equal(expect, resp.rho_gw)) return Error::BadAuthenticator;

  SmartCard out = pending.card;
  out.xeid =
      xor_bytes(pending.eid, identity_pad(suite, pending.id_u, pw_new));
  return out;
}

}  // namespace wsnauth
