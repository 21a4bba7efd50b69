#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "wsnauth/roles.hpp"

namespace {

using namespace wsnauth;

constexpr Timestamp kNow = VirtualClock::kDefaultBase;

struct World {
  Suite suite{SysParams{}};
  SeededRandom rng;
  GatewaySecrets gw;
  SensorIdentity sensor;
  SmartCard card;
  Bytes id_u = to_bytes("alice");
  Bytes pw = to_bytes("hunter2 hunter2");

  explicit World(std::uint64_t seed) : rng(seed) {
    gw = gw_init(suite, to_bytes("gw-main"), rng);
    auto s = gw_register_sensor(suite, gw, to_bytes("sensor-7"));
    REQUIRE(s.ok());
    sensor = s.value();
    auto payload = gw_register_user(suite, gw, id_u, rng);
    REQUIRE(payload.ok());
    auto c = card_personalize(suite, payload.value(), id_u, pw);
    REQUIRE(c.ok());
    card = c.value();
  }

  Result<LoginStart> login(Timestamp now) {
    return user_login_start(suite, card, id_u, pw, to_bytes("sensor-7"), now,
                            rng);
  }
};

bool contains_subsequence(BytesView haystack, BytesView needle) {
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

}  // namespace

TEST_CASE("identity padding is fixed-width", "[roles]") {
  SysParams p;
  auto padded = pad_id(p, to_bytes("alice"));
  REQUIRE(padded.ok());
  REQUIRE(padded.value().size() == p.id_len);
  CHECK(equal(BytesView(padded.value()).subspan(0, 5), to_bytes("alice")));
  CHECK(std::all_of(padded.value().begin() + 5, padded.value().end(),
                    [](std::uint8_t b) { return b == 0; }));

  CHECK(pad_id(p, to_bytes("exactly-16-chars")).ok());
  CHECK(pad_id(p, {}).error() == Error::IdError);
  CHECK(pad_id(p, to_bytes("seventeen-chars-x")).error() == Error::IdError);
}

TEST_CASE("user registration encrypts the identity record under z",
          "[roles]") {
  World w(201);
  auto payload = gw_register_user(w.suite, w.gw, w.id_u, w.rng);
  REQUIRE(payload.ok());

  REQUIRE(payload.value().eid.size() == w.suite.params().omega_bytes());
  auto ct = Ciphertext::from_bytes(payload.value().eid);
  REQUIRE(ct.ok());
  Bytes record = w.suite.sym_decrypt(w.gw.z, ct.value());
  Bytes expected =
      concat({pad_id(w.suite.params(), w.id_u).value(), w.gw.id_gw});
  CHECK(record == expected);
  CHECK(payload.value().y_pub == w.gw.y_pub);
  CHECK(payload.value().id_gw == w.gw.id_gw);

  // Fresh nonce per registration: same plaintext, distinct records.
  auto again = gw_register_user(w.suite, w.gw, w.id_u, w.rng);
  REQUIRE(again.ok());
  CHECK(again.value().eid != payload.value().eid);
}

TEST_CASE("personalization masks the record with both factors", "[roles]") {
  World w(202);
  auto payload = gw_register_user(w.suite, w.gw, w.id_u, w.rng);
  REQUIRE(payload.ok());

  Bytes pad = w.suite.hash(
      HashDomain::I,
      concat({pad_id(w.suite.params(), w.id_u).value(), w.pw}));
  auto card = card_personalize(w.suite, payload.value(), w.id_u, w.pw);
  REQUIRE(card.ok());
  CHECK(card.value().xeid == xor_bytes(payload.value().eid, pad));
  CHECK(xor_bytes(card.value().xeid, pad) == payload.value().eid);

  // A different password yields an unrelated mask.
  auto other = card_personalize(w.suite, payload.value(), w.id_u,
                                to_bytes("hunter3 hunter3"));
  REQUIRE(other.ok());
  CHECK(other.value().xeid != card.value().xeid);
  CHECK(other.value().y_pub == card.value().y_pub);
}

TEST_CASE("card image round-trips and rejects corruption", "[roles]") {
  World w(203);
  Bytes image = w.card.image(w.suite);
  REQUIRE(image.size() == 129);

  auto back = SmartCard::from_image(w.suite, image);
  REQUIRE(back.ok());
  CHECK(back.value() == w.card);

  Bytes truncated(image.begin(), image.end() - 1);
  CHECK(SmartCard::from_image(w.suite, truncated).error() ==
        Error::LengthMismatch);

  Bytes bad_point = image;
  bad_point[48] = 0x07;
  CHECK(SmartCard::from_image(w.suite, bad_point).error() ==
        Error::InvalidPoint);

  Bytes bad_digest = image;
  bad_digest.back() ^= 0x01;
  CHECK(SmartCard::from_image(w.suite, bad_digest).error() ==
        Error::DecodeError);
}

TEST_CASE("card stores neither identity nor password nor verifier",
          "[roles]") {
  Suite suite{SysParams{}};
  SeededRandom rng(204);
  GatewaySecrets gw = gw_init(suite, to_bytes("gw-main"), rng);
  Bytes id = to_bytes("alice-primary-id");
  Bytes pw = to_bytes("correct horse battery staple");

  auto payload = gw_register_user(suite, gw, id, rng);
  REQUIRE(payload.ok());
  auto card = card_personalize(suite, payload.value(), id, pw);
  REQUIRE(card.ok());

  Bytes image = card.value().image(suite);
  CHECK(!contains_subsequence(image, id));
  CHECK(!contains_subsequence(image, pw));
  CHECK(!contains_subsequence(card.value().xeid, id));
  CHECK(!contains_subsequence(card.value().xeid, pw));
  // No digest of either factor alone appears either.
  CHECK(!contains_subsequence(image, suite.hash(HashDomain::H, id)));
  CHECK(!contains_subsequence(image, suite.hash(HashDomain::H, pw)));
}

TEST_CASE("registration never sees the password", "[roles]") {
  // Enforced by the signature: the gateway is read-only during user
  // registration and takes no password argument.
  static_assert(std::is_invocable_v<decltype(gw_register_user), const Suite&,
                                    const GatewaySecrets&, BytesView,
                                    RandomSource&>);
  World w(205);
  std::size_t registry_before = w.gw.sensor_registry.size();
  auto p1 = gw_register_user(w.suite, w.gw, to_bytes("bob"), w.rng);
  REQUIRE(p1.ok());
  CHECK(w.gw.sensor_registry.size() == registry_before);
}

TEST_CASE("sensor registration derives the shared key from z", "[roles]") {
  World w(206);
  Bytes padded = pad_id(w.suite.params(), to_bytes("sensor-7")).value();
  CHECK(w.sensor.k_gs.k ==
        w.suite.hash(HashDomain::J, concat({padded, w.gw.z.k})));
  CHECK(w.sensor.id == padded);

  auto dup = gw_register_sensor(w.suite, w.gw, to_bytes("sensor-7"));
  REQUIRE(!dup.ok());
  CHECK(dup.error() == Error::AlreadyRegistered);

  auto other = gw_register_sensor(w.suite, w.gw, to_bytes("sensor-8"));
  REQUIRE(other.ok());
  CHECK(other.value().k_gs.k != w.sensor.k_gs.k);
}

TEST_CASE("login, forward, confirm yields one shared key", "[roles]") {
  for (std::uint64_t seed : {301, 302, 303, 304, 305, 306, 307, 308}) {
    World w(seed);
    auto start = w.login(kNow);
    REQUIRE(start.ok());
    UserSession session = start.value().session;
    CHECK(session.status == SessionStatus::Running);
    CHECK(session.t_u == kNow);

    auto m2 = gw_process_m1(w.suite, w.gw, start.value().m1, kNow + 3, w.rng);
    REQUIRE(m2.ok());
    CHECK(m2.value().t_u == start.value().m1.t_u);
    CHECK(m2.value().id_gw == w.gw.id_gw);

    auto accept = sensor_process_m2(w.suite, w.sensor, m2.value(), kNow + 5);
    REQUIRE(accept.ok());

    auto sk = user_process_m3(w.suite, session, accept.value().m3);
    REQUIRE(sk.ok());
    CHECK(session.status == SessionStatus::Accepted);
    CHECK(sk.value() == accept.value().sk);
    CHECK(sk.value().k.size() == w.suite.params().kappa_bytes());

    // The key is exactly H(k_us | t_u | id_sn).
    Bytes input = concat({session.k_us});
    append_u64_be(input, static_cast<std::uint64_t>(session.t_u));
    append(input, session.id_sn);
    CHECK(sk.value().k == w.suite.hash(HashDomain::H, input));

    Bytes sid = session_id(w.suite, start.value().m1, m2.value());
    CHECK(sid.size() == w.suite.params().kappa_bytes());
    CHECK(sid == session_id(w.suite, start.value().m1, m2.value()));
  }
}

TEST_CASE("distinct sessions produce distinct keys", "[roles]") {
  World w(207);
  auto a = w.login(kNow);
  auto b = w.login(kNow + 1);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(!(a.value().m1.x == b.value().m1.x));
  CHECK(a.value().session.k_us != b.value().session.k_us);
}

TEST_CASE("gateway rejects outside the freshness window", "[roles]") {
  World w(208);
  const std::int64_t window = w.suite.params().ts_window;

  auto edge_past = w.login(kNow);
  REQUIRE(edge_past.ok());
  CHECK(gw_process_m1(w.suite, w.gw, edge_past.value().m1, kNow + window,
                      w.rng)
            .ok());

  auto stale = w.login(kNow);
  REQUIRE(stale.ok());
  auto r = gw_process_m1(w.suite, w.gw, stale.value().m1, kNow + window + 1,
                         w.rng);
  REQUIRE(!r.ok());
  CHECK(r.error() == Error::StaleTimestamp);

  // Clock skew forward of the verifier is tolerated up to the window too.
  auto ahead = w.login(kNow + window);
  REQUIRE(ahead.ok());
  CHECK(gw_process_m1(w.suite, w.gw, ahead.value().m1, kNow, w.rng).ok());
  auto far_ahead = w.login(kNow + window + 1);
  REQUIRE(far_ahead.ok());
  CHECK(gw_process_m1(w.suite, w.gw, far_ahead.value().m1, kNow, w.rng)
            .error() == Error::StaleTimestamp);
}

TEST_CASE("gateway rejects replays inside the window", "[roles]") {
  World w(209);
  auto start = w.login(kNow);
  REQUIRE(start.ok());
  REQUIRE(gw_process_m1(w.suite, w.gw, start.value().m1, kNow, w.rng).ok());

  auto replay = gw_process_m1(w.suite, w.gw, start.value().m1, kNow + 30,
                              w.rng);
  REQUIRE(!replay.ok());
  CHECK(replay.error() == Error::ReplayDetected);

  // A fresh login from the same user at the same instant still passes.
  auto next = w.login(kNow + 30);
  REQUIRE(next.ok());
  CHECK(gw_process_m1(w.suite, w.gw, next.value().m1, kNow + 30, w.rng).ok());
}

TEST_CASE("wrong password surfaces as an identity mismatch", "[roles]") {
  World w(210);
  auto start = user_login_start(w.suite, w.card, w.id_u,
                                to_bytes("wrong password"),
                                to_bytes("sensor-7"), kNow, w.rng);
  REQUIRE(start.ok());  // not locally detectable
  auto r = gw_process_m1(w.suite, w.gw, start.value().m1, kNow, w.rng);
  REQUIRE(!r.ok());
  CHECK(r.error() == Error::IdMismatch);

  // Same for a wrong identity with the right password.
  auto wrong_id = user_login_start(w.suite, w.card, to_bytes("mallory"),
                                   w.pw, to_bytes("sensor-7"), kNow, w.rng);
  REQUIRE(wrong_id.ok());
  CHECK(gw_process_m1(w.suite, w.gw, wrong_id.value().m1, kNow, w.rng)
            .error() == Error::IdMismatch);
}

TEST_CASE("identity record must name the verifying gateway", "[roles]") {
  World w(211);
  // A second gateway with its own secrets cannot validate the mac.
  GatewaySecrets other = gw_init(w.suite, to_bytes("gw-other"), w.rng);
  REQUIRE(gw_register_sensor(w.suite, other, to_bytes("sensor-7")).ok());
  auto start = w.login(kNow);
  REQUIRE(start.ok());
  auto r = gw_process_m1(w.suite, other, start.value().m1, kNow, w.rng);
  REQUIRE(!r.ok());
  CHECK(r.error() == Error::BadMac);
}

TEST_CASE("gateway rejects tampered login fields", "[roles]") {
  World w(212);
  auto start = w.login(kNow);
  REQUIRE(start.ok());

  LoginM1 bad_sigma = start.value().m1;
  bad_sigma.sigma_u.t[0] ^= 0x01;
  CHECK(gw_process_m1(w.suite, w.gw, bad_sigma, kNow, w.rng).error() ==
        Error::BadMac);

  LoginM1 bad_ct = start.value().m1;
  bad_ct.c_u.body[0] ^= 0x01;
  CHECK(gw_process_m1(w.suite, w.gw, bad_ct, kNow, w.rng).error() ==
        Error::BadMac);

  LoginM1 bad_sn = start.value().m1;
  bad_sn.id_sn[0] ^= 0x01;
  CHECK(gw_process_m1(w.suite, w.gw, bad_sn, kNow, w.rng).error() ==
        Error::BadMac);

  LoginM1 bad_width = start.value().m1;
  bad_width.id_sn.pop_back();
  CHECK(gw_process_m1(w.suite, w.gw, bad_width, kNow, w.rng).error() ==
        Error::LengthMismatch);
}

TEST_CASE("unregistered sensors are refused after authentication",
          "[roles]") {
  World w(213);
  auto start = user_login_start(w.suite, w.card, w.id_u, w.pw,
                                to_bytes("sensor-9"), kNow, w.rng);
  REQUIRE(start.ok());
  auto r = gw_process_m1(w.suite, w.gw, start.value().m1, kNow, w.rng);
  REQUIRE(!r.ok());
  CHECK(r.error() == Error::UnknownSensor);
}

TEST_CASE("forwarded message only verifies at the named sensor", "[roles]") {
  World w(214);
  auto other = gw_register_sensor(w.suite, w.gw, to_bytes("sensor-8"));
  REQUIRE(other.ok());

  auto start = w.login(kNow);
  REQUIRE(start.ok());
  auto m2 = gw_process_m1(w.suite, w.gw, start.value().m1, kNow, w.rng);
  REQUIRE(m2.ok());

  CHECK(sensor_process_m2(w.suite, w.sensor, m2.value(), kNow).ok());
  auto cross = sensor_process_m2(w.suite, other.value(), m2.value(), kNow);
  REQUIRE(!cross.ok());
  CHECK(cross.error() == Error::BadMac);
}

TEST_CASE("sensor enforces its own freshness window", "[roles]") {
  World w(215);
  const std::int64_t window = w.suite.params().ts_window;
  auto start = w.login(kNow);
  REQUIRE(start.ok());
  auto m2 = gw_process_m1(w.suite, w.gw, start.value().m1, kNow, w.rng);
  REQUIRE(m2.ok());

  CHECK(sensor_process_m2(w.suite, w.sensor, m2.value(), kNow + window).ok());
  auto late = sensor_process_m2(w.suite, w.sensor, m2.value(),
                                kNow + window + 1);
  REQUIRE(!late.ok());
  CHECK(late.error() == Error::StaleTimestamp);

  ForwardM2 bad = m2.value();
  bad.sigma_gw.t[5] ^= 0x80;
  CHECK(sensor_process_m2(w.suite, w.sensor, bad, kNow).error() ==
        Error::BadMac);
}

TEST_CASE("confirmation is checked and sessions finish once", "[roles]") {
  World w(216);
  auto start = w.login(kNow);
  REQUIRE(start.ok());
  auto m2 = gw_process_m1(w.suite, w.gw, start.value().m1, kNow, w.rng);
  REQUIRE(m2.ok());
  auto accept = sensor_process_m2(w.suite, w.sensor, m2.value(), kNow);
  REQUIRE(accept.ok());

  UserSession forged_session = start.value().session;
  ConfirmM3 forged = accept.value().m3;
  forged.rho_sn[7] ^= 0x01;
  auto r = user_process_m3(w.suite, forged_session, forged);
  REQUIRE(!r.ok());
  CHECK(r.error() == Error::BadAuthenticator);
  CHECK(forged_session.status == SessionStatus::Aborted);
  CHECK(user_process_m3(w.suite, forged_session, accept.value().m3).error() ==
        Error::NotAccepted);

  UserSession session = start.value().session;
  REQUIRE(user_process_m3(w.suite, session, accept.value().m3).ok());
  CHECK(user_process_m3(w.suite, session, accept.value().m3).error() ==
        Error::NotAccepted);
}

TEST_CASE("offline password change keeps only the new password valid",
          "[roles]") {
  World w(217);
  Bytes pw_new = to_bytes("new password 99");
  auto updated = pwd_update_offline(w.suite, w.card, w.id_u, w.pw, pw_new);
  REQUIRE(updated.ok());
  CHECK(updated.value().xeid != w.card.xeid);

  auto login_new = user_login_start(w.suite, updated.value(), w.id_u, pw_new,
                                    to_bytes("sensor-7"), kNow, w.rng);
  REQUIRE(login_new.ok());
  CHECK(gw_process_m1(w.suite, w.gw, login_new.value().m1, kNow, w.rng).ok());

  auto login_old = user_login_start(w.suite, updated.value(), w.id_u, w.pw,
                                    to_bytes("sensor-7"), kNow + 1, w.rng);
  REQUIRE(login_old.ok());
  CHECK(gw_process_m1(w.suite, w.gw, login_old.value().m1, kNow + 1, w.rng)
            .error() == Error::IdMismatch);
}

TEST_CASE("offline change with a wrong old password bricks the card",
          "[roles]") {
  World w(218);
  Bytes pw_new = to_bytes("new password 99");
  auto bricked = pwd_update_offline(w.suite, w.card, w.id_u,
                                    to_bytes("not the old pw"), pw_new);
  REQUIRE(bricked.ok());  // not locally detectable

  for (const Bytes& pw : {pw_new, w.pw, to_bytes("not the old pw")}) {
    auto attempt =
        user_login_start(w.suite, bricked.value(), w.id_u, pw,
                         to_bytes("sensor-7"), kNow, w.rng);
    REQUIRE(attempt.ok());
    CHECK(gw_process_m1(w.suite, w.gw, attempt.value().m1, kNow, w.rng)
              .error() == Error::IdMismatch);
  }
}

TEST_CASE("offline change to the same password is a fixed point", "[roles]") {
  World w(219);
  auto same = pwd_update_offline(w.suite, w.card, w.id_u, w.pw, w.pw);
  REQUIRE(same.ok());
  CHECK(same.value().xeid == w.card.xeid);
  CHECK(same.value() == w.card);
}

TEST_CASE("interactive password change succeeds against the gateway",
          "[roles]") {
  World w(220);
  Bytes pw_new = to_bytes("fresh password!");
  auto start = pwd_update_start(w.suite, w.card, w.id_u, w.pw, kNow, w.rng);
  REQUIRE(start.ok());

  auto outcome =
      gw_process_pwd_update(w.suite, w.gw, start.value().request, kNow);
  REQUIRE(!outcome.reject_reason.has_value());
  REQUIRE(outcome.response.ok);

  auto updated = user_finish_pwd_update(w.suite, start.value().pending,
                                        outcome.response, pw_new);
  REQUIRE(updated.ok());
  CHECK(updated.value().xeid ==
        pwd_update_offline(w.suite, w.card, w.id_u, w.pw, pw_new)
            .value()
            .xeid);

  auto login_new = user_login_start(w.suite, updated.value(), w.id_u, pw_new,
                                    to_bytes("sensor-7"), kNow + 1, w.rng);
  REQUIRE(login_new.ok());
  CHECK(gw_process_m1(w.suite, w.gw, login_new.value().m1, kNow + 1, w.rng)
            .ok());
}

TEST_CASE("interactive change with a wrong old password fails closed",
          "[roles]") {
  World w(221);
  auto start = pwd_update_start(w.suite, w.card, w.id_u,
                                to_bytes("wrong old pw"), kNow, w.rng);
  REQUIRE(start.ok());

  auto outcome =
      gw_process_pwd_update(w.suite, w.gw, start.value().request, kNow);
  REQUIRE(outcome.reject_reason.has_value());
  CHECK(outcome.reject_reason.value() == Error::IdMismatch);
  CHECK(!outcome.response.ok);

  auto finish = user_finish_pwd_update(w.suite, start.value().pending,
                                       outcome.response,
                                       to_bytes("fresh password!"));
  REQUIRE(!finish.ok());
  CHECK(finish.error() == Error::BadAuthenticator);

  // The original card still works.
  auto login = w.login(kNow + 1);
  REQUIRE(login.ok());
  CHECK(gw_process_m1(w.suite, w.gw, login.value().m1, kNow + 1, w.rng).ok());
}

TEST_CASE("interactive change rejects stale and replayed requests",
          "[roles]") {
  World w(222);
  const std::int64_t window = w.suite.params().ts_window;

  auto stale = pwd_update_start(w.suite, w.card, w.id_u, w.pw, kNow, w.rng);
  REQUIRE(stale.ok());
  auto outcome = gw_process_pwd_update(w.suite, w.gw, stale.value().request,
                                       kNow + window + 1);
  REQUIRE(outcome.reject_reason.has_value());
  CHECK(outcome.reject_reason.value() == Error::StaleTimestamp);

  auto fresh = pwd_update_start(w.suite, w.card, w.id_u, w.pw, kNow, w.rng);
  REQUIRE(fresh.ok());
  auto first = gw_process_pwd_update(w.suite, w.gw, fresh.value().request,
                                     kNow);
  REQUIRE(first.response.ok);
  auto second = gw_process_pwd_update(w.suite, w.gw, fresh.value().request,
                                      kNow + 1);
  REQUIRE(second.reject_reason.has_value());
  CHECK(second.reject_reason.value() == Error::ReplayDetected);
}

TEST_CASE("forged gateway confirmation does not update the card", "[roles]") {
  World w(223);
  auto start = pwd_update_start(w.suite, w.card, w.id_u, w.pw, kNow, w.rng);
  REQUIRE(start.ok());
  auto outcome =
      gw_process_pwd_update(w.suite, w.gw, start.value().request, kNow);
  REQUIRE(outcome.response.ok);

  PwdUpdateResp forged = outcome.response;
  forged.rho_gw[3] ^= 0x04;
  auto finish = user_finish_pwd_update(w.suite, start.value().pending, forged,
                                       to_bytes("fresh password!"));
  REQUIRE(!finish.ok());
  CHECK(finish.error() == Error::BadAuthenticator);
}

TEST_CASE("replay cache prunes expired entries", "[roles]") {
  ReplayCache cache;
  Bytes x1{0x01};
  Bytes x2{0x02};
  cache.insert(100, x1);
  cache.insert(160, x2);
  CHECK(cache.contains(100, x1));
  CHECK(!cache.contains(100, x2));
  CHECK(cache.size() == 2);

  cache.prune(220, 60);  // 100 is now outside any acceptance window
  CHECK(cache.size() == 1);
  CHECK(!cache.contains(100, x1));
  CHECK(cache.contains(160, x2));

  cache.prune(221, 60);  // 160 just fell out as well
  CHECK(cache.size() == 0);
}
