#include <catch2/catch_amalgamated.hpp>

#include "wsnauth/wire.hpp"

namespace {

using namespace wsnauth;

const SysParams kParams{};

GroupElement sample_point() {
  Suite suite{kParams};
  auto s = Scalar::from_u64(7);
  REQUIRE(s.ok());
  return suite.scalar_mult(s.value(), suite.generator());
}

Ciphertext sample_ct(std::size_t body_len, std::uint8_t nonce_fill,
                     std::uint8_t body_fill) {
  Ciphertext ct;
  ct.nonce = Bytes(SysParams::kNonceLen, nonce_fill);
  ct.body = Bytes(body_len, body_fill);
  return ct;
}

LoginM1 sample_m1() {
  LoginM1 m;
  m.t_u = 0x0102030405060708;
  m.id_sn = Bytes(kParams.id_len, 0xa1);
  m.x = sample_point();
  m.c_u = sample_ct(kParams.id_len + kParams.omega_bytes() +
                        kParams.kappa_bytes(),
                    0xb2, 0xc3);
  m.sigma_u.t = Bytes(SysParams::kMacLen, 0xd4);
  return m;
}

ForwardM2 sample_m2() {
  ForwardM2 m;
  m.id_gw = Bytes(kParams.id_len, 0xe5);
  m.t_gw = 0x1111111122222222;
  m.t_u = 0x0102030405060708;
  m.c_gw = sample_ct(kParams.kappa_bytes(), 0xf6, 0x07);
  m.sigma_gw.t = Bytes(SysParams::kMacLen, 0x18);
  return m;
}

PwdUpdateReq sample_pwd_req() {
  PwdUpdateReq m;
  m.t_u = 42;
  m.x = sample_point();
  m.c_u = sample_ct(kParams.id_len + kParams.omega_bytes(), 0x29, 0x3a);
  return m;
}

Bytes slice(const Bytes& b, std::size_t lo, std::size_t hi) {
  REQUIRE(hi <= b.size());
  return Bytes(b.begin() + lo, b.begin() + hi);
}

}  // namespace

TEST_CASE("login message layout is byte-exact", "[wire]") {
  LoginM1 m = sample_m1();
  Bytes raw = encode(kParams, m);

  REQUIRE(raw.size() == 202);
  CHECK(m1_size(kParams) == 202);
  CHECK(raw[0] == 0x01);
  CHECK(read_u64_be(raw.data() + 1) == 0x0102030405060708u);
  CHECK(slice(raw, 9, 25) == m.id_sn);
  CHECK(equal(slice(raw, 25, 58), m.x.bytes()));
  CHECK(slice(raw, 58, 74) == m.c_u.nonce);
  CHECK(slice(raw, 74, 170) == m.c_u.body);
  CHECK(slice(raw, 170, 202) == m.sigma_u.t);
}

TEST_CASE("forward and confirm layouts are byte-exact", "[wire]") {
  ForwardM2 m2 = sample_m2();
  Bytes raw = encode(kParams, m2);
  REQUIRE(raw.size() == 113);
  CHECK(m2_size(kParams) == 113);
  CHECK(raw[0] == 0x02);
  CHECK(slice(raw, 1, 17) == m2.id_gw);
  CHECK(read_u64_be(raw.data() + 17) == 0x1111111122222222u);
  CHECK(read_u64_be(raw.data() + 25) == 0x0102030405060708u);
  CHECK(slice(raw, 33, 49) == m2.c_gw.nonce);
  CHECK(slice(raw, 49, 81) == m2.c_gw.body);
  CHECK(slice(raw, 81, 113) == m2.sigma_gw.t);

  ConfirmM3 m3;
  m3.rho_sn = Bytes(kParams.kappa_bytes(), 0x4b);
  Bytes raw3 = encode(kParams, m3);
  REQUIRE(raw3.size() == 33);
  CHECK(m3_size(kParams) == 33);
  CHECK(raw3[0] == 0x03);
  CHECK(slice(raw3, 1, 33) == m3.rho_sn);
}

TEST_CASE("password update layouts are byte-exact", "[wire]") {
  PwdUpdateReq req = sample_pwd_req();
  Bytes raw = encode(kParams, req);
  REQUIRE(raw.size() == 122);
  CHECK(pwd_req_size(kParams) == 122);
  CHECK(raw[0] == 0x04);
  CHECK(read_u64_be(raw.data() + 1) == 42u);
  CHECK(equal(slice(raw, 9, 42), req.x.bytes()));
  CHECK(slice(raw, 42, 58) == req.c_u.nonce);
  CHECK(slice(raw, 58, 122) == req.c_u.body);

  PwdUpdateResp ok;
  ok.ok = true;
  ok.rho_gw = Bytes(kParams.kappa_bytes(), 0x5c);
  Bytes raw_ok = encode(kParams, ok);
  REQUIRE(raw_ok.size() == 34);
  CHECK(pwd_resp_size(kParams, true) == 34);
  CHECK(raw_ok[0] == 0x05);
  CHECK(raw_ok[1] == 0x01);
  CHECK(slice(raw_ok, 2, 34) == ok.rho_gw);

  PwdUpdateResp fail;
  Bytes raw_fail = encode(kParams, fail);
  CHECK(raw_fail == Bytes{0x05, 0x00});
  CHECK(pwd_resp_size(kParams, false) == 2);
}

TEST_CASE("every message type round-trips", "[wire]") {
  const Message msgs[] = {
      Message{sample_m1()},
      Message{sample_m2()},
      Message{ConfirmM3{Bytes(kParams.kappa_bytes(), 0x4b)}},
      Message{sample_pwd_req()},
      Message{PwdUpdateResp{true, Bytes(kParams.kappa_bytes(), 0x5c)}},
      Message{PwdUpdateResp{false, {}}},
  };
  for (const Message& m : msgs) {
    auto back = decode(kParams, encode(kParams, m));
    REQUIRE(back.ok());
    CHECK(back.value() == m);
    CHECK(message_type(back.value()) == message_type(m));
  }
}

TEST_CASE("decode rejects malformed frames", "[wire]") {
  CHECK(decode(kParams, {}).error() == Error::DecodeError);

  for (std::uint8_t t : {0x00, 0x06, 0x7f, 0xff}) {
    Bytes raw{t, 0x00, 0x00};
    CHECK(decode(kParams, raw).error() == Error::UnknownType);
  }

  const Message msgs[] = {
      Message{sample_m1()},
      Message{sample_m2()},
      Message{ConfirmM3{Bytes(kParams.kappa_bytes(), 0x4b)}},
      Message{sample_pwd_req()},
      Message{PwdUpdateResp{true, Bytes(kParams.kappa_bytes(), 0x5c)}},
      Message{PwdUpdateResp{false, {}}},
  };
  for (const Message& m : msgs) {
    Bytes raw = encode(kParams, m);

    Bytes longer = raw;
    longer.push_back(0x00);
    CHECK(decode(kParams, longer).error() == Error::LengthMismatch);

    Bytes shorter = raw;
    shorter.pop_back();
    if (shorter.size() >= 2) {
      CHECK(decode(kParams, shorter).error() == Error::LengthMismatch);
    }
  }

  Bytes status2 = encode(kParams, Message{PwdUpdateResp{false, {}}});
  status2[1] = 0x02;
  CHECK(decode(kParams, status2).error() == Error::DecodeError);
}

TEST_CASE("decode rejects off-curve points in place", "[wire]") {
  Bytes m1 = encode(kParams, Message{sample_m1()});
  m1[25] = 0x07;  // point prefix
  CHECK(decode(kParams, m1).error() == Error::InvalidPoint);

  Bytes req = encode(kParams, Message{sample_pwd_req()});
  req[9] = 0x07;
  CHECK(decode(kParams, req).error() == Error::InvalidPoint);
}

TEST_CASE("mac inputs concatenate fixed-width fields", "[wire]") {
  LoginM1 m1 = sample_m1();
  Bytes id_gw(kParams.id_len, 0xe5);

  auto in1 = mac_input_m1(kParams, id_gw, m1.id_sn, m1.t_u, m1.c_u);
  REQUIRE(in1.ok());
  REQUIRE(in1.value().size() == 152);
  CHECK(slice(in1.value(), 0, 16) == id_gw);
  CHECK(slice(in1.value(), 16, 32) == m1.id_sn);
  CHECK(read_u64_be(in1.value().data() + 32) ==
        static_cast<std::uint64_t>(m1.t_u));
  CHECK(slice(in1.value(), 40, 152) == m1.c_u.encoded());

  ForwardM2 m2 = sample_m2();
  auto in2 = mac_input_m2(kParams, m2.id_gw, m1.id_sn, m2.t_gw, m2.t_u,
                          m2.c_gw);
  REQUIRE(in2.ok());
  REQUIRE(in2.value().size() == 96);
  CHECK(slice(in2.value(), 0, 16) == m2.id_gw);
  CHECK(slice(in2.value(), 16, 32) == m1.id_sn);
  CHECK(read_u64_be(in2.value().data() + 32) ==
        static_cast<std::uint64_t>(m2.t_gw));
  CHECK(read_u64_be(in2.value().data() + 40) ==
        static_cast<std::uint64_t>(m2.t_u));
  CHECK(slice(in2.value(), 48, 96) == m2.c_gw.encoded());

  Bytes narrow_id(kParams.id_len - 1, 0xe5);
  CHECK(mac_input_m1(kParams, narrow_id, m1.id_sn, m1.t_u, m1.c_u).error() ==
        Error::LengthMismatch);
  CHECK(mac_input_m1(kParams, id_gw, narrow_id, m1.t_u, m1.c_u).error() ==
        Error::LengthMismatch);
  CHECK(mac_input_m2(kParams, narrow_id, m1.id_sn, m2.t_gw, m2.t_u, m2.c_gw)
            .error() == Error::LengthMismatch);
  CHECK(mac_input_m2(kParams, m2.id_gw, narrow_id, m2.t_gw, m2.t_u, m2.c_gw)
            .error() == Error::LengthMismatch);
}

TEST_CASE("sizes follow the parameter set", "[wire]") {
  SysParams p;
  p.id_len = 8;
  p.kappa = 128;
  // 1 + 8 + 8 + 33 + (16 + 8 + 32 + 16) + 32
  CHECK(m1_size(p) == 154);
  // 1 + 8 + 8 + 8 + (16 + 16) + 32
  CHECK(m2_size(p) == 89);
  CHECK(m3_size(p) == 17);
  // 1 + 8 + 33 + (16 + 8 + 32)
  CHECK(pwd_req_size(p) == 98);
  CHECK(pwd_resp_size(p, true) == 18);
  CHECK(pwd_resp_size(p, false) == 2);
}

TEST_CASE("transcript lines name direction, type, and payload", "[wire]") {
  CHECK(transcript_line("U->GW", Bytes{0x01, 0xab, 0xcd}) ==
        "U->GW  01  01abcd");
  CHECK(transcript_line("SN->U", Bytes{0x03}) == "SN->U  03  03");
  CHECK(transcript_line("GW->U", {}) == "GW->U  --  ");
}
