#include "wsnauth/wire.hpp"

#include <cstdio>
#include <sstream>

namespace wsnauth {

namespace {

std::size_t c_u_login_size(const SysParams& p) {
  // id_u | eid_u | k_us under the stream cipher, plus nonce.
  return SysParams::kNonceLen + p.id_len + p.omega_bytes() + p.kappa_bytes();
}

std::size_t c_gw_size(const SysParams& p) {
  return SysParams::kNonceLen + p.kappa_bytes();
}

std::size_t c_u_pwd_size(const SysParams& p) {
  return SysParams::kNonceLen + p.id_len + p.omega_bytes();
}

void append_ts(Bytes& out, Timestamp t) {
  append_u64_be(out, static_cast<std::uint64_t>(t));
}

Timestamp read_ts(const std::uint8_t* p) {
  return static_cast<Timestamp>(read_u64_be(p));
}

class Reader {
 public:
  explicit Reader(BytesView raw) : raw_(raw) {}

  BytesView take(std::size_t n) {
    BytesView out = raw_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  Timestamp take_ts() { return read_ts(take(8).data()); }

 private:
  BytesView raw_;
  std::size_t pos_ = 0;
};

}  // namespace

MsgType message_type(const Message& m) {
  switch (m.index()) {
    case 0:
      return MsgType::LoginM1;
    case 1:
      return MsgType::ForwardM2;
    case 2:
      return MsgType::ConfirmM3;
    case 3:
      return MsgType::PwdUpdateReq;
    default:
      return MsgType::PwdUpdateResp;
  }
}

std::size_t m1_size(const SysParams& p) {
  return 1 + 8 + p.id_len + SysParams::kPointLen + c_u_login_size(p) +
         SysParams::kMacLen;
}

std::size_t m2_size(const SysParams& p) {
  return 1 + p.id_len + 8 + 8 + c_gw_size(p) + SysParams::kMacLen;
}

std::size_t m3_size(const SysParams& p) { return 1 + p.kappa_bytes(); }

std::size_t pwd_req_size(const SysParams& p) {
  return 1 + 8 + SysParams::kPointLen + c_u_pwd_size(p);
}

std::size_t pwd_resp_size(const SysParams& p, bool ok) {
  return ok ? 2 + p.kappa_bytes() : 2;
}

Bytes encode(const SysParams& p, const Message& m) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(message_type(m)));
  if (const auto* m1 = std::get_if<LoginM1>(&m)) {
    append_ts(out, m1->t_u);
    append(out, m1->id_sn);
    append(out, m1->x.bytes());
    append(out, m1->c_u.encoded());
    append(out, m1->sigma_u.t);
  } else if (const auto* m2 = std::get_if<ForwardM2>(&m)) {
    append(out, m2->id_gw);
    append_ts(out, m2->t_gw);
    append_ts(out, m2->t_u);
    append(out, m2->c_gw.encoded());
    append(out, m2->sigma_gw.t);
  } else if (const auto* m3 = std::get_if<ConfirmM3>(&m)) {
    append(out, m3->rho_sn);
  } else if (const auto* req = std::get_if<PwdUpdateReq>(&m)) {
    append_ts(out, req->t_u);
    append(out, req->x.bytes());
    append(out, req->c_u.encoded());
  } else {
    const auto& resp = std::get<PwdUpdateResp>(m);
    out.push_back(resp.ok ? 0x01 : 0x00);
    if (resp.ok) append(out, resp.rho_gw);
  }
  (void)p;
  return out;
}

Result<Message> decode(const SysParams& p, BytesView raw) {
  if (raw.empty()) return Error::DecodeError;
  const std::uint8_t type = raw[0];
  Reader rd(raw.subspan(1));

  switch (type) {
    case static_cast<std::uint8_t>(MsgType::LoginM1): {
      if (raw.size() != m1_size(p)) return Error::LengthMismatch;
      LoginM1 m1;
      m1.t_u = rd.take_ts();
      auto id = rd.take(p.id_len);
      m1.id_sn.assign(id.begin(), id.end());
      auto x = GroupElement::decode(rd.take(SysParams::kPointLen));
      if (!x.ok()) return Error::InvalidPoint;
      m1.x = std::move(x).value();
      auto ct = Ciphertext::from_bytes(rd.take(c_u_login_size(p)));
      m1.c_u = std::move(ct).value();
      auto tag = rd.take(SysParams::kMacLen);
      m1.sigma_u.t.assign(tag.begin(), tag.end());
      return Message(std::move(m1));
    }
    case static_cast<std::uint8_t>(MsgType::ForwardM2): {
      if (raw.size() != m2_size(p)) return Error::LengthMismatch;
      ForwardM2 m2;
      auto id = rd.take(p.id_len);
      m2.id_gw.assign(id.begin(), id.end());
      m2.t_gw = rd.take_ts();
      m2.t_u = rd.take_ts();
      auto ct = Ciphertext::from_bytes(rd.take(c_gw_size(p)));
      m2.c_gw = std::move(ct).value();
      auto tag = rd.take(SysParams::kMacLen);
      m2.sigma_gw.t.assign(tag.begin(), tag.end());
      return Message(std::move(m2));
    }
    case static_cast<std::uint8_t>(MsgType::ConfirmM3): {
      if (raw.size() != m3_size(p)) return Error::LengthMismatch;
      ConfirmM3 m3;
      auto rho = rd.take(p.kappa_bytes());
      m3.rho_sn.assign(rho.begin(), rho.end());
      return Message(std::move(m3));
    }
    case static_cast<std::uint8_t>(MsgType::PwdUpdateReq): {
      if (raw.size() != pwd_req_size(p)) return Error::LengthMismatch;
      PwdUpdateReq req;
      req.t_u = rd.take_ts();
      auto x = GroupElement::decode(rd.take(SysParams::kPointLen));
      if (!x.ok()) return Error::InvalidPoint;
      req.x = std::move(x).value();
      auto ct = Ciphertext::from_bytes(rd.take(c_u_pwd_size(p)));
      req.c_u = std::move(ct).value();
      return Message(std::move(req));
    }
    case static_cast<std::uint8_t>(MsgType::PwdUpdateResp): {
      if (raw.size() < 2) return Error::LengthMismatch;
      const std::uint8_t status = raw[1];
      if (status != 0x00 && status != 0x01) return Error::DecodeError;
      PwdUpdateResp resp;
      resp.ok = status == 0x01;
      if (raw.size() != pwd_resp_size(p, resp.ok)) {
        return Error::LengthMismatch;
      }
      if (resp.ok) {
        resp.rho_gw.assign(raw.begin() + 2, raw.end());
      }
      return Message(std::move(resp));
    }
    default:
      return Error::UnknownType;
  }
}

Result<Bytes> mac_input_m1(const SysParams& p, BytesView id_gw,
                           BytesView id_sn, Timestamp t_u,
                           const Ciphertext& c_u) {
  if (id_gw.size() != p.id_len || id_sn.size() != p.id_len) {
    return Error::LengthMismatch;
  }
  if (c_u.encoded().size() != c_u_login_size(p)) return Error::LengthMismatch;
  Bytes out;
  append(out, id_gw);
  append(out, id_sn);
  append_ts(out, t_u);
  append(out, c_u.encoded());
  return out;
}

Result<Bytes> mac_input_m2(const SysParams& p, BytesView id_gw,
                           BytesView id_sn, Timestamp t_gw, Timestamp t_u,
                           const Ciphertext& c_gw) {
  if (id_gw.size() != p.id_len || id_sn.size() != p.id_len) {
    return Error::LengthMismatch;
  }
  if (c_gw.encoded().size() != c_gw_size(p)) return Error::LengthMismatch;
  Bytes out;
  append(out, id_gw);
  append(out, id_sn);
  append_ts(out, t_gw);
  append_ts(out, t_u);
  append(out, c_gw.encoded());
  return out;
}

std::string transcript_line(std::string_view direction, BytesView encoded) {
  std::ostringstream os;
  os << direction << "  ";
  if (encoded.empty()) {
    os << "--  ";
  } else {
    char buf[3];
    std::snprintf(buf, sizeof(buf), "%02x", encoded[0]);
    os << buf << "  ";
  }
  os << to_hex(encoded);
  return os.str();
}

}  // namespace wsnauth
