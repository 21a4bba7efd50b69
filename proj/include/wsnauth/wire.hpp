#ifndef WSNAUTH_WIRE_HPP
#define WSNAUTH_WIRE_HPP

#include <string>
#include <variant>

#include "wsnauth/clock.hpp"
#include "wsnauth/primitives.hpp"

namespace wsnauth {

// Message layouts, all fields fixed-width under one parameter set.
// Offsets below assume the default set (id_len 16, 33-byte points,
// 16-byte nonces, 32-byte tags, kappa = 256).
//
//   login M1        01 | t_u:8 | id_sn:16 | x:33 | c_u:112 | sigma:32
//   forward M2      02 | id_gw:16 | t_gw:8 | t_u:8 | c_gw:48 | sigma:32
//   confirm M3      03 | rho_sn:32
//   pwd request     04 | t_u:8 | x:33 | c_u:80
//   pwd response    05 | status:1 [| rho_gw:32 when status = ok]
enum class MsgType : std::uint8_t {
  LoginM1 = 0x01,
  ForwardM2 = 0x02,
  ConfirmM3 = 0x03,
  PwdUpdateReq = 0x04,
  PwdUpdateResp = 0x05,
};

struct LoginM1 {
  Timestamp t_u = 0;
  Bytes id_sn;       // id_len
  GroupElement x;    // ephemeral public point
  Ciphertext c_u;    // Enc(id_u | eid_u | k_us)
  MacTag sigma_u;
  bool operator==(const LoginM1&) const = default;
};

struct ForwardM2 {
  Bytes id_gw;       // id_len
  Timestamp t_gw = 0;
  Timestamp t_u = 0;
  Ciphertext c_gw;   // Enc(k_us)
  MacTag sigma_gw;
  bool operator==(const ForwardM2&) const = default;
};

struct ConfirmM3 {
  Bytes rho_sn;      // kappa/8
  bool operator==(const ConfirmM3&) const = default;
};

struct PwdUpdateReq {
  Timestamp t_u = 0;
  GroupElement x;
  Ciphertext c_u;    // Enc(id_u | eid_u)
  bool operator==(const PwdUpdateReq&) const = default;
};

struct PwdUpdateResp {
  bool ok = false;
  Bytes rho_gw;      // kappa/8, present iff ok
  bool operator==(const PwdUpdateResp&) const = default;
};

using Message =
    std::variant<LoginM1, ForwardM2, ConfirmM3, PwdUpdateReq, PwdUpdateResp>;

MsgType message_type(const Message& m);

// Encoded sizes under params p.
std::size_t m1_size(const SysParams& p);
std::size_t m2_size(const SysParams& p);
std::size_t m3_size(const SysParams& p);
std::size_t pwd_req_size(const SysParams& p);
std::size_t pwd_resp_size(const SysParams& p, bool ok);

Bytes encode(const SysParams& p, const Message& m);

// Checks the type byte, then the exact length for that type, then point
// validity. Field-width errors inside an otherwise well-sized message
// cannot occur (all widths are fixed).
Result<Message> decode(const SysParams& p, BytesView raw);

// MAC input layouts. Width of every field is checked; the M2 input is
// 2 * id_len + 16 + |c_gw| bytes.
Result<Bytes> mac_input_m1(const SysParams& p, BytesView id_gw,
                           BytesView id_sn, Timestamp t_u,
                           const Ciphertext& c_u);
Result<Bytes> mac_input_m2(const SysParams& p, BytesView id_gw,
                           BytesView id_sn, Timestamp t_gw, Timestamp t_u,
                           const Ciphertext& c_gw);

// One transcript-log line: `direction  type  hex-bytes`.
std::string transcript_line(std::string_view direction, BytesView encoded);

}  // namespace wsnauth

#endif
