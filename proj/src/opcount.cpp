#include "wsnauth/opcount.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "wsnauth/roles.hpp"

namespace wsnauth {

std::string format_ops(const OpCounter& c) {
  std::ostringstream os;
  const char* sep = "";
  auto put = [&](const char* name, std::uint32_t v) {
    if (v == 0) return;
    os << sep << name << "=" << v;
    sep = " ";
  };
  put("M", c.m);
  put("P", c.p);
  put("E", c.e);
  put("A", c.a);
  put("H", c.h);
  std::string s = os.str();
  return s.empty() ? "0" : s;
}

SessionAudit audited_session(std::uint64_t seed) {
  const SysParams params;
  Suite setup(params);
  SeededRandom rng(seed);
  const Timestamp now = VirtualClock::kDefaultBase;

  const Bytes user_id = to_bytes("audit-user");
  const Bytes user_pw = to_bytes("audit-password");
  const Bytes sensor_id = to_bytes("audit-sensor");

  GatewaySecrets gw = gw_init(setup, to_bytes("gw"), rng);
  auto payload = gw_register_user(setup, gw, user_id, rng);
  if (!payload.ok()) throw std::logic_error("registration failed");
  auto card = card_personalize(setup, payload.value(), user_id, user_pw);
  if (!card.ok()) throw std::logic_error("personalization failed");
  auto sensor = gw_register_sensor(setup, gw, sensor_id);
  if (!sensor.ok()) throw std::logic_error("sensor registration failed");

  // Meters attach to the online exchange only; the one-time registration
  // above ran on an unmetered suite.
  SessionAudit audit;
  Suite user_suite(params);
  Suite gw_suite(params);
  Suite sensor_suite(params);
  user_suite.set_meter(&audit.user);
  gw_suite.set_meter(&audit.gateway);
  sensor_suite.set_meter(&audit.sensor);

  auto start = user_login_start(user_suite, card.value(), user_id, user_pw,
                                sensor_id, now, rng);
  if (!start.ok()) throw std::logic_error("login start failed");
  auto m2 = gw_process_m1(gw_suite, gw, start.value().m1, now, rng);
  if (!m2.ok()) throw std::logic_error("gateway processing failed");
  auto accept = sensor_process_m2(sensor_suite, sensor.value(), m2.value(),
                                  now);
  if (!accept.ok()) throw std::logic_error("sensor processing failed");
  auto sk = user_process_m3(user_suite, start.value().session,
                            accept.value().m3);
  if (!sk.ok() || !(sk.value() == accept.value().sk)) {
    throw std::logic_error("session keys diverged");
  }
  return audit;
}

namespace {

void report_row(std::ostringstream& os, const char* role, const OpCounter& got,
                const OpCounter& want) {
  os << "  " << std::left << std::setw(9) << role << std::setw(20)
     << format_ops(got) << "expected " << std::setw(20) << format_ops(want)
     << (got == want ? "PASS" : "FAIL") << "\n";
}

}  // namespace

std::string audit_report(const SessionAudit& audit) {
  std::ostringstream os;
  os << "operation counts per role "
     << "(M=point-mul P=map-to-point E=symmetric A=mac H=hash)\n";
  report_row(os, "user", audit.user, kExpectedUserOps);
  report_row(os, "gateway", audit.gateway, kExpectedGatewayOps);
  report_row(os, "sensor", audit.sensor, kExpectedSensorOps);
  report_row(os, "total", audit.total(), kExpectedTotalOps);
  os << (audit_matches_expected(audit) ? "audit: PASS" : "audit: FAIL")
     << "\n";
  return os.str();
}

std::string audit_machine_report(const SessionAudit& audit) {
  std::ostringstream os;
  const std::pair<const char*, OpCounter> rows[] = {
      {"u", audit.user},
      {"gw", audit.gateway},
      {"sn", audit.sensor},
      {"total", audit.total()},
  };
  for (const auto& [role, c] : rows) {
    os << role << ".M = " << c.m << "\n";
    os << role << ".P = " << c.p << "\n";
    os << role << ".E = " << c.e << "\n";
    os << role << ".A = " << c.a << "\n";
    os << role << ".H = " << c.h << "\n";
  }
  return os.str();
}

bool audit_matches_expected(const SessionAudit& audit) {
  return audit.user == kExpectedUserOps &&
         audit.gateway == kExpectedGatewayOps &&
         audit.sensor == kExpectedSensorOps &&
         audit.total() == kExpectedTotalOps;
}

}  // namespace wsnauth
