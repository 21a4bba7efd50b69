#ifndef WSNAUTH_HARNESS_HPP
#define WSNAUTH_HARNESS_HPP

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsnauth/roles.hpp"

namespace wsnauth {

struct TranscriptEntry {
  std::string direction;  // e.g. "U->GW"
  Bytes bytes;
};

// Append-only message log.
struct Transcript {
  std::vector<TranscriptEntry> entries;
  std::string to_log() const;
};

enum class EntityKind { User, Gateway, Sensor };

using InstanceId = std::size_t;

// One protocol participant instance. accepted implies sk and sid are set.
struct EntityInstance {
  EntityKind kind;
  Bytes entity_id;       // padded; gateway instances share the gateway id
  int instance_no = 0;
  SessionStatus status = SessionStatus::Running;
  std::optional<SessionKey> sk;
  std::optional<Bytes> sid;

  bool accepted() const { return status == SessionStatus::Accepted; }
};

struct ExecuteResult {
  Transcript transcript;
  InstanceId user;
  InstanceId gateway;
  InstanceId sensor;
};

struct GatewayDump {
  Scalar y;
  SymKey z;
};

// Attack surface for the protocol: a registered population plus the
// adversary-facing oracles. All randomness flows from one seeded source
// and all time from one virtual clock, so seeded runs are byte-identical.
class AdversaryContext {
 public:
  AdversaryContext(SysParams params, std::uint64_t seed,
                   std::string_view gw_name = "gw");
  ~AdversaryContext();
  AdversaryContext(const AdversaryContext&) = delete;
  AdversaryContext& operator=(const AdversaryContext&) = delete;

  Result<void> register_user(std::string_view name, BytesView pw);
  Result<void> register_sensor(std::string_view name);

  InstanceId new_user_instance(std::string_view user);
  InstanceId new_gateway_instance();
  InstanceId new_sensor_instance(std::string_view sensor);

  // Honest full run between fresh instances of the named parties.
  Result<ExecuteResult> execute(std::string_view user, std::string_view sensor);

  // Hands a user instance its login trigger; returns the emitted M1.
  Result<Bytes> start(InstanceId user_instance, std::string_view sensor);

  // Delivers arbitrary bytes to an instance. A reply is returned when the
  // role emits one; protocol rejection is a silent abort, visible only
  // through instance(). Aborted and accepted instances ignore traffic.
  std::optional<Bytes> send(InstanceId target, BytesView raw);

  Result<SessionKey> reveal(InstanceId instance);

  Result<Bytes> corrupt_ll_user(std::string_view user);       // password
  Result<Bytes> corrupt_sc(std::string_view user);            // card image
  Result<SymKey> corrupt_ll_sensor(std::string_view sensor);  // k_gs
  Result<GatewayDump> corrupt_ll_gateway();                   // (y, z)

  // The gateway keeps no password table, so there is nothing to dump.
  std::vector<Bytes> corrupt_vfr() const { return {}; }

  bool is_fresh(InstanceId instance) const;
  Result<bool> is_clean(std::string_view user) const;
  bool are_partners(InstanceId a, InstanceId b) const;

  void advance(std::int64_t seconds) { clock_.advance(seconds); }
  Timestamp now() const { return clock_.now(); }

  const EntityInstance& instance(InstanceId id) const;
  std::size_t instance_count() const { return instances_.size(); }
  const Transcript& transcript() const { return log_; }
  const Suite& suite() const { return suite_; }

  // Population access for attack construction and tests.
  Result<SmartCard> card_of(std::string_view user) const;
  Result<SensorIdentity> sensor_of(std::string_view sensor) const;
  const GatewaySecrets& gateway_secrets() const { return gw_; }

 private:
  struct UserAccount;
  struct SensorAccount;
  struct InstanceState;

  InstanceState& state(InstanceId id);
  Result<Bytes> padded(std::string_view name) const;
  std::optional<Bytes> deliver(InstanceState& inst, const Message& msg,
                               BytesView raw);
  void note_accept(InstanceState& inst, SessionKey sk, Bytes sid,
                   Bytes peer_user, Bytes peer_sensor);

  Suite suite_;
  SeededRandom rng_;
  VirtualClock clock_;
  GatewaySecrets gw_;
  bool gw_corrupted_ = false;

  std::map<Bytes, UserAccount> users_;
  std::map<Bytes, SensorAccount> sensors_;
  std::vector<std::unique_ptr<InstanceState>> instances_;
  std::map<Bytes, int> instance_counters_;

  // m1 bytes -> (user id, user instance) for sessions begun via start().
  std::map<Bytes, std::pair<Bytes, InstanceId>> m1_origin_;
  // m1 bytes -> m2 bytes recorded when a gateway instance forwards.
  std::map<Bytes, Bytes> m1_to_m2_;
  // m2 bytes -> (m1 bytes, sensor id) for sid resolution at the sensor.
  struct ForwardRecord {
    Bytes m1;
    Bytes sensor_id;
  };
  std::map<Bytes, ForwardRecord> m2_record_;

  std::set<InstanceId> revealed_;
  Transcript log_;
};

// Line-based scenario driver. Commands, one per line, `#` comments:
//   register user <name> <password>
//   register sensor <name>
//   instance user <name> | instance gateway | instance sensor <name>
//   execute <user> <sensor>
//   start <inst> <sensor>
//   send <inst|gw> <hex>
//   advance <seconds>
//   reveal <inst>
//   corrupt sc <user> | corrupt ll <user> | corrupt sensor <name>
//   corrupt gw | corrupt vfr
//   fresh <inst> | clean <user> | partners <a> <b> | status <inst>
// Each command writes one result line (execute writes its transcript).
Result<void> run_script(AdversaryContext& ctx, std::istream& in,
                        std::ostream& out);

}  // namespace wsnauth

#endif
