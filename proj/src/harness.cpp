#include "wsnauth/harness.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wsnauth {

std::string Transcript::to_log() const {
  std::string out;
  for (const auto& e : entries) {
    out += transcript_line(e.direction, e.bytes);
    out += "\n";
  }
  return out;
}

struct AdversaryContext::UserAccount {
  std::string name;
  Bytes id;  // padded
  Bytes pw;
  SmartCard card;
  bool ll_corrupted = false;
  bool sc_corrupted = false;
};

struct AdversaryContext::SensorAccount {
  std::string name;
  SensorIdentity identity;
  bool corrupted = false;
};

struct AdversaryContext::InstanceState {
  EntityInstance pub;
  std::optional<UserSession> session;  // user instances
  Bytes own_m1;                        // user instances, once started
  Bytes peer_user;                     // sensor/gateway instances
  Bytes peer_sensor;                   // user/gateway instances
  bool done = false;                   // gateway/sensor one-shot guard
};

AdversaryContext::AdversaryContext(SysParams params, std::uint64_t seed,
                                   std::string_view gw_name)
    : suite_(std::move(params)), rng_(seed), clock_() {
  gw_ = gw_init(suite_, to_bytes(gw_name), rng_);
}

AdversaryContext::~AdversaryContext() = default;

Result<Bytes> AdversaryContext::padded(std::string_view name) const {
  return pad_id(suite_.params(), to_bytes(name));
}

Result<void> AdversaryContext::register_user(std::string_view name,
                                             BytesView pw) {
  auto id = padded(name);
  if (!id.ok()) return id.error();
  if (users_.count(id.value()) != 0) return Error::AlreadyRegistered;

  auto payload = gw_register_user(suite_, gw_, id.value(), rng_);
  if (!payload.ok()) return payload.error();
  auto card = card_personalize(suite_, payload.value(), id.value(), pw);
  if (!card.ok()) return card.error();

  UserAccount acc;
  acc.name = std::string(name);
  acc.id = id.value();
  acc.pw = Bytes(pw.begin(), pw.end());
  acc.card = std::move(card).value();
  users_.emplace(acc.id, std::move(acc));
  return {};
}

Result<void> AdversaryContext::register_sensor(std::string_view name) {
  auto id = padded(name);
  if (!id.ok()) return id.error();
  auto sensor = gw_register_sensor(suite_, gw_, id.value());
  if (!sensor.ok()) return sensor.error();

  SensorAccount acc;
  acc.name = std::string(name);
  acc.identity = std::move(sensor).value();
  sensors_.emplace(acc.identity.id, std::move(acc));
  return {};
}

AdversaryContext::InstanceState& AdversaryContext::state(InstanceId id) {
  return *instances_.at(id);
}

InstanceId AdversaryContext::new_user_instance(std::string_view user) {
  auto id = padded(user);
  if (!id.ok() || users_.count(id.value()) == 0) {
    throw std::out_of_range("unknown user");
  }
  auto inst = std::make_unique<InstanceState>();
  inst->pub.kind = EntityKind::User;
  inst->pub.entity_id = id.value();
  inst->pub.instance_no = instance_counters_[id.value()]++;
  instances_.push_back(std::move(inst));
  return instances_.size() - 1;
}

InstanceId AdversaryContext::new_gateway_instance() {
  auto inst = std::make_unique<InstanceState>();
  inst->pub.kind = EntityKind::Gateway;
  inst->pub.entity_id = gw_.id_gw;
  inst->pub.instance_no = instance_counters_[gw_.id_gw]++;
  instances_.push_back(std::move(inst));
  return instances_.size() - 1;
}

InstanceId AdversaryContext::new_sensor_instance(std::string_view sensor) {
  auto id = padded(sensor);
  if (!id.ok() || sensors_.count(id.value()) == 0) {
    throw std::out_of_range("unknown sensor");
  }
  auto inst = std::make_unique<InstanceState>();
  inst->pub.kind = EntityKind::Sensor;
  inst->pub.entity_id = id.value();
  inst->pub.instance_no = instance_counters_[id.value()]++;
  instances_.push_back(std::move(inst));
  return instances_.size() - 1;
}

void AdversaryContext::note_accept(InstanceState& inst, SessionKey sk,
                                   Bytes sid, Bytes peer_user,
                                   Bytes peer_sensor) {
  inst.pub.status = SessionStatus::Accepted;
  inst.pub.sk = std::move(sk);
  inst.pub.sid = std::move(sid);
  if (!peer_user.empty()) inst.peer_user = std::move(peer_user);
  if (!peer_sensor.empty()) inst.peer_sensor = std::move(peer_sensor);
}

Result<ExecuteResult> AdversaryContext::execute(std::string_view user,
                                                std::string_view sensor) {
  auto uid = padded(user);
  auto sid_name = padded(sensor);
  if (!uid.ok() || users_.count(uid.value()) == 0) {
    return Error::UnknownEntity;
  }
  if (!sid_name.ok() || sensors_.count(sid_name.value()) == 0) {
    return Error::UnknownEntity;
  }
  UserAccount& uacc = users_.at(uid.value());
  SensorAccount& sacc = sensors_.at(sid_name.value());

  ExecuteResult result;
  result.user = new_user_instance(user);
  result.gateway = new_gateway_instance();
  result.sensor = new_sensor_instance(sensor);

  auto start = user_login_start(suite_, uacc.card, uacc.id, uacc.pw, sacc.identity.id,
                                clock_.now(), rng_);
  if (!start.ok()) return start.error();
  Bytes m1b = encode(suite_.params(), Message(start.value().m1));

  auto m2 = gw_process_m1(suite_, gw_, start.value().m1, clock_.now(), rng_);
  if (!m2.ok()) return m2.error();
  Bytes m2b = encode(suite_.params(), Message(m2.value()));

  auto accept = sensor_process_m2(suite_, sacc.identity, m2.value(),
                                  clock_.now());
  if (!accept.ok()) return accept.error();
  Bytes m3b = encode(suite_.params(), Message(accept.value().m3));

  auto sk_user =
      user_process_m3(suite_, start.value().session, accept.value().m3);
  if (!sk_user.ok()) return sk_user.error();

  Bytes sid = session_id(suite_, start.value().m1, m2.value());

  m1_origin_[m1b] = {uacc.id, result.user};
  m1_to_m2_[m1b] = m2b;
  m2_record_[m2b] = ForwardRecord{m1b, sacc.identity.id};

  InstanceState& ui = state(result.user);
  ui.session = std::move(start.value().session);
  ui.own_m1 = m1b;
  note_accept(ui, sk_user.value(), sid, {}, sacc.identity.id);

  InstanceState& gi = state(result.gateway);
  gi.peer_user = uacc.id;
  gi.peer_sensor = sacc.identity.id;
  gi.done = true;

  InstanceState& si = state(result.sensor);
  note_accept(si, accept.value().sk, sid, uacc.id, {});

  result.transcript.entries = {{"U->GW", m1b}, {"GW->SN", m2b},
                               {"SN->U", m3b}};
  for (const auto& e : result.transcript.entries) {
    log_.entries.push_back(e);
  }
  return result;
}

Result<Bytes> AdversaryContext::start(InstanceId user_instance,
                                      std::string_view sensor) {
  if (user_instance >= instances_.size()) return Error::UnknownEntity;
  InstanceState& inst = state(user_instance);
  if (inst.pub.kind != EntityKind::User) return Error::UnknownEntity;
  if (inst.pub.status != SessionStatus::Running || inst.session.has_value()) {
    return Error::NotAccepted;
  }
  auto target = padded(sensor);
  if (!target.ok()) return target.error();

  UserAccount& acc = users_.at(inst.pub.entity_id);
  auto ls = user_login_start(suite_, acc.card, acc.id, acc.pw, target.value(),
                             clock_.now(), rng_);
  if (!ls.ok()) return ls.error();

  Bytes m1b = encode(suite_.params(), Message(ls.value().m1));
  inst.session = std::move(ls.value().session);
  inst.own_m1 = m1b;
  inst.peer_sensor = target.value();
  m1_origin_[m1b] = {acc.id, user_instance};
  log_.entries.push_back({"U->GW", m1b});
  return m1b;
}

std::optional<Bytes> AdversaryContext::deliver(InstanceState& inst,
                                               const Message& msg,
                                               BytesView raw) {
  const Bytes raw_copy(raw.begin(), raw.end());

  if (inst.pub.kind == EntityKind::Gateway) {
    if (const auto* m1 = std::get_if<LoginM1>(&msg)) {
      auto m2 = gw_process_m1(suite_, gw_, *m1, clock_.now(), rng_);
      if (!m2.ok()) {
        inst.pub.status = SessionStatus::Aborted;
        return std::nullopt;
      }
      Bytes m2b = encode(suite_.params(), Message(m2.value()));
      m1_to_m2_[raw_copy] = m2b;
      m2_record_[m2b] = ForwardRecord{raw_copy, m1->id_sn};
      auto origin = m1_origin_.find(raw_copy);
      if (origin != m1_origin_.end()) inst.peer_user = origin->second.first;
      inst.peer_sensor = m1->id_sn;
      inst.done = true;
      log_.entries.push_back({"GW->SN", m2b});
      return m2b;
    }
    if (const auto* req = std::get_if<PwdUpdateReq>(&msg)) {
      PwdUpdateOutcome outcome =
          gw_process_pwd_update(suite_, gw_, *req, clock_.now());
      if (outcome.reject_reason.has_value()) {
        inst.pub.status = SessionStatus::Aborted;
      }
      inst.done = true;
      Bytes respb = encode(suite_.params(), Message(outcome.response));
      log_.entries.push_back({"GW->U", respb});
      return respb;
    }
    inst.pub.status = SessionStatus::Aborted;
    return std::nullopt;
  }

  if (inst.pub.kind == EntityKind::Sensor) {
    const auto* m2 = std::get_if<ForwardM2>(&msg);
    if (m2 == nullptr) {
      inst.pub.status = SessionStatus::Aborted;
      return std::nullopt;
    }
    SensorAccount& acc = sensors_.at(inst.pub.entity_id);
    auto accept = sensor_process_m2(suite_, acc.identity, *m2, clock_.now());
    inst.done = true;
    if (!accept.ok()) {
      inst.pub.status = SessionStatus::Aborted;
      return std::nullopt;
    }
    Bytes sid;
    Bytes peer_user;
    auto rec = m2_record_.find(raw_copy);
    if (rec != m2_record_.end()) {
      sid = suite_.hash(HashDomain::H, concat({rec->second.m1, raw_copy}));
      auto origin = m1_origin_.find(rec->second.m1);
      if (origin != m1_origin_.end()) peer_user = origin->second.first;
    } else {
      // No recorded first message: the sid still commits to what this
      // instance saw, but it can never match an honest partner's.
      sid = suite_.hash(HashDomain::H, raw_copy);
    }
    note_accept(inst, accept.value().sk, std::move(sid),
                std::move(peer_user), {});
    Bytes m3b = encode(suite_.params(), Message(accept.value().m3));
    log_.entries.push_back({"SN->U", m3b});
    return m3b;
  }

  // User instance: only the confirmation message is meaningful, and only
  // while a started session is waiting on it.
  const auto* m3 = std::get_if<ConfirmM3>(&msg);
  if (m3 == nullptr || !inst.session.has_value()) {
    inst.pub.status = SessionStatus::Aborted;
    return std::nullopt;
  }
  auto sk = user_process_m3(suite_, *inst.session, *m3);
  if (!sk.ok()) {
    inst.pub.status = SessionStatus::Aborted;
    return std::nullopt;
  }
  Bytes sid;
  auto m2b = m1_to_m2_.find(inst.own_m1);
  if (m2b != m1_to_m2_.end()) {
    sid = suite_.hash(HashDomain::H, concat({inst.own_m1, m2b->second}));
  } else {
    sid = suite_.hash(HashDomain::H, inst.own_m1);
  }
  note_accept(inst, std::move(sk).value(), std::move(sid), {}, {});
  return std::nullopt;
}

std::optional<Bytes> AdversaryContext::send(InstanceId target, BytesView raw) {
  if (target >= instances_.size()) return std::nullopt;
  InstanceState& inst = state(target);
  if (inst.pub.status != SessionStatus::Running || inst.done) {
    return std::nullopt;
  }
  auto msg = decode(suite_.params(), raw);
  if (!msg.ok()) {
    inst.pub.status = SessionStatus::Aborted;
    return std::nullopt;
  }
  return deliver(inst, msg.value(), raw);
}

Result<SessionKey> AdversaryContext::reveal(InstanceId instance) {
  if (instance >= instances_.size()) return Error::UnknownEntity;
  InstanceState& inst = state(instance);
  if (!inst.pub.accepted()) return Error::NotAccepted;
  revealed_.insert(instance);
  return *inst.pub.sk;
}

Result<Bytes> AdversaryContext::corrupt_ll_user(std::string_view user) {
  auto id = padded(user);
  if (!id.ok()) return Error::UnknownEntity;
  auto it = users_.find(id.value());
  if (it == users_.end()) return Error::UnknownEntity;
  it->second.ll_corrupted = true;
  return it->second.pw;
}

Result<Bytes> AdversaryContext::corrupt_sc(std::string_view user) {
  auto id = padded(user);
  if (!id.ok()) return Error::UnknownEntity;
  auto it = users_.find(id.value());
  if (it == users_.end()) return Error::UnknownEntity;
  it->second.sc_corrupted = true;
  return it->second.card.image(suite_);
}

Result<SymKey> AdversaryContext::corrupt_ll_sensor(std::string_view sensor) {
  auto id = padded(sensor);
  if (!id.ok()) return Error::UnknownEntity;
  auto it = sensors_.find(id.value());
  if (it == sensors_.end()) return Error::UnknownEntity;
  it->second.corrupted = true;
  return it->second.identity.k_gs;
}

Result<GatewayDump> AdversaryContext::corrupt_ll_gateway() {
  gw_corrupted_ = true;
  return GatewayDump{gw_.y, gw_.z};
}

bool AdversaryContext::are_partners(InstanceId a, InstanceId b) const {
  if (a >= instances_.size() || b >= instances_.size() || a == b) {
    return false;
  }
  const EntityInstance& ia = instances_[a]->pub;
  const EntityInstance& ib = instances_[b]->pub;
  return ia.accepted() && ib.accepted() && ia.sid.has_value() &&
         ib.sid.has_value() && *ia.sid == *ib.sid;
}

bool AdversaryContext::is_fresh(InstanceId instance) const {
  if (instance >= instances_.size()) return false;
  const InstanceState& inst = *instances_[instance];

  if (revealed_.count(instance) != 0) return false;
  for (InstanceId other = 0; other < instances_.size(); ++other) {
    if (other != instance && revealed_.count(other) != 0 &&
        are_partners(instance, other)) {
      return false;
    }
  }

  // Session user: the instance itself for user instances, the recorded
  // peer otherwise.
  Bytes session_user = inst.pub.kind == EntityKind::User
                           ? inst.pub.entity_id
                           : inst.peer_user;
  if (!session_user.empty()) {
    auto it = users_.find(session_user);
    if (it != users_.end() && it->second.ll_corrupted &&
        it->second.sc_corrupted) {
      return false;
    }
  }

  Bytes session_sensor = inst.pub.kind == EntityKind::Sensor
                             ? inst.pub.entity_id
                             : inst.peer_sensor;
  if (!session_sensor.empty()) {
    auto it = sensors_.find(session_sensor);
    if (it != sensors_.end() && it->second.corrupted) return false;
  }

  return !gw_corrupted_;
}

Result<bool> AdversaryContext::is_clean(std::string_view user) const {
  auto id = padded(user);
  if (!id.ok()) return Error::UnknownEntity;
  auto it = users_.find(id.value());
  if (it == users_.end()) return Error::UnknownEntity;
  // Sensor corruption deliberately plays no part here.
  if (it->second.ll_corrupted && it->second.sc_corrupted) return false;
  if (gw_corrupted_) return false;
  return true;
}

const EntityInstance& AdversaryContext::instance(InstanceId id) const {
  return instances_.at(id)->pub;
}

Result<SmartCard> AdversaryContext::card_of(std::string_view user) const {
  auto id = padded(user);
  if (!id.ok()) return Error::UnknownEntity;
  auto it = users_.find(id.value());
  if (it == users_.end()) return Error::UnknownEntity;
  return it->second.card;
}

Result<SensorIdentity> AdversaryContext::sensor_of(
    std::string_view sensor) const {
  auto id = padded(sensor);
  if (!id.ok()) return Error::UnknownEntity;
  auto it = sensors_.find(id.value());
  if (it == sensors_.end()) return Error::UnknownEntity;
  return it->second.identity;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

bool parse_index(const std::string& tok, std::size_t& out) {
  if (tok.empty() || tok.size() > 18) return false;
  for (char c : tok) {
    if (c < '0' || c > '9') return false;
  }
  out = std::stoull(tok);
  return true;
}

const char* status_name(SessionStatus s) {
  switch (s) {
    case SessionStatus::Running:
      return "running";
    case SessionStatus::Accepted:
      return "accepted";
    default:
      return "aborted";
  }
}

}  // namespace

Result<void> run_script(AdversaryContext& ctx, std::istream& in,
                        std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    auto tok = tokenize(line);
    if (tok.empty() || tok[0][0] == '#') continue;

    auto fail_line = [&](Error e) { out << "error: " << to_string(e) << "\n"; };

    if (tok[0] == "register" && tok.size() == 4 && tok[1] == "user") {
      auto r = ctx.register_user(tok[2], to_bytes(tok[3]));
      r.ok() ? void(out << "ok\n") : fail_line(r.error());
    } else if (tok[0] == "register" && tok.size() == 3 &&
               tok[1] == "sensor") {
      auto r = ctx.register_sensor(tok[2]);
      r.ok() ? void(out << "ok\n") : fail_line(r.error());
    } else if (tok[0] == "instance" && tok.size() >= 2) {
      if (tok[1] == "gateway" && tok.size() == 2) {
        out << "inst " << ctx.new_gateway_instance() << "\n";
      } else if (tok[1] == "user" && tok.size() == 3 &&
                 ctx.card_of(tok[2]).ok()) {
        out << "inst " << ctx.new_user_instance(tok[2]) << "\n";
      } else if (tok[1] == "sensor" && tok.size() == 3 &&
                 ctx.sensor_of(tok[2]).ok()) {
        out << "inst " << ctx.new_sensor_instance(tok[2]) << "\n";
      } else {
        fail_line(Error::UnknownEntity);
      }
    } else if (tok[0] == "execute" && tok.size() == 3) {
      auto r = ctx.execute(tok[1], tok[2]);
      if (!r.ok()) {
        fail_line(r.error());
      } else {
        out << r.value().transcript.to_log();
        out << "execute ok u=" << r.value().user
            << " gw=" << r.value().gateway << " sn=" << r.value().sensor
            << "\n";
      }
    } else if (tok[0] == "start" && tok.size() == 3) {
      std::size_t idx = 0;
      if (!parse_index(tok[1], idx)) return Error::DecodeError;
      auto r = ctx.start(idx, tok[2]);
      r.ok() ? void(out << to_hex(r.value()) << "\n") : fail_line(r.error());
    } else if (tok[0] == "send" && tok.size() == 3) {
      std::size_t idx = 0;
      if (tok[1] == "gw") {
        idx = ctx.new_gateway_instance();
      } else if (!parse_index(tok[1], idx)) {
        return Error::DecodeError;
      }
      auto raw = from_hex(tok[2]);
      if (!raw.ok()) return Error::DecodeError;
      auto reply = ctx.send(idx, raw.value());
      if (reply.has_value()) {
        out << to_hex(*reply) << "\n";
      } else {
        out << "-\n";
      }
    } else if (tok[0] == "advance" && tok.size() == 2) {
      std::size_t secs = 0;
      if (!parse_index(tok[1], secs)) return Error::DecodeError;
      ctx.advance(static_cast<std::int64_t>(secs));
      out << "t=" << ctx.now() << "\n";
    } else if (tok[0] == "reveal" && tok.size() == 2) {
      std::size_t idx = 0;
      if (!parse_index(tok[1], idx)) return Error::DecodeError;
      auto r = ctx.reveal(idx);
      r.ok() ? void(out << to_hex(r.value().k) << "\n") : fail_line(r.error());
    } else if (tok[0] == "corrupt" && tok.size() >= 2) {
      if (tok[1] == "sc" && tok.size() == 3) {
        auto r = ctx.corrupt_sc(tok[2]);
        r.ok() ? void(out << to_hex(r.value()) << "\n")
               : fail_line(r.error());
      } else if (tok[1] == "ll" && tok.size() == 3) {
        auto r = ctx.corrupt_ll_user(tok[2]);
        r.ok() ? void(out << to_hex(r.value()) << "\n")
               : fail_line(r.error());
      } else if (tok[1] == "sensor" && tok.size() == 3) {
        auto r = ctx.corrupt_ll_sensor(tok[2]);
        r.ok() ? void(out << to_hex(r.value().k) << "\n")
               : fail_line(r.error());
      } else if (tok[1] == "gw" && tok.size() == 2) {
        auto r = ctx.corrupt_ll_gateway();
        if (r.ok()) {
          out << "y=" << to_hex(r.value().y.bytes())
              << " z=" << to_hex(r.value().z.k) << "\n";
        } else {
          fail_line(r.error());
        }
      } else if (tok[1] == "vfr" && tok.size() == 2) {
        out << (ctx.corrupt_vfr().empty() ? "empty\n" : "nonempty\n");
      } else {
        return Error::DecodeError;
      }
    } else if (tok[0] == "fresh" && tok.size() == 2) {
      std::size_t idx = 0;
      if (!parse_index(tok[1], idx)) return Error::DecodeError;
      out << (ctx.is_fresh(idx) ? "true\n" : "false\n");
    } else if (tok[0] == "clean" && tok.size() == 2) {
      auto r = ctx.is_clean(tok[1]);
      r.ok() ? void(out << (r.value() ? "true\n" : "false\n"))
             : fail_line(r.error());
    } else if (tok[0] == "partners" && tok.size() == 3) {
      std::size_t a = 0, b = 0;
      if (!parse_index(tok[1], a) || !parse_index(tok[2], b)) {
        return Error::DecodeError;
      }
      out << (ctx.are_partners(a, b) ? "true\n" : "false\n");
    } else if (tok[0] == "status" && tok.size() == 2) {
      std::size_t idx = 0;
      if (!parse_index(tok[1], idx)) return Error::DecodeError;
      if (idx >= ctx.instance_count()) {
        fail_line(Error::UnknownEntity);
      } else {
        out << status_name(ctx.instance(idx).status) << "\n";
      }
    } else {
      return Error::DecodeError;
    }
  }
  return {};
}

}  // namespace wsnauth
