#include "wsnauth/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>

#include "wsnauth/attacks.hpp"
#include "wsnauth/opcount.hpp"
#include "wsnauth/persist.hpp"

namespace wsnauth {

namespace {

namespace fs = std::filesystem;

struct CliEnv {
  fs::path state_dir = "state";
  std::optional<fs::path> params_path;
  std::optional<std::uint64_t> seed;
  bool virtual_clock = false;
  bool json = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  fs::path params_file() const {
    return params_path.value_or(state_dir / "params.conf");
  }
  fs::path gateway_file() const { return state_dir / "gateway.state"; }
  fs::path card_file(const std::string& user) const {
    return state_dir / ("card_" + user + ".bin");
  }
  fs::path sensor_file(const std::string& sensor) const {
    return state_dir / ("sensor_" + sensor + ".key");
  }
};

int usage_error(const CliEnv& env, const std::string& what) {
  *env.err << "error: " << what << "\n";
  return 2;
}

int usage_error(const CliEnv& env, Error e) {
  return usage_error(env, std::string(to_string(e)));
}

std::unique_ptr<RandomSource> make_rng(const CliEnv& env) {
  if (env.seed.has_value()) {
    return std::make_unique<SeededRandom>(*env.seed);
  }
  return std::make_unique<SystemRandom>();
}

Timestamp current_time(const CliEnv& env) {
  if (env.virtual_clock || env.seed.has_value()) {
    return VirtualClock::kDefaultBase;
  }
  return SystemClock().now();
}

// Names become file-name fragments, so keep them to a safe alphabet.
bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 64) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                    c == '.';
    if (!ok) return false;
  }
  return true;
}

Result<SysParams> load_env_params(const CliEnv& env) {
  return load_params_file(env.params_file());
}

int cmd_setup(const CliEnv& env, const std::string& gw_name, bool force) {
  if (!valid_name(gw_name)) return usage_error(env, Error::IdError);
  auto lock = DirLock::acquire(env.state_dir);
  if (!lock.ok()) {
    return usage_error(env, "IoError (state directory locked)");
  }

  const fs::path params_out = env.state_dir / "params.conf";
  if (!force &&
      (fs::exists(params_out) || fs::exists(env.gateway_file()))) {
    return usage_error(env, Error::ExistingState);
  }

  SysParams params;
  if (env.params_path.has_value()) {
    auto loaded = load_params_file(*env.params_path);
    if (!loaded.ok()) return usage_error(env, loaded.error());
    params = loaded.value();
  }

  Suite suite(params);
  auto rng = make_rng(env);
  GatewaySecrets gw = gw_init(suite, to_bytes(gw_name), *rng);

  if (auto r = save_params_file(params_out, params); !r.ok()) {
    return usage_error(env, r.error());
  }
  if (auto r = save_gateway_state(env.gateway_file(), gw); !r.ok()) {
    return usage_error(env, r.error());
  }

  *env.out << "setup ok\n";
  *env.out << "id_gw = " << to_hex(gw.id_gw) << "\n";
  *env.out << "y_pub = " << to_hex(gw.y_pub.bytes()) << "\n";
  *env.out << "state_dir = " << env.state_dir.string() << "\n";
  return 0;
}

int cmd_register_user(const CliEnv& env, const std::string& name,
                      const std::string& password) {
  if (!valid_name(name)) return usage_error(env, Error::IdError);
  auto lock = DirLock::acquire(env.state_dir);
  if (!lock.ok()) return usage_error(env, "IoError (state directory locked)");

  auto params = load_env_params(env);
  if (!params.ok()) return usage_error(env, "IoError (run setup first)");
  auto gw = load_gateway_state(env.gateway_file());
  if (!gw.ok()) return usage_error(env, "IoError (run setup first)");

  const fs::path card_path = env.card_file(name);
  if (fs::exists(card_path)) return usage_error(env, Error::DuplicateId);

  Suite suite(params.value());
  auto rng = make_rng(env);
  auto payload =
      gw_register_user(suite, gw.value(), to_bytes(name), *rng);
  if (!payload.ok()) return usage_error(env, payload.error());
  auto card =
      card_personalize(suite, payload.value(), to_bytes(name),
                       to_bytes(password));
  if (!card.ok()) return usage_error(env, card.error());
  if (auto r = save_card(card_path, suite, card.value()); !r.ok()) {
    return usage_error(env, r.error());
  }

  *env.out << "registered user " << name << "\n";
  *env.out << "card = " << card_path.string() << "\n";
  return 0;
}

int cmd_register_sensor(const CliEnv& env, const std::string& name) {
  if (!valid_name(name)) return usage_error(env, Error::IdError);
  auto lock = DirLock::acquire(env.state_dir);
  if (!lock.ok()) return usage_error(env, "IoError (state directory locked)");

  auto params = load_env_params(env);
  if (!params.ok()) return usage_error(env, "IoError (run setup first)");
  auto gw = load_gateway_state(env.gateway_file());
  if (!gw.ok()) return usage_error(env, "IoError (run setup first)");

  Suite suite(params.value());
  auto sensor = gw_register_sensor(suite, gw.value(), to_bytes(name));
  if (!sensor.ok()) {
    if (sensor.error() == Error::AlreadyRegistered) {
      return usage_error(env, Error::DuplicateId);
    }
    return usage_error(env, sensor.error());
  }

  if (auto r = save_sensor_key(env.sensor_file(name), sensor.value());
      !r.ok()) {
    return usage_error(env, r.error());
  }
  if (auto r = save_gateway_state(env.gateway_file(), gw.value()); !r.ok()) {
    return usage_error(env, r.error());
  }

  *env.out << "registered sensor " << name << "\n";
  *env.out << "key_file = " << env.sensor_file(name).string() << "\n";
  return 0;
}

int abort_verdict(const CliEnv& env, Error e) {
  *env.out << "verdict = ABORT " << to_string(e) << "\n";
  return 1;
}

int cmd_session(const CliEnv& env, const std::string& user,
                const std::string& password, const std::string& sensor) {
  if (!valid_name(user) || !valid_name(sensor)) {
    return usage_error(env, Error::IdError);
  }
  auto lock = DirLock::acquire(env.state_dir);
  if (!lock.ok()) return usage_error(env, "IoError (state directory locked)");

  auto params = load_env_params(env);
  if (!params.ok()) return usage_error(env, "IoError (run setup first)");
  auto gw = load_gateway_state(env.gateway_file());
  if (!gw.ok()) return usage_error(env, "IoError (run setup first)");

  Suite suite(params.value());
  auto card = load_card(env.card_file(user), suite);
  if (!card.ok()) return usage_error(env, "IoError (unknown user card)");

  auto rng = make_rng(env);
  const Timestamp now = current_time(env);

  auto start = user_login_start(suite, card.value(), to_bytes(user),
                                to_bytes(password), to_bytes(sensor), now,
                                *rng);
  if (!start.ok()) return usage_error(env, start.error());
  Bytes m1b = encode(params.value(), Message(start.value().m1));
  *env.out << transcript_line("U->GW", m1b) << "\n";

  auto m2 = gw_process_m1(suite, gw.value(), start.value().m1, now, *rng);
  if (!m2.ok()) return abort_verdict(env, m2.error());
  Bytes m2b = encode(params.value(), Message(m2.value()));
  *env.out << transcript_line("GW->SN", m2b) << "\n";

  auto sensor_key = load_sensor_key(env.sensor_file(sensor), params.value());
  if (!sensor_key.ok()) {
    return usage_error(env, "IoError (missing sensor key file)");
  }
  auto accept = sensor_process_m2(suite, sensor_key.value(), m2.value(), now);
  if (!accept.ok()) return abort_verdict(env, accept.error());
  Bytes m3b = encode(params.value(), Message(accept.value().m3));
  *env.out << transcript_line("SN->U", m3b) << "\n";

  auto sk_user =
      user_process_m3(suite, start.value().session, accept.value().m3);
  if (!sk_user.ok()) return abort_verdict(env, sk_user.error());

  *env.out << "sk_user = " << to_hex(sk_user.value().k) << "\n";
  *env.out << "sk_sensor = " << to_hex(accept.value().sk.k) << "\n";
  if (!(sk_user.value() == accept.value().sk)) {
    return abort_verdict(env, Error::BadAuthenticator);
  }
  *env.out << "verdict = MATCH\n";
  return 0;
}

int cmd_pwd(const CliEnv& env, const std::string& user,
            const std::string& pw_old, const std::string& pw_new,
            bool interactive) {
  if (!valid_name(user)) return usage_error(env, Error::IdError);
  auto lock = DirLock::acquire(env.state_dir);
  if (!lock.ok()) return usage_error(env, "IoError (state directory locked)");

  auto params = load_env_params(env);
  if (!params.ok()) return usage_error(env, "IoError (run setup first)");
  Suite suite(params.value());
  const fs::path card_path = env.card_file(user);
  auto card = load_card(card_path, suite);
  if (!card.ok()) return usage_error(env, "IoError (unknown user card)");

  if (!interactive) {
    // Offline form: nothing can check pw_old here; a wrong value quietly
    // corrupts the record and later logins abort at the gateway.
    auto updated = pwd_update_offline(suite, card.value(), to_bytes(user),
                                      to_bytes(pw_old), to_bytes(pw_new));
    if (!updated.ok()) return usage_error(env, updated.error());
    if (auto r = save_card(card_path, suite, updated.value()); !r.ok()) {
      return usage_error(env, r.error());
    }
    *env.out << "card updated\n";
    *env.out << "verdict = OK\n";
    return 0;
  }

  auto gw = load_gateway_state(env.gateway_file());
  if (!gw.ok()) return usage_error(env, "IoError (run setup first)");

  auto rng = make_rng(env);
  const Timestamp now = current_time(env);
  auto start = pwd_update_start(suite, card.value(), to_bytes(user),
                                to_bytes(pw_old), now, *rng);
  if (!start.ok()) return usage_error(env, start.error());
  Bytes reqb = encode(params.value(), Message(start.value().request));
  *env.out << transcript_line("U->GW", reqb) << "\n";

  PwdUpdateOutcome outcome =
      gw_process_pwd_update(suite, gw.value(), start.value().request, now);
  Bytes respb = encode(params.value(), Message(outcome.response));
  *env.out << transcript_line("GW->U", respb) << "\n";

  auto updated = user_finish_pwd_update(suite, start.value().pending,
                                        outcome.response, to_bytes(pw_new));
  if (!updated.ok()) {
    const Error reason = outcome.reject_reason.value_or(updated.error());
    *env.out << "verdict = FAIL " << to_string(reason) << "\n";
    return 1;
  }
  if (auto r = save_card(card_path, suite, updated.value()); !r.ok()) {
    return usage_error(env, r.error());
  }
  *env.out << "card updated\n";
  *env.out << "verdict = OK\n";
  return 0;
}

std::vector<std::string> default_passwords() {
  std::vector<std::string> out;
  out.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "pw%04d", i);
    out.emplace_back(buf);
  }
  return out;
}

std::vector<std::string> default_identities() {
  std::vector<std::string> out;
  out.reserve(100);
  for (int i = 0; i < 100; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "id%03d", i);
    out.emplace_back(buf);
  }
  return out;
}

std::uint64_t pick_index(RandomSource& rng, std::size_t size) {
  Bytes draw = rng.bytes(8);
  return read_u64_be(draw.data()) % size;
}

int cmd_attack_jiang(const CliEnv& env, const std::string& dict_path,
                     const std::string& ids_path, unsigned workers) {
  CandidateSpace space;
  if (dict_path.empty()) {
    space.passwords = default_passwords();
  } else {
    auto lines = load_candidate_lines(dict_path);
    if (!lines.ok()) return usage_error(env, "IoError (dictionary file)");
    space.passwords = std::move(lines).value();
  }
  if (space.passwords.empty()) {
    return usage_error(env, "empty dictionary");
  }
  if (ids_path.empty()) {
    space.identities = default_identities();
  } else {
    auto lines = load_candidate_lines(ids_path);
    if (!lines.ok()) return usage_error(env, "IoError (identity file)");
    space.identities = std::move(lines).value();
  }
  if (space.identities.empty()) {
    return usage_error(env, "empty identity space");
  }

  Suite suite(SysParams{});
  auto rng = make_rng(env);

  // Plant a ground truth inside the space, then attack the recorded
  // material exactly as a card thief would.
  const std::string& truth_pw =
      space.passwords[pick_index(*rng, space.passwords.size())];
  const std::string& truth_id =
      space.identities[pick_index(*rng, space.identities.size())];

  const Timestamp t_base = VirtualClock::kDefaultBase;
  JiangCard card = jiang_register(
      suite, rng->bytes(32), to_bytes(truth_id), to_bytes(truth_pw),
      rng->bytes(16), rng->bytes(16), t_base + 86400 * 365);
  JiangLoginMsg msg = jiang_login(suite, card, to_bytes(truth_pw),
                                  to_bytes(truth_id), rng->bytes(32), t_base);

  const auto t0 = std::chrono::steady_clock::now();
  auto hit = jiang_dictionary_attack(suite, card, msg, space, workers);
  const auto t1 = std::chrono::steady_clock::now();
  const auto wall_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

  AttackReport report;
  report.pw_count = space.passwords.size();
  report.id_count = space.identities.size();
  if (!env.seed.has_value()) report.elapsed_ms = wall_ms;
  if (hit.ok()) {
    report.recovered = true;
    report.id = hit.value().id;
    report.pw = hit.value().pw;
    report.hash_count = hit.value().hash_count;
  } else {
    report.recovered = false;
    report.hash_count = static_cast<std::uint64_t>(space.passwords.size()) *
                        (2 + space.identities.size());
  }

  *env.out << format_attack_report(report);
  *env.err << "wall_ms = " << wall_ms << "\n";
  return report.recovered ? 0 : 1;
}

int cmd_audit(const CliEnv& env) {
  SessionAudit audit = audited_session(env.seed.value_or(1));
  *env.out << audit_report(audit);
  if (env.json) *env.out << audit_machine_report(audit);
  return audit_matches_expected(audit) ? 0 : 1;
}

int cmd_bench(const CliEnv& env) {
  Suite suite(SysParams{});
  SystemRandom rng;

  auto time_ns = [](auto&& fn, int iters) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < iters; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
               .count() /
           iters;
  };

  Scalar s = Scalar::random(rng);
  GroupElement g = suite.generator();
  Bytes msg = rng.bytes(96);
  SymKey key{rng.bytes(32)};

  *env.out << "scalar_mult_ns = "
           << time_ns([&] { suite.scalar_mult(s, g); }, 50) << "\n";
  *env.out << "hash_ns = "
           << time_ns([&] { suite.hash(HashDomain::H, msg); }, 2000) << "\n";
  *env.out << "mac_ns = "
           << time_ns([&] { suite.mac_generate(key, msg); }, 2000) << "\n";
  *env.out << "encrypt96_ns = "
           << time_ns([&] { suite.sym_encrypt(key, msg, rng); }, 2000)
           << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"anonymous two-factor key exchange for sensor networks"};
  app.name("wsnauth");
  app.require_subcommand(1);

  CliEnv env;
  env.out = &out;
  env.err = &err;

  std::string state_dir = "state";
  std::string params_path;
  std::uint64_t seed_value = 0;
  app.add_option("--state-dir", state_dir, "state directory");
  app.add_option("--params", params_path, "parameter file");
  auto* seed_opt = app.add_option("--seed", seed_value,
                                  "deterministic randomness seed");
  app.add_flag("--virtual-clock", env.virtual_clock,
               "fixed timestamp base instead of wall time");
  app.add_flag("--json", env.json, "also emit machine-readable lines");

  // setup
  auto* setup = app.add_subcommand("setup", "create gateway state");
  std::string gw_name = "gw";
  bool force = false;
  setup->add_option("--id-gw", gw_name, "gateway identity");
  setup->add_flag("--force", force, "overwrite existing state");

  // register
  auto* reg = app.add_subcommand("register", "register a user or sensor");
  std::string reg_kind, reg_name, reg_password;
  reg->add_option("kind", reg_kind, "user|sensor")->required();
  reg->add_option("name", reg_name, "identity")->required();
  reg->add_option("--password", reg_password, "user password");

  // session
  auto* session = app.add_subcommand("session", "run one login session");
  std::string s_user, s_password, s_sensor;
  session->add_option("--user", s_user)->required();
  session->add_option("--password", s_password)->required();
  session->add_option("--sensor", s_sensor)->required();

  // pwd
  auto* pwd = app.add_subcommand("pwd", "change a card password");
  std::string p_user, p_old, p_new;
  bool p_interactive = false;
  pwd->add_option("--user", p_user)->required();
  pwd->add_option("--old", p_old)->required();
  pwd->add_option("--new", p_new)->required();
  pwd->add_flag("--interactive", p_interactive,
                "confirm the old password with the gateway first");

  // attack-jiang
  auto* attack = app.add_subcommand(
      "attack-jiang", "offline dictionary attack on the reference scheme");
  std::string a_dict, a_ids;
  unsigned a_workers = 1;
  attack->add_option("--dict", a_dict, "password candidates, one per line");
  attack->add_option("--ids", a_ids, "identity candidates, one per line");
  attack->add_option("--workers", a_workers, "parallel workers");

  // audit
  auto* audit = app.add_subcommand("audit", "per-role operation counts");

  // bench
  auto* bench = app.add_subcommand("bench", "primitive timings");

  for (CLI::App* sc : {setup, reg, session, pwd, attack, audit, bench}) {
    sc->fallthrough();
  }

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("wsnauth");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  env.state_dir = state_dir;
  if (!params_path.empty()) env.params_path = params_path;
  if (seed_opt->count() > 0) env.seed = seed_value;

  try {
    if (setup->parsed()) return cmd_setup(env, gw_name, force);
    if (reg->parsed()) {
      if (reg_kind == "user") {
        if (reg_password.empty()) {
          return usage_error(env, "register user requires --password");
        }
        return cmd_register_user(env, reg_name, reg_password);
      }
      if (reg_kind == "sensor") return cmd_register_sensor(env, reg_name);
      return usage_error(env, "kind must be user or sensor");
    }
    if (session->parsed()) {
      return cmd_session(env, s_user, s_password, s_sensor);
    }
    if (pwd->parsed()) {
      return cmd_pwd(env, p_user, p_old, p_new, p_interactive);
    }
    if (attack->parsed()) {
      return cmd_attack_jiang(env, a_dict, a_ids, a_workers);
    }
    if (audit->parsed()) return cmd_audit(env);
    if (bench->parsed()) return cmd_bench(env);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return usage_error(env, "no command given");
}

}  // namespace wsnauth
