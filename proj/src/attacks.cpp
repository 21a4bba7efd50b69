#include "wsnauth/attacks.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

namespace wsnauth {

namespace {

Bytes ts_bytes(Timestamp t) {
  Bytes out;
  append_u64_be(out, static_cast<std::uint64_t>(t));
  return out;
}

Bytes legacy_hash(const Suite& suite, BytesView msg) {
  return suite.hash(HashDomain::Legacy, msg);
}

// The verifier the weakened control card stores.
Bytes pw_verifier(const Suite& suite, BytesView id_padded, BytesView pw) {
  return suite.hash(HashDomain::H, concat({id_padded, pw}));
}

struct WorkerHit {
  std::size_t pw_index = 0;
  std::string id;
  std::string pw;
};

}  // namespace

JiangCard jiang_register(const Suite& suite, BytesView mk, BytesView id,
                         BytesView pw, BytesView r, BytesView tid,
                         Timestamp te) {
  Bytes tc = legacy_hash(suite, concat({mk, id, ts_bytes(te)}));
  JiangCard card;
  card.tid.assign(tid.begin(), tid.end());
  card.te = te;
  card.ptc = xor_bytes(tc, legacy_hash(suite, concat({r, pw})));
  card.r.assign(r.begin(), r.end());
  return card;
}

JiangLoginMsg jiang_login(const Suite& suite, const JiangCard& card,
                          BytesView pw, BytesView id, BytesView k_u,
                          Timestamp t_u) {
  Bytes tc = xor_bytes(card.ptc, legacy_hash(suite, concat({card.r, pw})));
  JiangLoginMsg msg;
  msg.tid = card.tid;
  msg.t_u = t_u;
  msg.pks = xor_bytes(k_u, legacy_hash(suite, concat({tc, ts_bytes(t_u)})));
  msg.c_u = legacy_hash(suite, concat({id, k_u, tc, ts_bytes(t_u)}));
  return msg;
}

Result<DictAttackHit> jiang_dictionary_attack(const Suite& suite,
                                              const JiangCard& card,
                                              const JiangLoginMsg& msg,
                                              const CandidateSpace& space,
                                              unsigned workers) {
  const std::size_t n = space.passwords.size();
  if (n == 0 || space.identities.empty()) return Error::NotFound;
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n));

  const Bytes t_bytes = ts_bytes(msg.t_u);

  // Each worker settles its own password slice completely and records its
  // first hit, so the merged outcome is independent of scheduling.
  auto scan = [&](std::size_t begin, std::size_t end, std::uint64_t& hashes,
                  std::optional<WorkerHit>& hit) {
    for (std::size_t pi = begin; pi < end; ++pi) {
      const Bytes pw = to_bytes(space.passwords[pi]);
      Bytes tc = xor_bytes(card.ptc, legacy_hash(suite, concat({card.r, pw})));
      Bytes mask = legacy_hash(suite, concat({tc, t_bytes}));
      hashes += 2;
      Bytes k = xor_bytes(msg.pks, mask);
      for (const auto& id : space.identities) {
        Bytes probe =
            legacy_hash(suite, concat({to_bytes(id), k, tc, t_bytes}));
        hashes += 1;
        if (equal(probe, msg.c_u)) {
          hit = WorkerHit{pi, id, space.passwords[pi]};
          return;
        }
      }
    }
  };

  std::vector<std::uint64_t> counts(workers, 0);
  std::vector<std::optional<WorkerHit>> hits(workers);
  if (workers == 1) {
    scan(0, n, counts[0], hits[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min<std::size_t>(w * chunk, n);
      const std::size_t end = std::min<std::size_t>(begin + chunk, n);
      pool.emplace_back(scan, begin, end, std::ref(counts[w]),
                        std::ref(hits[w]));
    }
    for (auto& t : pool) t.join();
  }

  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  std::optional<WorkerHit> best;
  for (const auto& h : hits) {
    if (h.has_value() && (!best.has_value() || h->pw_index < best->pw_index)) {
      best = h;
    }
  }
  if (!best.has_value()) return Error::NotFound;
  return DictAttackHit{best->id, best->pw, total};
}

StolenCardView steal_card(const SmartCard& card) {
  StolenCardView view;
  view.xeid = card.xeid;
  view.y_pub = card.y_pub;
  view.id_gw = card.id_gw;
  return view;
}

Result<WeakenedCard> weakened_personalize(const Suite& suite,
                                          const CardPayload& payload,
                                          BytesView id_u_raw, BytesView pw) {
  auto card = card_personalize(suite, payload, id_u_raw, pw);
  if (!card.ok()) return card.error();
  auto id = pad_id(suite.params(), id_u_raw);
  if (!id.ok()) return id.error();
  return WeakenedCard{std::move(card).value(),
                      pw_verifier(suite, id.value(), pw)};
}

std::uint64_t offline_filter_survivors(const Suite& suite,
                                       const StolenCardView& view,
                                       const Transcript& transcript,
                                       const CandidateSpace& space,
                                       unsigned workers) {
  // Everything a passive thief can bring to bear: the card fields and any
  // recorded first message of a login run.
  std::optional<LoginM1> observed;
  for (const auto& e : transcript.entries) {
    auto msg = decode(suite.params(), e.bytes);
    if (msg.ok()) {
      if (auto* m1 = std::get_if<LoginM1>(&msg.value())) {
        observed = *m1;
        break;
      }
    }
  }

  const std::size_t n = space.passwords.size();
  if (n == 0 || space.identities.empty()) return 0;
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n));

  auto scan = [&](std::size_t begin, std::size_t end,
                  std::uint64_t& survivors) {
    for (std::size_t pi = begin; pi < end; ++pi) {
      const Bytes pw = to_bytes(space.passwords[pi]);
      for (const auto& id : space.identities) {
        auto padded = pad_id(suite.params(), to_bytes(id));
        if (!padded.ok()) continue;

        // Unmask the identity record under this candidate pair.
        Bytes pad =
            suite.hash(HashDomain::I, concat({padded.value(), pw}));
        Bytes eid_guess = xor_bytes(view.xeid, pad);
        (void)eid_guess;  // opaque without the gateway key z
        // The recorded message offers nothing either: c_u is keyed by an
        // unknowable link key and sigma_u likewise, so no predicate over
        // (eid_guess, observed) exists. Only a stored verifier can prune.
        (void)observed;

        bool survives = true;
        if (view.pw_verifier.has_value()) {
          survives =
              equal(pw_verifier(suite, padded.value(), pw), *view.pw_verifier);
        }
        if (survives) survivors += 1;
      }
    }
  };

  std::vector<std::uint64_t> counts(workers, 0);
  if (workers == 1) {
    scan(0, n, counts[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min<std::size_t>(w * chunk, n);
      const std::size_t end = std::min<std::size_t>(begin + chunk, n);
      pool.emplace_back(scan, begin, end, std::ref(counts[w]));
    }
    for (auto& t : pool) t.join();
  }

  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

std::vector<std::string> constant_m1_fields(const SysParams& params,
                                            const std::vector<Bytes>& m1s) {
  std::vector<LoginM1> decoded;
  for (const auto& raw : m1s) {
    auto msg = decode(params, raw);
    if (!msg.ok()) continue;
    if (auto* m1 = std::get_if<LoginM1>(&msg.value())) {
      decoded.push_back(*m1);
    }
  }
  std::vector<std::string> out;
  if (decoded.size() < 2) return out;

  bool t_u = true, id_sn = true, x = true, c_u = true, sigma = true;
  for (std::size_t i = 1; i < decoded.size(); ++i) {
    t_u &= decoded[i].t_u == decoded[0].t_u;
    id_sn &= decoded[i].id_sn == decoded[0].id_sn;
    x &= decoded[i].x == decoded[0].x;
    c_u &= decoded[i].c_u == decoded[0].c_u;
    sigma &= decoded[i].sigma_u == decoded[0].sigma_u;
  }
  if (t_u) out.push_back("t_u");
  if (id_sn) out.push_back("id_sn");
  if (x) out.push_back("x");
  if (c_u) out.push_back("c_u");
  if (sigma) out.push_back("sigma_u");
  return out;
}

Result<std::vector<std::string>> load_candidate_lines(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error::IoError;
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string format_attack_report(const AttackReport& r) {
  std::ostringstream os;
  os << "password_space = " << r.pw_count << "\n";
  os << "identity_space = " << r.id_count << "\n";
  os << "hash_count = " << r.hash_count << "\n";
  os << "elapsed_ms = ";
  if (r.elapsed_ms.has_value()) {
    os << *r.elapsed_ms;
  } else {
    os << "-";
  }
  os << "\n";
  if (r.recovered) {
    os << "verdict = recovered id=" << r.id << " pw=" << r.pw << "\n";
  } else {
    os << "verdict = not-found\n";
  }
  return os.str();
}

}  // namespace wsnauth
