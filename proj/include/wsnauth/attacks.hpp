#ifndef WSNAUTH_ATTACKS_HPP
#define WSNAUTH_ATTACKS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wsnauth/harness.hpp"
#include "wsnauth/roles.hpp"

namespace wsnauth {

// Reference model of the Jiang et al. scheme, kept only as an attack
// target. Its card stores PTC = H(mk | id | te) XOR H(r | pw) next to the
// salt r, which is exactly the structure the dictionary attack exploits.
struct JiangCard {
  Bytes tid;       // long-term pseudonym, static across logins
  Timestamp te = 0;
  Bytes ptc;       // masked temporal credential
  Bytes r;         // salt, stored in the clear
};

struct JiangLoginMsg {
  Bytes tid;
  Bytes c_u;       // H(id | k | tc | t_u)
  Bytes pks;       // k XOR H(tc | t_u)
  Timestamp t_u = 0;
};

JiangCard jiang_register(const Suite& suite, BytesView mk, BytesView id,
                         BytesView pw, BytesView r, BytesView tid,
                         Timestamp te);

JiangLoginMsg jiang_login(const Suite& suite, const JiangCard& card,
                          BytesView pw, BytesView id, BytesView k_u,
                          Timestamp t_u);

struct CandidateSpace {
  std::vector<std::string> passwords;
  std::vector<std::string> identities;
};

struct DictAttackHit {
  std::string id;
  std::string pw;
  std::uint64_t hash_count = 0;
};

// Offline dictionary search over a stolen Jiang card plus one recorded
// login message. Cost is at most |passwords| * (2 + |identities|) hashes.
// workers > 1 partitions the password range; each worker settles its own
// partition, so the merged result and count are scheduling-independent.
Result<DictAttackHit> jiang_dictionary_attack(const Suite& suite,
                                              const JiangCard& card,
                                              const JiangLoginMsg& msg,
                                              const CandidateSpace& space,
                                              unsigned workers = 1);

// What a thief holds after corrupt_sc: the card image fields, plus an
// optional password verifier for the deliberately weakened variant used
// as an experimental control.
struct StolenCardView {
  Bytes xeid;
  GroupElement y_pub;
  Bytes id_gw;
  std::optional<Bytes> pw_verifier;  // hash(H, id | pw) when present
};

StolenCardView steal_card(const SmartCard& card);

// Control arm: same card plus the verifier this scheme refuses to store.
struct WeakenedCard {
  SmartCard card;
  Bytes pw_verifier;
};

Result<WeakenedCard> weakened_personalize(const Suite& suite,
                                          const CardPayload& payload,
                                          BytesView id_u_raw, BytesView pw);

// Runs the same unmask-and-test loop an offline attacker would: for each
// candidate pair, strip the pad from xeid and apply every predicate the
// stolen material supports. Without a verifier no predicate can
// distinguish candidates, so all of them survive.
std::uint64_t offline_filter_survivors(const Suite& suite,
                                       const StolenCardView& view,
                                       const Transcript& transcript,
                                       const CandidateSpace& space,
                                       unsigned workers = 1);

// Field values that repeat across every M1 in the given transcripts.
// User-identifying linkage shows up here; for this scheme only the fixed
// sensor address may repeat.
std::vector<std::string> constant_m1_fields(const SysParams& params,
                                            const std::vector<Bytes>& m1s);

Result<std::vector<std::string>> load_candidate_lines(const std::string& path);

struct AttackReport {
  std::size_t pw_count = 0;
  std::size_t id_count = 0;
  std::uint64_t hash_count = 0;
  std::optional<std::int64_t> elapsed_ms;  // omitted under seeded runs
  bool recovered = false;
  std::string id;
  std::string pw;
};

std::string format_attack_report(const AttackReport& r);

}  // namespace wsnauth

#endif
