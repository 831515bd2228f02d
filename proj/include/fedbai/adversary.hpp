#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fedbai/instance.hpp"
#include "fedbai/local_elim.hpp"

namespace fedbai {

enum class AdversaryKind { Silent, WrongArmCollusion, InflateMean, DeflateMean, RandomGarbage };

struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::Silent;
  double amount = 0.2;  // InflateMean / DeflateMean offset
  int target = -1;      // WrongArmCollusion arm index; -1 picks the set's worst arm

  // "silent", "wrong-arm[:idx]", "inflate[:x]", "deflate[:x]", "random".
  static AdversaryStrategy parse(const std::string& spec);
  std::string name() const;
  // Whether the attacker needs an honest run of its own to perturb.
  bool needs_shadow() const;
};

enum class AttackPhase {
  LocalReport,  // Phase-I report to the server
  Estimate,     // Phase-II mean estimate to the server
  PeerReport,   // peer-to-peer report about one arm-set
};

struct AdversaryContext {
  AttackPhase phase = AttackPhase::LocalReport;
  std::int64_t round = 0;
  int client = 0;
  int set = 0;          // arm-set the message is about
  int receiver = -1;    // peer-to-peer receiver, -1 otherwise
  const ProblemInstance* inst = nullptr;
  // Honest shadow: what this client would have sent if honest.
  std::optional<LocalReport> shadow;
  std::int64_t shadow_arrival = 0;
  double shadow_estimate = 0.0;
};

// A forged message. For Estimate only `mean` is used.
struct Forgery {
  int arm = 0;
  double mean = 0.0;          // always within [0,1]
  std::int64_t epochs = 1;    // claimed local epoch count, >= 1
  std::int64_t arrival = 0;   // Phase-I arrival time, or send tick
};

// Pure function of (strategy, context, seed). Nullopt means no message.
std::optional<Forgery> act(const AdversaryStrategy& s, const AdversaryContext& ctx,
                           std::uint64_t seed);

}  // namespace fedbai
