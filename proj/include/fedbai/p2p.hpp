#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedbai/adversary.hpp"
#include "fedbai/instance.hpp"
#include "fedbai/network.hpp"
#include "fedbai/robust_fedsel.hpp"
#include "fedbai/transcript.hpp"

namespace fedbai {

struct P2PParams {
  double c = 6.0;
  int f = 0;
  std::int64_t epoch_cap = 10'000'000;
  std::int64_t tick_cap = 20'000'000;
  bool check_preconditions = true;  // false runs even when a check fails
  bool trace_means = false;
};

struct PreconditionReport {
  bool f_local = false;
  std::vector<bool> robust_per_group;  // strongly (3f+1)-robust w.r.t. each group
  bool robust = false;
  double max_cross_index = 0.0;  // max over sets j != best of the two cross indices
  bool heterogeneity = false;    // max_cross_index <= 1

  bool ok() const { return f_local && robust && heterogeneity; }
  std::string describe() const;
};

PreconditionReport check_p2p_preconditions(const ProblemInstance& inst, const DirectedGraph& g,
                                           const std::vector<int>& adversaries, int f);

// One report about an arm-set as received by a peer.
struct PeerReport {
  int sender = 0;
  int arm = 0;
  double mean = 0.0;
};

struct RelayEntry {
  int arm = 0;
  double mean = 0.0;
  std::vector<int> agreeing;  // senders that reported the voted arm
  int trim_param = 0;
};

// Vote and trim over the first 2f+1 reports about one arm-set. Throws
// NoMajority.
RelayEntry relay_entry(const std::vector<PeerReport>& first, int f);

struct PeerState {
  int client = 0;
  std::vector<int> arm;        // I_i, -1 while unset
  std::vector<double> mean;    // R_i
  std::vector<std::int64_t> filled_at;  // tick each entry was written, -1 while unset
  std::vector<std::vector<PeerReport>> buffer;  // first reporters per arm-set
  std::vector<std::vector<int>> agreeing;
  std::vector<int> trim_param;

  PeerState(int client, int num_sets);
  bool complete() const;
};

// Arm of the entry with the largest estimate (lowest set index on ties).
// Throws IncompleteVectors if an entry is unset.
ArmRef finalize(const PeerState& s);

struct P2PResult {
  PreconditionReport preconditions;
  std::vector<std::optional<ArmRef>> outputs;  // per client; empty for adversaries
  std::vector<PeerState> peers;
  Transcript transcript;
  std::int64_t ticks = 0;
  double honest_correct_fraction = 0.0;
  bool all_honest_correct = false;
  // Honest entries with a wrong arm or |R - r_best| > 3/8 of the set's gap.
  std::int64_t claim_violations = 0;
  // Honest entries outside the range of group members' own estimates.
  std::int64_t hull_violations = 0;
};

P2PResult run_p2p(const ProblemInstance& inst, const DirectedGraph& g, const AdversarySetup& adv,
                  const P2PParams& params, RewardStream& stream);

}  // namespace fedbai
