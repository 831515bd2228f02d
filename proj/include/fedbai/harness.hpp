#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedbai/instance.hpp"
#include "fedbai/transcript.hpp"

namespace fedbai {

struct AuditResult {
  bool held = true;
  std::int64_t entries = 0;     // (client, arm, t) triples checked
  std::int64_t violations = 0;  // entries with |mean - r| > alpha(t)
};

// Checks |mean_t - r| <= alpha(t) for every traced empirical mean. Throws
// InsufficientTrace when the transcript kept no traces.
AuditResult audit_means(const Transcript& t, const ProblemInstance& inst);
bool audit_good_event(const Transcript& t, const ProblemInstance& inst);

enum class Protocol { FedSel, RobustFedSel, P2P };

const char* to_string(Protocol p);
Protocol parse_protocol(const std::string& s);  // "fedsel", "robust", "p2p"

struct ExperimentConfig {
  Protocol protocol = Protocol::FedSel;
  std::string instance_file;           // empty: built-in target-detection instance
  std::vector<double> sigmas{1.0};     // ignored when instance_file is set
  std::vector<int> comm_periods{20};
  double delta = 0.1;                  // built-in instance only
  int clients_per_group = 1;
  int f = 0;
  std::string adversary = "silent";
  // Byzantine clients. Empty: the first f clients of every group (robust), or
  // clients 0..f-1 (peer-to-peer).
  std::vector<int> adversaries;
  std::string graph_file;              // peer-to-peer; empty: complete graph
  bool override_preconditions = false;
  double c = 0.0;                      // 0: 8 for the federated protocols, 6 for p2p
  int trials = 50;
  std::uint64_t seed = 1;
  int threads = 1;
  bool trace_means = false;            // needed for good-event columns
  std::string out_dir;                 // empty: nothing is written
  bool write_transcripts = false;

  void validate() const;  // throws InvalidConfig
};

struct MetricsRow {
  std::string protocol;
  std::optional<double> sigma;
  int H = 0;
  int f = 0;
  std::string adversary;
  int trial = 0;
  std::uint64_t seed = 0;
  bool correct = false;
  std::int64_t rounds = 0;
  std::int64_t phase1_pulls = 0;
  std::int64_t phase2_pulls = 0;
  std::int64_t total_bits = 0;
  std::int64_t uplink_bits = 0;
  int good_event_held = -1;         // -1 when not audited
  int groups_correctly_voted = -1;  // robust only
  int rounds_within_bound = -1;     // federated protocols only
  std::int64_t max_client_rounds = 0;
  double honest_correct_fraction = -1.0;  // p2p only
  std::int64_t claim_violations = -1;     // p2p only
  std::int64_t hull_violations = -1;      // robust and p2p
  std::string error;                // error code if the trial aborted
};

struct SummaryRow {
  std::string protocol;
  std::optional<double> sigma;
  int H = 0;
  int f = 0;
  std::string adversary;
  int trials = 0;
  double correct_rate = 0.0;
  double rounds_mean = 0.0, rounds_se = 0.0;
  double phase1_mean = 0.0, phase1_se = 0.0;
  double phase2_mean = 0.0, phase2_se = 0.0;
  double bits_mean = 0.0;
  double good_event_rate = -1.0;
  int errors = 0;
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;       // ordered by (sigma, H, trial)
  std::vector<SummaryRow> summary;    // one per sweep point
};

// Seed of one trial: a hash of the base seed, the sweep point and the trial
// index (the protocol is not part of it, so protocols share randomness).
std::uint64_t trial_seed(std::uint64_t base, std::optional<double> sigma, int H, int trial);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string metrics_csv_header();
std::string to_csv_line(const MetricsRow& r);
std::string summary_csv_header();
std::string to_csv_line(const SummaryRow& r);

double mean_of(const std::vector<double>& v);
double standard_error(const std::vector<double>& v);

}  // namespace fedbai
