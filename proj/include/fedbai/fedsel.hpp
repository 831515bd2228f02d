#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fedbai/codec.hpp"
#include "fedbai/instance.hpp"
#include "fedbai/local_elim.hpp"
#include "fedbai/transcript.hpp"

namespace fedbai {

struct FedSelParams {
  double c = 8.0;
  std::int64_t epoch_cap = 10'000'000;
  std::int64_t round_cap = 100'000;
  bool trace_means = false;
};

struct RunOutcome {
  ArmRef output_arm;
  bool correct = false;
  std::int64_t rounds = 0;  // R: number of Phase-II rounds, counting round 0
  std::vector<std::int64_t> phase1_pulls;   // per client
  std::vector<std::int64_t> phase2_pulls;   // per client
  std::vector<std::int64_t> rounds_active;  // per client: rounds spent in the active set
  std::int64_t total_bits = 0;
  std::int64_t uplink_bits = 0;
};

// Which entries survive interval elimination: those whose upper end strictly
// exceeds the largest lower end. `max_lower` receives that largest lower end.
std::vector<int> surviving_indices(const std::vector<double>& lower,
                                   const std::vector<double>& upper, double* max_lower);

// Confidence width used in Phase II: 2 * alpha(t + k*H).
double phase2_radius(const ElimParams& p, std::int64_t epochs, std::int64_t k, int H);

struct ServerState {
  std::int64_t round = 0;
  std::vector<int> active;           // ascending client ids
  std::vector<std::int64_t> epochs;  // per client, from the Phase-I report
  std::vector<int> arms;             // per client, from the Phase-I report
  std::vector<double> estimates;     // per client, latest decoded (uncoded at round 0)
  double threshold = 0.0;
};

struct RoundDecision {
  bool terminate = false;
  int survivor = -1;       // set when terminating
  double threshold = 0.0;  // largest lower end over the active clients
  std::vector<int> next_active;
};

// One server update. Throws EmptyActiveSet if no client survives (unreachable
// by construction; kept as an internal check).
RoundDecision server_round(ServerState& s, const std::vector<ElimParams>& params, int H);

struct FedSelClient {
  int id = 0;
  ElimParams params;
  LocalElimState state;
  LocalReport report;
  bool active = true;
  double sent_estimate = 0.0;  // what the server holds for this client
  std::int64_t phase2_pulls = 0;

  FedSelClient(int id, const ElimParams& p) : id(id), params(p), state(p.set_size) {}
};

// Pulls the client's arm H more times and returns the encoding of the new
// mean at precision bit_precision(alpha(t + (k+1)H)).
template <class Sampler>
QuantizedValue resample_and_encode(FedSelClient& c, std::int64_t k, int H, Sampler&& sample,
                                   MeanTrace* trace = nullptr);

// Phase-II client step for round k. If threshold < own upper end, pulls its
// arm H times and returns the encoded updated mean; otherwise deactivates.
template <class Sampler>
std::optional<QuantizedValue> client_round(FedSelClient& c, double threshold, std::int64_t k,
                                           int H, Sampler&& sample, MeanTrace* trace = nullptr);

struct FedSelResult {
  RunOutcome outcome;
  Transcript transcript;
  std::vector<LocalReport> reports;  // per client
};

// Phase I for every client; reports are logged in arrival order.
std::vector<LocalReport> phase1(const ProblemInstance& inst, const FedSelParams& params,
                                RewardStream& stream, std::vector<FedSelClient>& clients,
                                Transcript& transcript);

// Arrival order of Phase-I reports: by elapsed pulls epochs*|A_i|, then id.
std::vector<int> arrival_order(const std::vector<std::int64_t>& arrival_time);

std::string local_report_payload(const LocalReport& r);

// Requires one client per arm-set.
FedSelResult run_fedsel(const ProblemInstance& inst, const FedSelParams& params,
                        RewardStream& stream);

template <class Sampler>
std::optional<QuantizedValue> client_round(FedSelClient& c, double threshold, std::int64_t k,
                                           int H, Sampler&& sample, MeanTrace* trace) {
  if (!c.active) return std::nullopt;
  const double upper = c.sent_estimate + phase2_radius(c.params, c.report.epochs, k, H);
  if (!(threshold < upper)) {
    c.active = false;
    return std::nullopt;
  }
  return resample_and_encode(c, k, H, sample, trace);
}

template <class Sampler>
QuantizedValue resample_and_encode(FedSelClient& c, std::int64_t k, int H, Sampler&& sample,
                                   MeanTrace* trace) {
  for (int h = 0; h < H; ++h) c.state.record(c.report.arm, sample(c.report.arm), trace);
  c.phase2_pulls += H;
  const double a = alpha(c.params, static_cast<double>(c.report.epochs + (k + 1) * H));
  const QuantizedValue q = encode(c.state.means[c.report.arm], bit_precision(a));
  c.sent_estimate = decode(q);
  return q;
}

}  // namespace fedbai
