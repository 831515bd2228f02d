#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedbai/local_elim.hpp"

namespace fedbai {

enum class Direction { ClientToServer, ServerToClient, PeerToPeer };

enum class PayloadKind { LocalReport, QuantizedValue, Threshold, ActiveVector, PeerReport };

const char* to_string(Direction d);
const char* to_string(PayloadKind k);

// Pseudo endpoint ids. Non-negative ids are clients.
inline constexpr int kServer = -1;
inline constexpr int kBroadcast = -2;

// Bit costs of the uncoded payloads.
inline constexpr int kLocalReportBits = 128;  // 64-bit mean, 32-bit epoch count, 32-bit arm id
inline constexpr int kThresholdBits = 64;
inline constexpr int kPeerReportBits = 96;  // 64-bit mean, 32-bit arm id

std::string format_real(double v);  // shortest round-trip representation

struct Message {
  std::int64_t round = 0;  // protocol round, or tick in the peer-to-peer protocol
  Direction direction = Direction::ClientToServer;
  int sender = 0;
  int receiver = kServer;
  PayloadKind payload_kind = PayloadKind::LocalReport;
  int bits = 0;
  std::string payload;

  friend bool operator==(const Message&, const Message&) = default;
};

// Ordered message log plus per-client pull counters and, optionally, every
// empirical mean each client computed.
struct Transcript {
  std::vector<Message> messages;
  std::vector<std::int64_t> phase1_pulls;  // per client
  std::vector<std::int64_t> phase2_pulls;  // per client
  bool traced = false;
  // traces[client][arm] (client rows are empty for clients that never sampled).
  std::vector<MeanTrace> traces;

  explicit Transcript(int num_clients = 0, bool trace_means = false);

  void log(Message m) { messages.push_back(std::move(m)); }
  MeanTrace* trace_for(int client) { return traced ? &traces.at(client) : nullptr; }

  std::int64_t total_bits() const;
  std::int64_t uplink_bits() const;  // client-to-server and peer-to-peer
  std::int64_t total_phase1_pulls() const;
  std::int64_t total_phase2_pulls() const;

  // NDJSON. Messages first, then one "pulls" record per client, then
  // "mean_trace" records when traced.
  std::string to_ndjson() const;
  static Transcript from_ndjson(const std::string& text);
};

bool operator==(const Transcript& a, const Transcript& b);

}  // namespace fedbai
