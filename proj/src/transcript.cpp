#include "fedbai/transcript.hpp"

#include <charconv>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fedbai/errors.hpp"

namespace fedbai {

using nlohmann::json;

const char* to_string(Direction d) {
  switch (d) {
    case Direction::ClientToServer: return "ClientToServer";
    case Direction::ServerToClient: return "ServerToClient";
    case Direction::PeerToPeer: return "PeerToPeer";
  }
  return "?";
}

const char* to_string(PayloadKind k) {
  switch (k) {
    case PayloadKind::LocalReport: return "LocalReport";
    case PayloadKind::QuantizedValue: return "QuantizedValue";
    case PayloadKind::Threshold: return "Threshold";
    case PayloadKind::ActiveVector: return "ActiveVector";
    case PayloadKind::PeerReport: return "PeerReport";
  }
  return "?";
}

namespace {

Direction parse_direction(const std::string& s) {
  for (auto d : {Direction::ClientToServer, Direction::ServerToClient, Direction::PeerToPeer})
    if (s == to_string(d)) return d;
  throw Error(ErrorCode::Io, "unknown direction '" + s + "'");
}

PayloadKind parse_kind(const std::string& s) {
  for (auto k : {PayloadKind::LocalReport, PayloadKind::QuantizedValue, PayloadKind::Threshold,
                 PayloadKind::ActiveVector, PayloadKind::PeerReport})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::Io, "unknown payload kind '" + s + "'");
}

json endpoint_json(int id) {
  if (id == kServer) return "server";
  if (id == kBroadcast) return "broadcast";
  return id;
}

int endpoint_from_json(const json& j) {
  if (j.is_number_integer()) return j.get<int>();
  const auto s = j.get<std::string>();
  if (s == "server") return kServer;
  if (s == "broadcast") return kBroadcast;
  throw Error(ErrorCode::Io, "unknown endpoint '" + s + "'");
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Transcript::Transcript(int num_clients, bool trace_means)
    : phase1_pulls(num_clients, 0),
      phase2_pulls(num_clients, 0),
      traced(trace_means),
      traces(trace_means ? num_clients : 0) {}

std::int64_t Transcript::total_bits() const {
  std::int64_t b = 0;
  for (const auto& m : messages) b += m.bits;
  return b;
}

std::int64_t Transcript::uplink_bits() const {
  std::int64_t b = 0;
  for (const auto& m : messages)
    if (m.direction != Direction::ServerToClient) b += m.bits;
  return b;
}

std::int64_t Transcript::total_phase1_pulls() const {
  return std::accumulate(phase1_pulls.begin(), phase1_pulls.end(), std::int64_t{0});
}

std::int64_t Transcript::total_phase2_pulls() const {
  return std::accumulate(phase2_pulls.begin(), phase2_pulls.end(), std::int64_t{0});
}

std::string Transcript::to_ndjson() const {
  std::string out;
  for (const auto& m : messages) {
    json j = {{"record", "message"},
              {"round", m.round},
              {"direction", to_string(m.direction)},
              {"sender", endpoint_json(m.sender)},
              {"receiver", endpoint_json(m.receiver)},
              {"payload_kind", to_string(m.payload_kind)},
              {"bits", m.bits},
              {"payload", m.payload}};
    out += j.dump();
    out += '\n';
  }
  for (std::size_t i = 0; i < phase1_pulls.size(); ++i) {
    json j = {{"record", "pulls"},
              {"client", i},
              {"phase1", phase1_pulls[i]},
              {"phase2", phase2_pulls[i]}};
    out += j.dump();
    out += '\n';
  }
  if (traced) {
    for (std::size_t i = 0; i < traces.size(); ++i)
      for (std::size_t a = 0; a < traces[i].size(); ++a) {
        json j = {{"record", "mean_trace"}, {"client", i}, {"arm", a}, {"means", traces[i][a]}};
        out += j.dump();
        out += '\n';
      }
  }
  return out;
}

Transcript Transcript::from_ndjson(const std::string& text) {
  Transcript t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto grow = [&](std::size_t client) {
    if (t.phase1_pulls.size() <= client) {
      t.phase1_pulls.resize(client + 1, 0);
      t.phase2_pulls.resize(client + 1, 0);
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const auto rec = j.at("record").get<std::string>();
      if (rec == "message") {
        Message m;
        m.round = j.at("round").get<std::int64_t>();
        m.direction = parse_direction(j.at("direction").get<std::string>());
        m.sender = endpoint_from_json(j.at("sender"));
        m.receiver = endpoint_from_json(j.at("receiver"));
        m.payload_kind = parse_kind(j.at("payload_kind").get<std::string>());
        m.bits = j.at("bits").get<int>();
        m.payload = j.value("payload", std::string{});
        t.messages.push_back(std::move(m));
      } else if (rec == "pulls") {
        const auto c = j.at("client").get<std::size_t>();
        grow(c);
        t.phase1_pulls[c] = j.at("phase1").get<std::int64_t>();
        t.phase2_pulls[c] = j.at("phase2").get<std::int64_t>();
      } else if (rec == "mean_trace") {
        const auto c = j.at("client").get<std::size_t>();
        const auto a = j.at("arm").get<std::size_t>();
        t.traced = true;
        if (t.traces.size() <= c) t.traces.resize(c + 1);
        if (t.traces[c].size() <= a) t.traces[c].resize(a + 1);
        t.traces[c][a] = j.at("means").get<std::vector<double>>();
      } else {
        throw Error(ErrorCode::Io, "unknown record type '" + rec + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Io, "transcript line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (t.traced && t.traces.size() < t.phase1_pulls.size()) t.traces.resize(t.phase1_pulls.size());
  return t;
}

bool operator==(const Transcript& a, const Transcript& b) {
  return a.messages == b.messages && a.phase1_pulls == b.phase1_pulls &&
         a.phase2_pulls == b.phase2_pulls && a.traced == b.traced && a.traces == b.traces;
}

}  // namespace fedbai
