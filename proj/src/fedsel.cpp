#include "fedbai/fedsel.hpp"

#include <algorithm>
#include <numeric>

#include "fedbai/errors.hpp"

namespace fedbai {

std::vector<int> surviving_indices(const std::vector<double>& lower,
                                   const std::vector<double>& upper, double* max_lower) {
  double top = lower.empty() ? 0.0 : lower.front();
  for (double l : lower) top = std::max(top, l);
  std::vector<int> keep;
  for (std::size_t i = 0; i < upper.size(); ++i)
    if (top < upper[i]) keep.push_back(static_cast<int>(i));
  if (max_lower) *max_lower = top;
  return keep;
}

double phase2_radius(const ElimParams& p, std::int64_t epochs, std::int64_t k, int H) {
  return 2.0 * alpha(p, static_cast<double>(epochs + k * H));
}

RoundDecision server_round(ServerState& s, const std::vector<ElimParams>& params, int H) {
  RoundDecision d;
  if (s.active.empty()) throw Error(ErrorCode::EmptyActiveSet, "no active clients at round entry");
  std::vector<double> lower, upper;
  for (int i : s.active) {
    const double r = phase2_radius(params.at(i), s.epochs.at(i), s.round, H);
    lower.push_back(s.estimates.at(i) - r);
    upper.push_back(s.estimates.at(i) + r);
  }
  for (int idx : surviving_indices(lower, upper, &d.threshold))
    d.next_active.push_back(s.active[idx]);
  if (d.next_active.empty())
    throw Error(ErrorCode::EmptyActiveSet, "interval elimination removed every client");
  s.threshold = d.threshold;
  if (d.next_active.size() == 1) {
    d.terminate = true;
    d.survivor = d.next_active.front();
  }
  return d;
}

std::vector<int> arrival_order(const std::vector<std::int64_t>& arrival_time) {
  std::vector<int> order(arrival_time.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return arrival_time[a] < arrival_time[b]; });
  return order;
}

std::string local_report_payload(const LocalReport& r) {
  return "arm=" + std::to_string(r.arm) + ",mean=" + format_real(r.mean_estimate) +
         ",epochs=" + std::to_string(r.epochs);
}

std::vector<LocalReport> phase1(const ProblemInstance& inst, const FedSelParams& params,
                                RewardStream& stream, std::vector<FedSelClient>& clients,
                                Transcript& transcript) {
  const int n = inst.num_clients();
  std::vector<LocalReport> reports(n);
  std::vector<std::int64_t> arrival(n);
  for (int i = 0; i < n; ++i) {
    clients.emplace_back(i, elim_params_for(inst, i, params.c, params.epoch_cap));
    FedSelClient& c = clients.back();
    MeanTrace* tr = transcript.trace_for(i);
    if (tr) tr->assign(c.params.set_size, {});
    c.report = run_to_termination(c.state, c.params, stream, i, tr);
    c.sent_estimate = c.report.mean_estimate;
    reports[i] = c.report;
    transcript.phase1_pulls[i] =
        std::accumulate(c.state.pulls.begin(), c.state.pulls.end(), std::int64_t{0});
    arrival[i] = c.report.epochs * c.params.set_size;
  }
  for (int i : arrival_order(arrival))
    transcript.log({0, Direction::ClientToServer, i, kServer, PayloadKind::LocalReport,
                    kLocalReportBits, local_report_payload(reports[i])});
  return reports;
}

FedSelResult run_fedsel(const ProblemInstance& inst, const FedSelParams& params,
                        RewardStream& stream) {
  if (!inst.singleton_groups())
    throw Error(ErrorCode::PreconditionViolated, "Fed-SEL needs exactly one client per arm-set");
  const int n = inst.num_clients();
  const int H = inst.comm_period();
  FedSelResult res;
  res.transcript = Transcript(n, params.trace_means);
  Transcript& tr = res.transcript;

  std::vector<FedSelClient> clients;
  clients.reserve(n);
  res.reports = phase1(inst, params, stream, clients, tr);

  ServerState server;
  std::vector<ElimParams> ep;
  for (const auto& c : clients) {
    ep.push_back(c.params);
    server.epochs.push_back(c.report.epochs);
    server.arms.push_back(c.report.arm);
    server.estimates.push_back(c.report.mean_estimate);
  }
  server.active.resize(n);
  std::iota(server.active.begin(), server.active.end(), 0);

  std::vector<std::vector<RewardStream::Substream*>> subs(n);
  for (int i = 0; i < n; ++i) {
    const int set = inst.set_of(i);
    subs[i].push_back(&stream.substream(i, {set, clients[i].report.arm}));
  }

  std::vector<std::int64_t> rounds_active(n, 0);
  int winner = -1;
  for (;;) {
    const std::int64_t k = server.round;
    if (k >= params.round_cap)
      throw Error(ErrorCode::RoundCapExceeded,
                  "no decision after " + std::to_string(params.round_cap) + " rounds");
    for (int i : server.active) ++rounds_active[i];
    RoundDecision d = server_round(server, ep, H);
    if (d.terminate) {
      winner = d.survivor;
      break;
    }
    tr.log({k, Direction::ServerToClient, kServer, kBroadcast, PayloadKind::Threshold,
            kThresholdBits, format_real(d.threshold)});
    std::vector<int> senders;
    for (int i : server.active) {
      auto* s = subs[i].front();
      auto q = client_round(clients[i], d.threshold, k, H, [s](int) { return s->draw(); },
                            tr.trace_for(i));
      if (!q) continue;
      senders.push_back(i);
      server.estimates[i] = decode(*q);
      tr.log({k + 1, Direction::ClientToServer, i, kServer, PayloadKind::QuantizedValue, q->bits,
              to_bitstring(*q)});
    }
    if (senders != d.next_active)
      throw Error(ErrorCode::Internal, "client and server disagree on the active set");
    server.active = std::move(d.next_active);
    server.round = k + 1;
  }

  RunOutcome& out = res.outcome;
  out.output_arm = {inst.set_of(winner), clients[winner].report.arm};
  out.correct = out.output_arm == inst.best_arm();
  out.rounds = server.round + 1;
  out.rounds_active = rounds_active;
  for (int i = 0; i < n; ++i) tr.phase2_pulls[i] = clients[i].phase2_pulls;
  out.phase1_pulls = tr.phase1_pulls;
  out.phase2_pulls = tr.phase2_pulls;
  out.total_bits = tr.total_bits();
  out.uplink_bits = tr.uplink_bits();
  return res;
}

}  // namespace fedbai
