#include "fedbai/p2p.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedbai/errors.hpp"

namespace fedbai {

namespace {

constexpr double kIndexTolerance = 1e-9;

}  // namespace

std::string PreconditionReport::describe() const {
  std::string s;
  if (!f_local) s += "adversaries are not f-local; ";
  for (std::size_t j = 0; j < robust_per_group.size(); ++j)
    if (!robust_per_group[j])
      s += "graph is not strongly (3f+1)-robust w.r.t. group " + std::to_string(j) + "; ";
  if (!heterogeneity)
    s += "cross heterogeneity index " + format_real(max_cross_index) + " exceeds 1; ";
  if (s.empty()) return "all preconditions hold";
  s.resize(s.size() - 2);
  return s;
}

PreconditionReport check_p2p_preconditions(const ProblemInstance& inst, const DirectedGraph& g,
                                           const std::vector<int>& adversaries, int f) {
  for (int i = 0; i < inst.num_clients(); ++i)
    if (!g.has_vertex(i))
      throw Error(ErrorCode::GroupNotInGraph, "client " + std::to_string(i) + " is not in the graph");
  PreconditionReport r;
  r.f_local = verify_f_local(g, adversaries, f);
  r.robust = true;
  for (int j = 0; j < inst.num_sets(); ++j) {
    const bool ok = is_strongly_r_robust(g, inst.group(j), 3 * f + 1);
    r.robust_per_group.push_back(ok);
    r.robust = r.robust && ok;
  }
  const int b = inst.best_set();
  for (int j = 0; j < inst.num_sets(); ++j) {
    if (j == b) continue;
    r.max_cross_index = std::max({r.max_cross_index, heterogeneity_index(inst, b, j),
                                  heterogeneity_index(inst, j, b)});
  }
  r.heterogeneity = r.max_cross_index <= 1.0 + kIndexTolerance;
  return r;
}

RelayEntry relay_entry(const std::vector<PeerReport>& first, int f) {
  std::vector<int> arms;
  for (const auto& r : first) arms.push_back(r.arm);
  RelayEntry e;
  e.arm = majority_vote(arms);
  std::vector<double> vals;
  for (const auto& r : first)
    if (r.arm == e.arm) {
      e.agreeing.push_back(r.sender);
      vals.push_back(r.mean);
    }
  e.trim_param = f - static_cast<int>(first.size()) + static_cast<int>(e.agreeing.size());
  e.mean = trim(vals, std::max(0, e.trim_param));
  return e;
}

PeerState::PeerState(int client, int num_sets)
    : client(client),
      arm(num_sets, -1),
      mean(num_sets, 0.0),
      filled_at(num_sets, -1),
      buffer(num_sets),
      agreeing(num_sets),
      trim_param(num_sets, 0) {}

bool PeerState::complete() const {
  return std::all_of(filled_at.begin(), filled_at.end(), [](std::int64_t t) { return t >= 0; });
}

ArmRef finalize(const PeerState& s) {
  if (!s.complete())
    throw Error(ErrorCode::IncompleteVectors, "peer has unset entries", s.client);
  int best = 0;
  for (int l = 1; l < static_cast<int>(s.mean.size()); ++l)
    if (s.mean[l] > s.mean[best]) best = l;
  return {best, s.arm[best]};
}

namespace {

struct Envelope {
  int sender, receiver, set, arm;
  double mean;
};

std::string peer_payload(int set, int arm, double mean) {
  return "set=" + std::to_string(set) + ",arm=" + std::to_string(arm) + ",mean=" + format_real(mean);
}

}  // namespace

P2PResult run_p2p(const ProblemInstance& inst, const DirectedGraph& g, const AdversarySetup& adv,
                  const P2PParams& params, RewardStream& stream) {
  const int n = inst.num_clients();
  const int N = inst.num_sets();
  const int f = params.f;
  P2PResult res;
  res.preconditions = check_p2p_preconditions(inst, g, adv.clients, f);
  if (params.check_preconditions && !res.preconditions.ok())
    throw Error(ErrorCode::PreconditionViolated, res.preconditions.describe());

  res.transcript = Transcript(n, params.trace_means);
  Transcript& tr = res.transcript;
  std::vector<bool> byz(n, false);
  for (int a : adv.clients) byz.at(a) = true;

  std::vector<PeerState> peers;
  std::vector<ElimParams> ep;
  std::vector<LocalElimState> local;
  std::vector<std::vector<RewardStream::Substream*>> subs(n);
  for (int i = 0; i < n; ++i) {
    peers.emplace_back(i, N);
    ep.push_back(elim_params_for(inst, i, params.c, params.epoch_cap));
    local.emplace_back(ep.back().set_size);
    if (byz[i]) continue;
    if (MeanTrace* t = tr.trace_for(i)) t->assign(ep.back().set_size, {});
    for (int a = 0; a < ep.back().set_size; ++a)
      subs[i].push_back(&stream.substream(i, {inst.set_of(i), a}));
  }

  std::vector<Envelope> outbox;  // sent this tick, delivered next tick
  auto send_all = [&](std::int64_t tick, int sender, int set, int arm, double mean) {
    for (int v : g.out_neighbors(sender)) {
      outbox.push_back({sender, v, set, arm, mean});
      tr.log({tick, Direction::PeerToPeer, sender, v, PayloadKind::PeerReport, kPeerReportBits,
              peer_payload(set, arm, mean)});
    }
  };

  // Adversaries send everything at tick 0, possibly different per receiver.
  for (int i = 0; i < n; ++i) {
    if (!byz[i]) continue;
    for (int v : g.out_neighbors(i))
      for (int l = 0; l < N; ++l) {
        AdversaryContext ctx;
        ctx.phase = AttackPhase::PeerReport;
        ctx.client = i;
        ctx.set = l;
        ctx.receiver = v;
        ctx.inst = &inst;
        auto forged = act(adv.strategy, ctx, adv.seed);
        if (!forged) continue;
        outbox.push_back({i, v, l, forged->arm, forged->mean});
        tr.log({0, Direction::PeerToPeer, i, v, PayloadKind::PeerReport, kPeerReportBits,
                peer_payload(l, forged->arm, forged->mean)});
      }
  }

  int honest_left = 0;
  for (int i = 0; i < n; ++i) honest_left += byz[i] ? 0 : 1;
  std::vector<bool> finished(n, false);
  std::int64_t tick = 0;
  while (honest_left > 0) {
    ++tick;
    if (tick > params.tick_cap)
      throw Error(ErrorCode::TickCapExceeded,
                  "peers still incomplete after " + std::to_string(params.tick_cap) + " ticks");
    std::vector<Envelope> inbox;
    inbox.swap(outbox);
    std::stable_sort(inbox.begin(), inbox.end(), [](const Envelope& a, const Envelope& b) {
      return a.receiver != b.receiver ? a.receiver < b.receiver : a.sender < b.sender;
    });

    // Relay: first 2f+1 distinct reporters per foreign arm-set.
    const std::size_t need = static_cast<std::size_t>(2 * f + 1);
    for (const Envelope& m : inbox) {
      const int i = m.receiver;
      if (byz[i] || m.set == inst.set_of(i) || m.set < 0 || m.set >= N) continue;
      PeerState& p = peers[i];
      if (p.filled_at[m.set] >= 0) continue;
      auto& buf = p.buffer[m.set];
      if (std::any_of(buf.begin(), buf.end(), [&](const PeerReport& r) { return r.sender == m.sender; }))
        continue;
      const int arm = std::clamp(m.arm, 0, inst.set_size(m.set) - 1);
      buf.push_back({m.sender, arm, std::clamp(m.mean, 0.0, 1.0)});
      if (buf.size() < need) continue;
      RelayEntry e = relay_entry(buf, f);
      p.arm[m.set] = e.arm;
      p.mean[m.set] = e.mean;
      p.agreeing[m.set] = std::move(e.agreeing);
      p.trim_param[m.set] = e.trim_param;
      p.filled_at[m.set] = tick;
      send_all(tick, i, m.set, p.arm[m.set], p.mean[m.set]);
    }

    // Local elimination: one epoch per tick.
    for (int i = 0; i < n; ++i) {
      if (byz[i]) continue;
      LocalElimState& s = local[i];
      const int own = inst.set_of(i);
      if (!s.done()) {
        if (s.epoch >= params.epoch_cap)
          throw Error(ErrorCode::EpochCapExceeded, "local elimination hit the epoch cap", i);
        auto& sb = subs[i];
        run_epoch(s, ep[i], [&sb](int a) { return sb[a]->draw(); }, tr.trace_for(i));
        if (s.done()) {
          const LocalReport r = report_of(s);
          peers[i].arm[own] = r.arm;
          peers[i].mean[own] = r.mean_estimate;
          peers[i].filled_at[own] = tick;
          tr.phase1_pulls[i] = std::accumulate(s.pulls.begin(), s.pulls.end(), std::int64_t{0});
          send_all(tick, i, own, r.arm, r.mean_estimate);
        }
      }
    }

    bool local_pending = false;
    for (int i = 0; i < n; ++i) {
      if (byz[i]) continue;
      local_pending = local_pending || !local[i].done();
      if (!finished[i] && peers[i].complete()) {
        finished[i] = true;
        --honest_left;
      }
    }
    if (honest_left > 0 && outbox.empty() && !local_pending)
      throw Error(ErrorCode::TickCapExceeded,
                  "no messages in flight and some peers can never complete (stalled at tick " +
                      std::to_string(tick) + ")");
  }
  res.ticks = tick;

  res.outputs.assign(n, std::nullopt);
  int honest = 0, correct = 0;
  for (int i = 0; i < n; ++i) {
    if (byz[i]) continue;
    ++honest;
    res.outputs[i] = finalize(peers[i]);
    if (*res.outputs[i] == inst.best_arm()) ++correct;
  }
  res.honest_correct_fraction = honest ? static_cast<double>(correct) / honest : 0.0;
  res.all_honest_correct = correct == honest;

  for (int l = 0; l < N; ++l) {
    const double truth = inst.mean({l, inst.local_best(l)});
    const double slack = 0.375 * inst.local_gap(l);
    double lo = 1.0, hi = 0.0;
    for (int k : inst.group(l))
      if (!byz[k]) {
        lo = std::min(lo, peers[k].mean[l]);
        hi = std::max(hi, peers[k].mean[l]);
      }
    for (int i = 0; i < n; ++i) {
      if (byz[i]) continue;
      const double r = peers[i].mean[l];
      if (peers[i].arm[l] != inst.local_best(l) || std::fabs(r - truth) > slack)
        ++res.claim_violations;
      if (lo <= hi && (r < lo || r > hi)) ++res.hull_violations;
    }
  }
  res.peers = std::move(peers);
  return res;
}

}  // namespace fedbai
