#include "fedbai/robust_fedsel.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>

#include "fedbai/errors.hpp"

namespace fedbai {

int majority_vote(std::span<const int> arms) {
  std::map<int, std::size_t> counts;
  for (int a : arms) ++counts[a];
  for (const auto& [arm, n] : counts)
    if (2 * n > arms.size()) return arm;
  throw Error(ErrorCode::NoMajority, "no arm reported by a strict majority of " +
                                         std::to_string(arms.size()) + " reporters");
}

double trim(std::vector<double> values, int e) {
  if (e < 0 || values.size() < static_cast<std::size_t>(2 * e + 1))
    throw Error(ErrorCode::TooFewValues, "trim(" + std::to_string(e) + ") needs at least " +
                                             std::to_string(2 * e + 1) + " values, got " +
                                             std::to_string(values.size()));
  std::sort(values.begin(), values.end());
  const std::size_t lo = static_cast<std::size_t>(e);
  const std::size_t m = values.size() - 2 * lo;
  const std::size_t mid = lo + m / 2;
  return m % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

bool AdversarySetup::contains(int client) const {
  return std::find(clients.begin(), clients.end(), client) != clients.end();
}

bool HullCheck::contained() const {
  return honest_upper_min <= upper && upper <= honest_upper_max && honest_lower_min <= lower &&
         lower <= honest_lower_max;
}

void check_robust_preconditions(const ProblemInstance& inst, int f, const AdversarySetup& adv) {
  if (f < 0) throw Error(ErrorCode::PreconditionViolated, "f must be nonnegative");
  for (int c : adv.clients)
    if (c < 0 || c >= inst.num_clients())
      throw Error(ErrorCode::PreconditionViolated, "adversary id out of range", c);
  for (int j = 0; j < inst.num_sets(); ++j) {
    const auto& g = inst.group(j);
    if (static_cast<int>(g.size()) < 3 * f + 1)
      throw Error(ErrorCode::PreconditionViolated,
                  "group " + std::to_string(j) + " has fewer than 3f+1 clients");
    const auto bad = std::count_if(g.begin(), g.end(), [&](int c) { return adv.contains(c); });
    if (bad > f)
      throw Error(ErrorCode::PreconditionViolated,
                  "group " + std::to_string(j) + " has more than f adversaries");
  }
}

namespace {

struct Report {
  int arm = 0;
  double mean = 0.0;
  std::int64_t epochs = 1;
  std::int64_t arrival = 0;
};

}  // namespace

RobustResult run_robust_fedsel(const ProblemInstance& inst, const RobustParams& params,
                               const AdversarySetup& adv, RewardStream& stream) {
  check_robust_preconditions(inst, params.f, adv);
  const int n = inst.num_clients();
  const int N = inst.num_sets();
  const int H = inst.comm_period();
  const int f = params.f;
  // With f = 0 and one client per group the protocol coincides with Fed-SEL;
  // the server then sends the Fed-SEL threshold instead of the group vector.
  const bool plain = f == 0 && inst.singleton_groups();

  RobustResult res;
  res.transcript = Transcript(n, params.trace_means);
  Transcript& tr = res.transcript;

  // Phase I. Adversaries that perturb honest values run a shadow client.
  std::vector<FedSelClient> clients;
  clients.reserve(n);
  std::vector<std::optional<Report>> reports(n);
  std::vector<bool> byz(n, false);
  for (int i = 0; i < n; ++i) {
    byz[i] = adv.contains(i);
    clients.emplace_back(i, elim_params_for(inst, i, params.c, params.epoch_cap));
    FedSelClient& c = clients.back();
    const int set = inst.set_of(i);
    if (!byz[i] || adv.strategy.needs_shadow()) {
      MeanTrace* trace = byz[i] ? nullptr : tr.trace_for(i);
      if (trace) trace->assign(c.params.set_size, {});
      c.report = run_to_termination(c.state, c.params, stream, i, trace);
      c.sent_estimate = c.report.mean_estimate;
    }
    if (!byz[i]) {
      tr.phase1_pulls[i] =
          std::accumulate(c.state.pulls.begin(), c.state.pulls.end(), std::int64_t{0});
      reports[i] = Report{c.report.arm, c.report.mean_estimate, c.report.epochs,
                          c.report.epochs * c.params.set_size};
      continue;
    }
    AdversaryContext ctx;
    ctx.phase = AttackPhase::LocalReport;
    ctx.client = i;
    ctx.set = set;
    ctx.inst = &inst;
    if (adv.strategy.needs_shadow()) {
      ctx.shadow = c.report;
      ctx.shadow_arrival = c.report.epochs * c.params.set_size;
    }
    if (auto forged = act(adv.strategy, ctx, adv.seed))
      reports[i] = Report{forged->arm, forged->mean, std::max<std::int64_t>(1, forged->epochs),
                          forged->arrival};
  }

  {
    std::vector<int> senders;
    for (int i = 0; i < n; ++i)
      if (reports[i]) senders.push_back(i);
    std::stable_sort(senders.begin(), senders.end(),
                     [&](int a, int b) { return reports[a]->arrival < reports[b]->arrival; });
    for (int i : senders)
      tr.log({0, Direction::ClientToServer, i, kServer, PayloadKind::LocalReport,
              kLocalReportBits,
              local_report_payload({reports[i]->arm, reports[i]->mean, reports[i]->epochs})});
  }

  // Representative arms and trimming parameters.
  std::vector<GroupState> groups(N);
  for (int j = 0; j < N; ++j) {
    GroupState& g = groups[j];
    g.group = j;
    std::vector<int> in;
    for (int i : inst.group(j))
      if (reports[i]) in.push_back(i);
    std::sort(in.begin(), in.end(), [&](int a, int b) {
      return reports[a]->arrival != reports[b]->arrival ? reports[a]->arrival < reports[b]->arrival
                                                        : a < b;
    });
    const std::size_t need = static_cast<std::size_t>(2 * f + 1);
    if (in.size() < need)
      throw Error(ErrorCode::PreconditionViolated,
                  "group " + std::to_string(j) + " produced fewer than 2f+1 reports");
    g.reporters.assign(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(need));
    std::vector<int> arms;
    for (int i : g.reporters) arms.push_back(reports[i]->arm);
    g.representative = majority_vote(arms);
    for (int i : g.reporters)
      if (reports[i]->arm == g.representative) g.agreeing.push_back(i);
    std::sort(g.agreeing.begin(), g.agreeing.end());
    g.trim_param = f - static_cast<int>(g.reporters.size()) + static_cast<int>(g.agreeing.size());
    if (g.representative == inst.local_best(j)) ++res.groups_correctly_voted;
  }

  // Phase II.
  std::vector<double> estimate(n, 0.0);
  std::vector<std::int64_t> epochs(n, 1);
  std::vector<bool> transmitting(n, false);
  for (const auto& g : groups)
    for (int i : g.agreeing) {
      transmitting[i] = true;
      estimate[i] = reports[i]->mean;
      epochs[i] = reports[i]->epochs;
    }
  std::vector<RewardStream::Substream*> sub(n, nullptr);
  for (int i = 0; i < n; ++i)
    if ((!byz[i] || adv.strategy.needs_shadow()) && transmitting[i])
      sub[i] = &stream.substream(i, {inst.set_of(i), clients[i].report.arm});

  std::vector<int> active(N);
  std::iota(active.begin(), active.end(), 0);
  std::vector<std::int64_t> rounds_active(n, 0);
  int winner = -1;
  std::int64_t k = 0;
  for (;; ++k) {
    if (k >= params.round_cap)
      throw Error(ErrorCode::RoundCapExceeded,
                  "no decision after " + std::to_string(params.round_cap) + " rounds");
    std::vector<double> lower, upper;
    for (int j : active) {
      GroupState& g = groups[j];
      std::vector<double> us, ls, hu, hl;
      for (int i : g.agreeing) {
        if (!transmitting[i]) continue;
        ++rounds_active[i];
        const double r = phase2_radius(clients[i].params, epochs[i], k, H);
        us.push_back(estimate[i] + r);
        ls.push_back(estimate[i] - r);
        if (!byz[i]) {
          hu.push_back(us.back());
          hl.push_back(ls.back());
        }
      }
      const double u = trim(us, g.trim_param);
      const double l = trim(ls, g.trim_param);
      upper.push_back(u);
      lower.push_back(l);
      if (!hu.empty()) {
        HullCheck h{k, j, u, l,
                    *std::min_element(hu.begin(), hu.end()), *std::max_element(hu.begin(), hu.end()),
                    *std::min_element(hl.begin(), hl.end()), *std::max_element(hl.begin(), hl.end())};
        if (!h.contained()) ++res.hull_violations;
        res.hull_checks.push_back(h);
      }
    }
    double threshold = 0.0;
    std::vector<int> next;
    for (int idx : surviving_indices(lower, upper, &threshold)) next.push_back(active[idx]);
    if (next.empty()) throw Error(ErrorCode::EmptyActiveSet, "every group was eliminated");
    for (int j : active) groups[j].active = false;
    for (int j : next) groups[j].active = true;
    if (next.size() == 1) {
      winner = next.front();
      break;
    }

    if (plain) {
      tr.log({k, Direction::ServerToClient, kServer, kBroadcast, PayloadKind::Threshold,
              kThresholdBits, format_real(threshold)});
    } else {
      std::string d(static_cast<std::size_t>(N), '0');
      for (int j : next) d[static_cast<std::size_t>(j)] = '1';
      tr.log({k, Direction::ServerToClient, kServer, kBroadcast, PayloadKind::ActiveVector, N, d});
    }

    std::vector<int> members;
    for (int j : next)
      for (int i : groups[j].agreeing)
        if (transmitting[i]) members.push_back(i);
    std::sort(members.begin(), members.end());
    for (int i : members) {
      FedSelClient& c = clients[i];
      auto* s = sub[i];
      if (!byz[i]) {
        const QuantizedValue q =
            resample_and_encode(c, k, H, [s](int) { return s->draw(); }, tr.trace_for(i));
        estimate[i] = decode(q);
        tr.log({k + 1, Direction::ClientToServer, i, kServer, PayloadKind::QuantizedValue, q.bits,
                to_bitstring(q)});
        continue;
      }
      AdversaryContext ctx;
      ctx.phase = AttackPhase::Estimate;
      ctx.round = k + 1;
      ctx.client = i;
      ctx.set = inst.set_of(i);
      ctx.inst = &inst;
      if (s) {
        resample_and_encode(c, k, H, [s](int) { return s->draw(); });
        ctx.shadow = c.report;
        ctx.shadow_estimate = c.state.means[c.report.arm];
      }
      auto forged = act(adv.strategy, ctx, adv.seed);
      if (!forged) {
        // A member that stops transmitting is dropped and its slot in the trim
        // budget released.
        transmitting[i] = false;
        GroupState& g = groups[inst.set_of(i)];
        g.trim_param = std::max(0, g.trim_param - 1);
        continue;
      }
      const double a = alpha(c.params, static_cast<double>(epochs[i] + (k + 1) * H));
      const QuantizedValue q = encode(forged->mean, bit_precision(a));
      estimate[i] = decode(q);
      tr.log({k + 1, Direction::ClientToServer, i, kServer, PayloadKind::QuantizedValue, q.bits,
              to_bitstring(q)});
    }
    active = std::move(next);
  }

  RunOutcome& out = res.outcome;
  out.output_arm = {winner, groups[winner].representative};
  out.correct = out.output_arm == inst.best_arm();
  out.rounds = k + 1;
  out.rounds_active = rounds_active;
  for (int i = 0; i < n; ++i)
    if (!byz[i]) tr.phase2_pulls[i] = clients[i].phase2_pulls;
  out.phase1_pulls = tr.phase1_pulls;
  out.phase2_pulls = tr.phase2_pulls;
  out.total_bits = tr.total_bits();
  out.uplink_bits = tr.uplink_bits();
  res.groups = std::move(groups);
  return res;
}

}  // namespace fedbai
