// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "fedbai/codec.hpp"
#include "fedbai/errors.hpp"
#include "fedbai/fedsel.hpp"
#include "fedbai/harness.hpp"
#include "fedbai/network.hpp"
#include "fedbai/p2p.hpp"
#include "fedbai/robust_fedsel.hpp"
#include "fedbai/theory.hpp"

using namespace fedbai;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig fedsel_config(std::vector<double> sigmas, std::vector<int> H, int trials,
                               std::uint64_t seed) {
  ExperimentConfig c;
  c.protocol = Protocol::FedSel;
  c.sigmas = std::move(sigmas);
  c.comm_periods = std::move(H);
  c.trials = trials;
  c.seed = seed;
  return c;
}

// Consistency, single-round regime and bound dominance share one sweep.
void consistency_sweep() {
  auto cfg = fedsel_config({1, 5, 9, 13}, {20}, 200, 1001);
  cfg.trace_means = true;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run_experiment(cfg);
  const double secs = seconds_since(t0);

  bool ok = true;
  std::string detail;
  for (const auto& s : res.summary) {
    ok = ok && s.errors == 0 && s.correct_rate >= 0.90;
    detail += fmt("sigma=%g:%.3f ", *s.sigma, s.correct_rate);
  }
  report(1, ok, detail + fmt("(%.1fs)", secs));

  int good = 0, good_single = 0, single = 0, total = 0;
  for (const auto& r : res.rows) {
    if (r.sigma != 1.0) continue;
    ++total;
    single += r.rounds == 1;
    if (r.good_event_held == 1) {
      ++good;
      good_single += r.rounds == 1;
    }
  }
  report(2, good_single == good && single >= 0.9 * total,
         fmt("good-event trials %d, of which R=1: %d; R=1 overall %d/%d", good, good_single, single,
             total));

  int audited = 0, violations = 0;
  std::int64_t worst = 0;
  for (const auto& r : res.rows) {
    if (r.good_event_held != 1) continue;
    ++audited;
    violations += r.rounds_within_bound != 1;
    worst = std::max(worst, r.max_client_rounds);
  }
  report(6, violations == 0 && audited > 0,
         fmt("%d good-event trials, %d exceed the per-client rounds bound (max observed %lld)",
             audited, violations, static_cast<long long>(worst)));
}

void heterogeneity_trend() {
  const auto res = run_experiment(fedsel_config({1, 3, 5, 7, 9, 11, 13, 15}, {20}, 50, 1003));
  int inversions = 0;
  bool large = false;
  std::string detail;
  for (std::size_t k = 0; k < res.summary.size(); ++k) {
    const auto& s = res.summary[k];
    detail += fmt("%g:%.1f ", *s.sigma, s.rounds_mean);
    if (k == 0) continue;
    const auto& p = res.summary[k - 1];
    if (s.rounds_mean > p.rounds_mean) {
      ++inversions;
      const double se = std::sqrt(s.rounds_se * s.rounds_se + p.rounds_se * p.rounds_se);
      if (s.rounds_mean - p.rounds_mean > se) large = true;
    }
  }
  report(3, inversions == 0 || (inversions == 1 && !large),
         fmt("mean rounds by sigma: %s(increases: %d)", detail.c_str(), inversions));
}

void local_steps_trend() {
  const auto res = run_experiment(fedsel_config({9}, {10, 20, 40}, 50, 1004));
  const auto& h10 = res.summary[0];
  const auto& h20 = res.summary[1];
  const auto& h40 = res.summary[2];
  const double ratio = h40.rounds_mean / h20.rounds_mean;
  const double se = std::sqrt(h40.phase2_se * h40.phase2_se + h10.phase2_se * h10.phase2_se);
  const bool pulls_ok = h40.phase2_mean <= h10.phase2_mean + 40 + se;
  report(4, ratio >= 0.4 && ratio <= 0.6 && pulls_ok,
         fmt("rounds H=10/20/40: %.1f/%.1f/%.1f, ratio 40:20 = %.3f; phase-II pulls H=40 %.0f vs "
             "H=10 %.0f (+40+%.0f)",
             h10.rounds_mean, h20.rounds_mean, h40.rounds_mean, ratio, h40.phase2_mean,
             h10.phase2_mean, se));
}

void quantizer_error() {
  Xoshiro256 g(1005);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const double v = g.uniform();
    // Radii spread over [2^-40, 1], log-uniformly.
    const double a = std::exp2(-40.0 * g.uniform());
    if (std::abs(decode(encode(v, bit_precision(a))) - v) > a / 2) ++violations;
  }
  report(5, violations == 0, fmt("10000 pairs, %d violations", violations));
}

void lambert_w() {
  const double lo = -1.0 / std::numbers::e;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double x = lo + (0.0 - lo) * (k + 0.5) / 1000.0;
    const double w = lambert_w_minus1(x);
    worst = std::max(worst, std::abs(w * std::exp(w) - x));
  }
  const double at = lambert_w_minus1(-std::exp(-2.0));
  const double start = -std::exp(-2.0), end = -1e-6;
  int outside = 0;
  for (int k = 0; k < 1000; ++k) {
    const double x = start + (end - start) * k / 999.0;
    const auto [l, u] = w_minus1_bounds(x);
    const double w = lambert_w_minus1(x);
    if (!(l <= w && w <= u)) ++outside;
  }
  report(7, worst <= 1e-12 && std::abs(at + 3.1462) <= 1e-3 && outside == 0,
         fmt("max residual %.2e, W(-1/e^2) = %.6f, bracket misses %d/1000", worst, at, outside));
}

void robustness() {
  std::string detail;
  bool ok = true;
  for (const char* strategy : {"silent", "wrong-arm", "inflate", "deflate", "random"}) {
    ExperimentConfig c;
    c.protocol = Protocol::RobustFedSel;
    c.sigmas = {5};
    c.clients_per_group = 4;
    c.f = 1;
    c.adversary = strategy;
    c.trials = 100;
    c.seed = 1008;
    const auto res = run_experiment(c);
    const auto& s = res.summary.front();
    ok = ok && s.errors == 0 && s.correct_rate >= 0.90;
    detail += fmt("%s:%.2f ", strategy, s.correct_rate);
  }
  const auto inst = make_target_detection_instance(5);
  int identical = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    RewardStream a(inst, trial_seed(1008, 5.0, 20, seed)), b(inst, trial_seed(1008, 5.0, 20, seed));
    const auto plain = run_fedsel(inst, FedSelParams{}, a);
    const auto robust = run_robust_fedsel(inst, RobustParams{}, AdversarySetup{}, b);
    identical += plain.transcript.to_ndjson() == robust.transcript.to_ndjson();
  }
  ok = ok && identical == seeds;
  report(8, ok, detail + fmt("; f=0 transcripts identical %d/%d", identical, seeds));
}

void peer_to_peer() {
  std::string detail;
  bool ok = true;
  for (const char* strategy : {"silent", "wrong-arm"}) {
    ExperimentConfig c;
    c.protocol = Protocol::P2P;
    c.sigmas = {1};
    c.clients_per_group = 4;
    c.f = 1;
    c.adversary = strategy;
    c.adversaries = {0};
    c.trials = 100;
    c.seed = 1009;
    const auto res = run_experiment(c);
    const auto& s = res.summary.front();
    ok = ok && s.errors == 0 && s.correct_rate >= 0.90;
    detail += fmt("%s:%.2f ", strategy, s.correct_rate);
  }
  const auto base = make_target_detection_instance(1);
  ProblemInstance nine(base.arm_sets(), {{0, 1, 2, 3}, {4}, {5, 6, 7, 8}}, 0.1, 20);
  bool rejected = false;
  try {
    P2PParams p;
    p.f = 1;
    RewardStream s(nine, 1);
    run_p2p(nine, bridged_cliques_graph(), AdversarySetup{{4}, AdversaryStrategy{}, 1}, p, s);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::PreconditionViolated;
  }
  ok = ok && rejected;
  report(9, ok, detail + (rejected ? "; bridged cliques rejected" : "; bridged cliques accepted"));
}

void checker_equivalence() {
  Xoshiro256 pick(1010);
  int agree = 0, robust = 0;
  const int graphs = 1000;
  for (int k = 0; k < graphs; ++k) {
    const int n = 1 + static_cast<int>(pick.below(10));
    const double p = pick.uniform();
    const auto g = random_digraph(n, p, pick.next());
    std::vector<int> group;
    for (int v : g.vertices())
      if (group.empty() || pick.below(3) == 0) group.push_back(v);
    const int r = 1 + static_cast<int>(pick.below(4));
    const bool a = is_strongly_r_robust(g, group, r);
    robust += a;
    agree += a == brute_force_strong_robustness(g, group, r);
  }
  const auto bridged = bridged_cliques_graph();
  int bridged_agree = 0, bridged_cases = 0;
  for (const auto& [j, group] : bridged.groups())
    for (int r = 1; r <= 4; ++r) {
      ++bridged_cases;
      bridged_agree +=
          is_strongly_r_robust(bridged, group, r) == brute_force_strong_robustness(bridged, group, r);
    }
  report(10, agree == graphs && bridged_agree == bridged_cases,
         fmt("random digraphs %d/%d agree (%d robust); bridged cliques %d/%d agree", agree, graphs,
             robust, bridged_agree, bridged_cases));
}

void good_event_frequency() {
  auto cfg = fedsel_config({5}, {20}, 500, 1011);
  cfg.trace_means = true;
  const auto res = run_experiment(cfg);
  int failed = 0, audited = 0;
  for (const auto& r : res.rows) {
    if (r.good_event_held < 0) continue;
    ++audited;
    failed += r.good_event_held == 0;
  }
  const double limit = 0.1 + 3.0 * std::sqrt(0.09 / 500.0);
  const double rate = audited ? static_cast<double>(failed) / audited : 1.0;
  report(11, audited == 500 && rate <= limit,
         fmt("%d/%d audits failed (rate %.4f, limit %.4f)", failed, audited, rate, limit));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  auto guarded = [](int id, auto fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
  };
  guarded(1, consistency_sweep);  // also criteria 2 and 6
  guarded(3, heterogeneity_trend);
  guarded(4, local_steps_trend);
  guarded(5, quantizer_error);
  guarded(7, lambert_w);
  guarded(8, robustness);
  guarded(9, peer_to_peer);
  guarded(10, checker_equivalence);
  guarded(11, good_event_frequency);
  std::printf("%d criteria failed (%.1fs)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
