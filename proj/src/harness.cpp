#include "fedbai/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "fedbai/errors.hpp"
#include "fedbai/fedsel.hpp"
#include "fedbai/io.hpp"
#include "fedbai/p2p.hpp"
#include "fedbai/robust_fedsel.hpp"
#include "fedbai/theory.hpp"

namespace fedbai {

AuditResult audit_means(const Transcript& t, const ProblemInstance& inst) {
  if (!t.traced) throw Error(ErrorCode::InsufficientTrace, "transcript has no mean traces");
  AuditResult res;
  std::map<int, std::vector<double>> radius;  // alpha(t) per set size
  for (std::size_t i = 0; i < t.traces.size(); ++i) {
    const auto& tr = t.traces[i];
    if (tr.empty()) continue;
    const int client = static_cast<int>(i);
    if (client >= inst.num_clients())
      throw Error(ErrorCode::InsufficientTrace, "trace for unknown client", client);
    const int set = inst.set_of(client);
    if (static_cast<int>(tr.size()) != inst.set_size(set))
      throw Error(ErrorCode::InsufficientTrace, "trace arm count does not match the instance",
                  client);
    ElimParams p;
    p.num_clients = inst.num_clients();
    p.set_size = inst.set_size(set);
    p.delta = inst.delta();
    auto& rad = radius[p.set_size];
    for (int a = 0; a < p.set_size; ++a) {
      const auto& means = tr[a];
      while (rad.size() < means.size()) rad.push_back(alpha(p, static_cast<double>(rad.size() + 1)));
      const double r = inst.mean({set, a});
      for (std::size_t k = 0; k < means.size(); ++k) {
        ++res.entries;
        if (std::fabs(means[k] - r) > rad[k]) ++res.violations;
      }
    }
  }
  res.held = res.violations == 0;
  return res;
}

bool audit_good_event(const Transcript& t, const ProblemInstance& inst) {
  return audit_means(t, inst).held;
}

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::FedSel: return "fedsel";
    case Protocol::RobustFedSel: return "robust";
    case Protocol::P2P: return "p2p";
  }
  return "?";
}

Protocol parse_protocol(const std::string& s) {
  if (s == "fedsel") return Protocol::FedSel;
  if (s == "robust") return Protocol::RobustFedSel;
  if (s == "p2p") return Protocol::P2P;
  throw Error(ErrorCode::InvalidConfig, "unknown protocol '" + s + "' (fedsel, robust, p2p)");
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (trials < 1) bad("trials must be at least 1");
  if (instance_file.empty() && sigmas.empty()) bad("sigma list is empty");
  if (comm_periods.empty()) bad("H list is empty");
  for (int h : comm_periods)
    if (h < 1) bad("H values must be positive");
  if (clients_per_group < 1) bad("clients per group must be positive");
  if (f < 0) bad("f must be nonnegative");
  if (threads < 1) bad("threads must be positive");
  if (c != 0.0 && c < 2.0) bad("c must be at least 2");
  if (protocol == Protocol::FedSel && (f != 0 || !adversaries.empty()))
    bad("fedsel has no adversaries; use --protocol robust");
  if (write_transcripts && out_dir.empty()) bad("transcripts need an output directory");
  AdversaryStrategy::parse(adversary);
}

std::uint64_t trial_seed(std::uint64_t base, std::optional<double> sigma, int H, int trial) {
  const std::uint64_t s = sigma ? std::bit_cast<std::uint64_t>(*sigma) : ~std::uint64_t{0};
  return mix_seed({base, s, static_cast<std::uint64_t>(H), static_cast<std::uint64_t>(trial)});
}

namespace {

struct Point {
  std::optional<double> sigma;
  int H;
};

struct PointSetup {
  Point point;
  ProblemInstance inst;
  TheoryReport theory;
  std::vector<int> adversaries;
};

std::string point_tag(const Point& p) {
  return (p.sigma ? "sigma" + format_real(*p.sigma) + "_" : std::string()) + "H" +
         std::to_string(p.H);
}

std::vector<int> default_adversaries(const ExperimentConfig& cfg, const ProblemInstance& inst) {
  if (!cfg.adversaries.empty()) return cfg.adversaries;
  std::vector<int> ids;
  if (cfg.protocol == Protocol::RobustFedSel) {
    for (const auto& g : inst.groups())
      for (int k = 0; k < cfg.f && k < static_cast<int>(g.size()); ++k) ids.push_back(g[k]);
  } else if (cfg.protocol == Protocol::P2P) {
    for (int k = 0; k < cfg.f && k < inst.num_clients(); ++k) ids.push_back(k);
  }
  return ids;
}

double protocol_c(const ExperimentConfig& cfg) {
  if (cfg.c != 0.0) return cfg.c;
  return cfg.protocol == Protocol::P2P ? 6.0 : 8.0;
}

void fill_bounds(MetricsRow& row, const RunOutcome& o, const PointSetup& ps,
                 const std::vector<int>& adversaries) {
  row.correct = o.correct;
  row.rounds = o.rounds;
  for (auto p : o.phase1_pulls) row.phase1_pulls += p;
  for (auto p : o.phase2_pulls) row.phase2_pulls += p;
  row.total_bits = o.total_bits;
  row.uplink_bits = o.uplink_bits;
  row.rounds_within_bound = 1;
  for (int i = 0; i < static_cast<int>(o.rounds_active.size()); ++i) {
    if (std::find(adversaries.begin(), adversaries.end(), i) != adversaries.end()) continue;
    row.max_client_rounds = std::max(row.max_client_rounds, o.rounds_active[i]);
    const double bound = ps.theory.sets[ps.inst.set_of(i)].rounds;
    if (static_cast<double>(o.rounds_active[i]) > bound + 1e-9) row.rounds_within_bound = 0;
  }
}

MetricsRow run_trial(const ExperimentConfig& cfg, const PointSetup& ps, const DirectedGraph* graph,
                     int trial, std::string* ndjson) {
  MetricsRow row;
  row.protocol = to_string(cfg.protocol);
  row.sigma = ps.point.sigma;
  row.H = ps.point.H;
  row.f = cfg.f;
  row.adversary = cfg.protocol == Protocol::FedSel ? "none" : AdversaryStrategy::parse(cfg.adversary).name();
  row.trial = trial;
  row.seed = trial_seed(cfg.seed, ps.point.sigma, ps.point.H, trial);
  const ProblemInstance& inst = ps.inst;
  RewardStream stream(inst, row.seed);
  AdversarySetup adv{ps.adversaries, AdversaryStrategy::parse(cfg.adversary),
                     mix_seed({row.seed, 0xadull})};
  std::optional<Transcript> transcript;
  try {
    switch (cfg.protocol) {
      case Protocol::FedSel: {
        FedSelParams p;
        p.c = protocol_c(cfg);
        p.trace_means = cfg.trace_means;
        FedSelResult r = run_fedsel(inst, p, stream);
        fill_bounds(row, r.outcome, ps, {});
        transcript = std::move(r.transcript);
        break;
      }
      case Protocol::RobustFedSel: {
        RobustParams p;
        p.c = protocol_c(cfg);
        p.f = cfg.f;
        p.trace_means = cfg.trace_means;
        RobustResult r = run_robust_fedsel(inst, p, adv, stream);
        fill_bounds(row, r.outcome, ps, ps.adversaries);
        row.groups_correctly_voted = r.groups_correctly_voted;
        row.hull_violations = r.hull_violations;
        transcript = std::move(r.transcript);
        break;
      }
      case Protocol::P2P: {
        P2PParams p;
        p.c = protocol_c(cfg);
        p.f = cfg.f;
        p.trace_means = cfg.trace_means;
        p.check_preconditions = !cfg.override_preconditions;
        P2PResult r = run_p2p(inst, *graph, adv, p, stream);
        row.correct = r.all_honest_correct;
        row.honest_correct_fraction = r.honest_correct_fraction;
        row.rounds = r.ticks;
        row.phase1_pulls = r.transcript.total_phase1_pulls();
        row.total_bits = r.transcript.total_bits();
        row.uplink_bits = r.transcript.uplink_bits();
        row.claim_violations = r.claim_violations;
        row.hull_violations = r.hull_violations;
        transcript = std::move(r.transcript);
        break;
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PreconditionViolated || e.code() == ErrorCode::InvalidConfig)
      throw;
    row.error = to_string(e.code());
    row.correct = false;
    return row;
  }
  if (cfg.trace_means) row.good_event_held = audit_good_event(*transcript, inst) ? 1 : 0;
  if (ndjson) *ndjson = transcript->to_ndjson();
  return row;
}

SummaryRow summarize(const std::vector<MetricsRow>& rows) {
  SummaryRow s;
  const MetricsRow& f = rows.front();
  s.protocol = f.protocol;
  s.sigma = f.sigma;
  s.H = f.H;
  s.f = f.f;
  s.adversary = f.adversary;
  s.trials = static_cast<int>(rows.size());
  std::vector<double> rounds, p1, p2, bits;
  int correct = 0, audited = 0, held = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++s.errors;
      continue;
    }
    correct += r.correct ? 1 : 0;
    rounds.push_back(static_cast<double>(r.rounds));
    p1.push_back(static_cast<double>(r.phase1_pulls));
    p2.push_back(static_cast<double>(r.phase2_pulls));
    bits.push_back(static_cast<double>(r.total_bits));
    if (r.good_event_held >= 0) {
      ++audited;
      held += r.good_event_held;
    }
  }
  s.correct_rate = static_cast<double>(correct) / s.trials;
  s.rounds_mean = mean_of(rounds);
  s.rounds_se = standard_error(rounds);
  s.phase1_mean = mean_of(p1);
  s.phase1_se = standard_error(p1);
  s.phase2_mean = mean_of(p2);
  s.phase2_se = standard_error(p2);
  s.bits_mean = mean_of(bits);
  if (audited) s.good_event_rate = static_cast<double>(held) / audited;
  return s;
}

std::string opt_real(std::optional<double> v) { return v ? format_real(*v) : std::string(); }
std::string opt_int(std::int64_t v) { return v < 0 ? std::string() : std::to_string(v); }

}  // namespace

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::string metrics_csv_header() {
  return "protocol,sigma,H,f,adversary,trial,seed,correct,rounds,phase1_pulls,phase2_pulls,"
         "total_bits,uplink_bits,good_event_held,groups_correctly_voted,rounds_within_bound,"
         "max_client_rounds,honest_correct_fraction,claim_violations,hull_violations,error";
}

std::string to_csv_line(const MetricsRow& r) {
  std::string s;
  s += r.protocol + ',' + opt_real(r.sigma) + ',' + std::to_string(r.H) + ',' +
       std::to_string(r.f) + ',' + r.adversary + ',' + std::to_string(r.trial) + ',' +
       std::to_string(r.seed) + ',' + (r.correct ? "1" : "0") + ',' + std::to_string(r.rounds) +
       ',' + std::to_string(r.phase1_pulls) + ',' + std::to_string(r.phase2_pulls) + ',' +
       std::to_string(r.total_bits) + ',' + std::to_string(r.uplink_bits) + ',' +
       opt_int(r.good_event_held) + ',' + opt_int(r.groups_correctly_voted) + ',' +
       opt_int(r.rounds_within_bound) + ',' + std::to_string(r.max_client_rounds) + ',' +
       (r.honest_correct_fraction < 0 ? std::string() : format_real(r.honest_correct_fraction)) +
       ',' + opt_int(r.claim_violations) + ',' + opt_int(r.hull_violations) + ',' + r.error;
  return s;
}

std::string summary_csv_header() {
  return "protocol,sigma,H,f,adversary,trials,correct_rate,rounds_mean,rounds_se,rounds_ci_low,"
         "rounds_ci_high,phase1_mean,phase1_se,phase2_mean,phase2_se,bits_mean,good_event_rate,"
         "errors";
}

std::string to_csv_line(const SummaryRow& r) {
  const double z = 1.959963984540054;
  return r.protocol + ',' + opt_real(r.sigma) + ',' + std::to_string(r.H) + ',' +
         std::to_string(r.f) + ',' + r.adversary + ',' + std::to_string(r.trials) + ',' +
         format_real(r.correct_rate) + ',' + format_real(r.rounds_mean) + ',' +
         format_real(r.rounds_se) + ',' + format_real(r.rounds_mean - z * r.rounds_se) + ',' +
         format_real(r.rounds_mean + z * r.rounds_se) + ',' + format_real(r.phase1_mean) + ',' +
         format_real(r.phase1_se) + ',' + format_real(r.phase2_mean) + ',' +
         format_real(r.phase2_se) + ',' + format_real(r.bits_mean) + ',' +
         (r.good_event_rate < 0 ? std::string() : format_real(r.good_event_rate)) + ',' +
         std::to_string(r.errors);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::optional<ProblemInstance> file_inst;
  if (!cfg.instance_file.empty())
    file_inst = instance_from_json(nlohmann::json::parse(read_text_file(cfg.instance_file)));

  std::vector<PointSetup> points;
  auto add_point = [&](std::optional<double> sigma, int H) {
    ProblemInstance base = file_inst ? *file_inst : make_target_detection_instance(*sigma, cfg.delta);
    if (cfg.clients_per_group > 1) base = base.with_group_size(cfg.clients_per_group);
    ProblemInstance inst = base.with_comm_period(H);
    TheoryReport th = round_bounds(inst, protocol_c(cfg));
    std::vector<int> adv = default_adversaries(cfg, inst);
    points.push_back({{sigma, H}, std::move(inst), std::move(th), std::move(adv)});
  };
  if (file_inst) {
    for (int H : cfg.comm_periods) add_point(std::nullopt, H);
  } else {
    for (double s : cfg.sigmas)
      for (int H : cfg.comm_periods) add_point(s, H);
  }

  std::vector<std::optional<DirectedGraph>> graphs(points.size());
  if (cfg.protocol == Protocol::P2P) {
    for (std::size_t k = 0; k < points.size(); ++k)
      graphs[k] = cfg.graph_file.empty()
                      ? complete_graph_for(points[k].inst.groups())
                      : graph_from_json(nlohmann::json::parse(read_text_file(cfg.graph_file)));
  }

  const std::size_t per = static_cast<std::size_t>(cfg.trials);
  const std::size_t total = points.size() * per;
  ExperimentResult res;
  res.rows.resize(total);
  std::vector<std::string> ndjson(cfg.write_transcripts ? total : 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      const std::size_t pk = job / per;
      try {
        res.rows[job] = run_trial(cfg, points[pk], graphs[pk] ? &*graphs[pk] : nullptr,
                                  static_cast<int>(job % per),
                                  cfg.write_transcripts ? &ndjson[job] : nullptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
    }
  };
  const int nthreads = std::min<int>(cfg.threads, static_cast<int>(std::max<std::size_t>(1, total)));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t pk = 0; pk < points.size(); ++pk) {
    std::vector<MetricsRow> slice(res.rows.begin() + static_cast<std::ptrdiff_t>(pk * per),
                                  res.rows.begin() + static_cast<std::ptrdiff_t>((pk + 1) * per));
    res.summary.push_back(summarize(slice));
  }

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::string csv = metrics_csv_header() + "\n";
    for (const auto& r : res.rows) csv += to_csv_line(r) + "\n";
    write_text_file((fs::path(cfg.out_dir) / "trials.csv").string(), csv);
    std::string sum = summary_csv_header() + "\n";
    for (const auto& r : res.summary) sum += to_csv_line(r) + "\n";
    write_text_file((fs::path(cfg.out_dir) / "summary.csv").string(), sum);
    if (cfg.protocol != Protocol::P2P)
      for (const auto& ps : points)
        write_text_file(
            (fs::path(cfg.out_dir) / ("theory_" + point_tag(ps.point) + ".json")).string(),
            theory_to_json(ps.theory).dump(2) + "\n");
    if (cfg.write_transcripts) {
      fs::create_directories(fs::path(cfg.out_dir) / "transcripts");
      for (std::size_t job = 0; job < total; ++job)
        write_text_file((fs::path(cfg.out_dir) / "transcripts" /
                         (point_tag(points[job / per].point) + "_trial" +
                          std::to_string(job % per) + ".ndjson"))
                            .string(),
                        ndjson[job]);
    }
  }
  return res;
}

}  // namespace fedbai
