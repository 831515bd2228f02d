#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "fedbai/errors.hpp"
#include "fedbai/harness.hpp"
#include "fedbai/io.hpp"
#include "fedbai/network.hpp"
#include "fedbai/p2p.hpp"
#include "fedbai/theory.hpp"

using namespace fedbai;

namespace {

ProblemInstance load_or_build(const std::string& file, double sigma, double delta, int H,
                              int per_group) {
  ProblemInstance inst = file.empty()
                             ? make_target_detection_instance(sigma, delta, H)
                             : instance_from_json(nlohmann::json::parse(read_text_file(file)));
  if (per_group > 1) inst = inst.with_group_size(per_group);
  return inst;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated and peer-to-peer best-arm identification simulator"};
  app.require_subcommand(1);

  // run
  ExperimentConfig cfg;
  std::string protocol = "fedsel";
  double assert_correct = -1.0;
  auto* run = app.add_subcommand("run", "Run a Monte-Carlo sweep and write CSV results");
  run->add_option("--protocol", protocol, "fedsel, robust or p2p")->capture_default_str();
  run->add_option("--instance", cfg.instance_file, "Instance JSON (default: built-in instance)");
  run->add_option("--sigma-list,--sigma", cfg.sigmas, "Heterogeneity values for the built-in instance")
      ->delimiter(',');
  run->add_option("--H-list,--H", cfg.comm_periods, "Communication periods")->delimiter(',');
  run->add_option("--delta", cfg.delta, "Confidence parameter (built-in instance)");
  run->add_option("--clients-per-group", cfg.clients_per_group, "Clone every group to this size");
  run->add_option("--f", cfg.f, "Tolerated Byzantine clients per group / neighborhood");
  run->add_option("--adversary", cfg.adversary,
                  "silent, wrong-arm[:idx], inflate[:x], deflate[:x] or random");
  run->add_option("--adversaries", cfg.adversaries, "Byzantine client ids")->delimiter(',');
  run->add_option("--graph", cfg.graph_file, "Graph JSON for p2p (default: complete)");
  run->add_flag("--override-preconditions", cfg.override_preconditions,
                "Run p2p even when the graph or instance checks fail");
  run->add_option("--c", cfg.c, "Elimination multiplier (default 8, or 6 for p2p)");
  run->add_option("--trials", cfg.trials, "Trials per sweep point")->capture_default_str();
  run->add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
  run->add_option("--threads", cfg.threads, "Worker threads")->capture_default_str();
  run->add_flag("--trace-means", cfg.trace_means, "Keep empirical-mean traces and audit them");
  run->add_option("--out", cfg.out_dir, "Output directory for CSV and JSON files");
  run->add_flag("--transcripts", cfg.write_transcripts, "Write one NDJSON transcript per trial");
  run->add_option("--assert-correct-rate", assert_correct,
                  "Exit 1 if any sweep point has a lower correct rate");

  // check-graph
  std::string graph_file, instance_file;
  std::vector<int> adversaries;
  int f = 1;
  int r = -1;
  bool brute = false;
  auto* cg = app.add_subcommand("check-graph", "Report robustness and locality of a graph");
  cg->add_option("--graph", graph_file, "Graph JSON")->required();
  cg->add_option("--f", f, "Adversaries tolerated")->capture_default_str();
  cg->add_option("--r", r, "Robustness level to test (default 3f+1)");
  cg->add_option("--adversaries", adversaries, "Byzantine vertex ids")->delimiter(',');
  cg->add_option("--instance", instance_file, "Instance JSON; adds the full p2p precondition report");
  cg->add_flag("--brute-force", brute, "Cross-check with exhaustive enumeration (<= 20 vertices)");

  // bounds
  double sigma = 1.0, delta = 0.1, c = 8.0;
  int H = 20, per_group = 1;
  std::string out;
  auto* bd = app.add_subcommand("bounds", "Print the theoretical round and pull bounds as JSON");
  bd->add_option("--instance", instance_file, "Instance JSON (default: built-in instance)");
  bd->add_option("--sigma", sigma, "Heterogeneity of the built-in instance")->capture_default_str();
  bd->add_option("--delta", delta, "Confidence parameter")->capture_default_str();
  bd->add_option("--H", H, "Communication period")->capture_default_str();
  bd->add_option("--c", c, "Elimination multiplier")->capture_default_str();
  bd->add_option("--out", out, "Output file (default: stdout)");

  // audit
  std::string transcript_file;
  auto* au = app.add_subcommand("audit", "Check every traced mean against its confidence radius");
  au->add_option("--transcript", transcript_file, "NDJSON transcript with mean traces")->required();
  au->add_option("--instance", instance_file, "Instance JSON (default: built-in instance)");
  au->add_option("--sigma", sigma, "Heterogeneity of the built-in instance")->capture_default_str();
  au->add_option("--delta", delta, "Confidence parameter")->capture_default_str();
  au->add_option("--clients-per-group", per_group, "Group size used in the run")->capture_default_str();

  // gen-graph
  std::string kind = "complete";
  int n = 12, k = 2;
  double p = 0.5;
  std::uint64_t seed = 1;
  std::vector<int> group_sizes;
  auto* gg = app.add_subcommand("gen-graph", "Write a graph JSON file");
  gg->add_option("--kind", kind, "complete, ring, random or bridged")->capture_default_str();
  gg->add_option("--n", n, "Vertices")->capture_default_str();
  gg->add_option("--k", k, "Ring: neighbors on each side")->capture_default_str();
  gg->add_option("--p", p, "Random: edge probability")->capture_default_str();
  gg->add_option("--seed", seed, "Random: seed")->capture_default_str();
  gg->add_option("--groups", group_sizes, "Group sizes labelling consecutive vertices")
      ->delimiter(',');
  gg->add_option("--out", out, "Output file (default: stdout)");

  // gen-instance
  auto* gi = app.add_subcommand("gen-instance", "Write the built-in instance as JSON");
  gi->add_option("--sigma", sigma, "Heterogeneity")->capture_default_str();
  gi->add_option("--delta", delta, "Confidence parameter")->capture_default_str();
  gi->add_option("--H", H, "Communication period")->capture_default_str();
  gi->add_option("--clients-per-group", per_group, "Group size")->capture_default_str();
  gi->add_option("--out", out, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cfg.protocol = parse_protocol(protocol);
      const ExperimentResult res = run_experiment(cfg);
      std::cout << summary_csv_header() << '\n';
      bool ok = true;
      for (const auto& s : res.summary) {
        std::cout << to_csv_line(s) << '\n';
        if (assert_correct >= 0.0 && s.correct_rate < assert_correct) ok = false;
      }
      return ok ? 0 : 1;
    }

    if (*cg) {
      const DirectedGraph g = graph_from_json(nlohmann::json::parse(read_text_file(graph_file)));
      const int level = r >= 0 ? r : 3 * f + 1;
      nlohmann::json rep;
      bool ok = true;
      rep["r"] = level;
      rep["f_local"] = verify_f_local(g, adversaries, f);
      ok = ok && rep["f_local"].get<bool>();
      nlohmann::json groups = nlohmann::json::object();
      for (const auto& [j, ids] : g.groups()) {
        const bool robust = is_strongly_r_robust(g, ids, level);
        nlohmann::json entry{{"strongly_robust", robust}};
        if (brute) {
          const bool bf = brute_force_strong_robustness(g, ids, level);
          entry["brute_force"] = bf;
          ok = ok && bf == robust;
        }
        groups[std::to_string(j)] = entry;
        ok = ok && robust;
      }
      rep["groups"] = groups;
      if (!instance_file.empty()) {
        const ProblemInstance inst =
            instance_from_json(nlohmann::json::parse(read_text_file(instance_file)));
        const PreconditionReport pr = check_p2p_preconditions(inst, g, adversaries, f);
        rep["max_cross_index"] = pr.max_cross_index;
        rep["heterogeneity"] = pr.heterogeneity;
        rep["preconditions_ok"] = pr.ok();
        ok = ok && pr.ok();
      }
      rep["ok"] = ok;
      std::cout << rep.dump(2) << '\n';
      return ok ? 0 : 1;
    }

    if (*bd) {
      const ProblemInstance inst = load_or_build(instance_file, sigma, delta, H, 1).with_comm_period(H);
      emit(out, theory_to_json(round_bounds(inst, c)).dump(2) + "\n");
      return 0;
    }

    if (*au) {
      const ProblemInstance inst = load_or_build(instance_file, sigma, delta, 20, per_group);
      const Transcript t = Transcript::from_ndjson(read_text_file(transcript_file));
      const AuditResult a = audit_means(t, inst);
      std::cout << nlohmann::json{{"held", a.held}, {"entries", a.entries},
                                  {"violations", a.violations}}
                       .dump()
                << '\n';
      return a.held ? 0 : 1;
    }

    if (*gg) {
      DirectedGraph g;
      if (kind == "complete") g = complete_graph(n);
      else if (kind == "ring") g = ring_graph(n, k);
      else if (kind == "random") g = random_digraph(n, p, seed);
      else if (kind == "bridged") g = bridged_cliques_graph();
      else throw Error(ErrorCode::InvalidConfig, "unknown graph kind '" + kind + "'");
      if (!group_sizes.empty()) {
        std::map<int, std::vector<int>> groups;
        int v = 0;
        for (std::size_t j = 0; j < group_sizes.size(); ++j)
          for (int m = 0; m < group_sizes[j]; ++m) groups[static_cast<int>(j)].push_back(v++);
        g.set_groups(std::move(groups));
      }
      emit(out, graph_to_json(g).dump() + "\n");
      return 0;
    }

    if (*gi) {
      emit(out, instance_to_json(load_or_build("", sigma, delta, H, per_group)).dump(2) + "\n");
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: Io: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
