#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fedbai/codec.hpp"
#include "fedbai/errors.hpp"
#include "fedbai/fedsel.hpp"
#include "fedbai/harness.hpp"
#include "fedbai/io.hpp"
#include "fedbai/network.hpp"
#include "fedbai/p2p.hpp"
#include "fedbai/robust_fedsel.hpp"
#include "fedbai/theory.hpp"

namespace py = pybind11;
using namespace fedbai;

namespace {

py::dict outcome_dict(const RunOutcome& o) {
  py::dict d;
  d["output_arm"] = py::make_tuple(o.output_arm.set, o.output_arm.index);
  d["correct"] = o.correct;
  d["rounds"] = o.rounds;
  d["phase1_pulls"] = o.phase1_pulls;
  d["phase2_pulls"] = o.phase2_pulls;
  d["rounds_active"] = o.rounds_active;
  d["total_bits"] = o.total_bits;
  d["uplink_bits"] = o.uplink_bits;
  return d;
}

ProblemInstance instance_from(const py::object& obj) {
  if (py::isinstance<ProblemInstance>(obj)) return obj.cast<ProblemInstance>();
  return instance_from_json(nlohmann::json::parse(py::str(py::module_::import("json").attr("dumps")(obj)).cast<std::string>()));
}

}  // namespace

PYBIND11_MODULE(_fedbai, m) {
  m.doc() = "Federated and peer-to-peer best-arm identification";

  static py::exception<Error> error(m, "FedbaiError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_static("from_dict", [](const py::object& d) { return instance_from(d); })
      .def("to_dict",
           [](const ProblemInstance& i) {
             return py::module_::import("json").attr("loads")(instance_to_json(i).dump());
           })
      .def_property_readonly("num_sets", &ProblemInstance::num_sets)
      .def_property_readonly("num_clients", &ProblemInstance::num_clients)
      .def_property_readonly("best_arm",
                             [](const ProblemInstance& i) {
                               return py::make_tuple(i.best_arm().set, i.best_arm().index);
                             })
      .def("mean", [](const ProblemInstance& i, int set, int arm) { return i.mean({set, arm}); })
      .def("with_comm_period", &ProblemInstance::with_comm_period)
      .def("with_group_size", &ProblemInstance::with_group_size);

  m.def("target_detection_instance", &make_target_detection_instance, py::arg("sigma"),
        py::arg("delta") = 0.1, py::arg("H") = 20);
  m.def("heterogeneity_index", &heterogeneity_index);

  m.def("bit_precision", &bit_precision);
  m.def("encode", [](double v, int bits) { return encode(v, bits).bin_index; });
  m.def("decode", [](std::uint64_t bin, int bits) { return decode({bin, bits}); });

  m.def("lambert_w_minus1", &lambert_w_minus1);
  m.def("w_minus1_bounds", &w_minus1_bounds);
  m.def("crossing_time_gap_bound", &crossing_time_gap_bound);
  m.def("single_round_regime", &single_round_regime);
  m.def(
      "round_bounds",
      [](const ProblemInstance& inst, double c) {
        return py::module_::import("json").attr("loads")(theory_to_json(round_bounds(inst, c)).dump());
      },
      py::arg("inst"), py::arg("c") = 8.0);

  m.def("majority_vote", [](const std::vector<int>& v) { return majority_vote(v); });
  m.def("trim", &trim);

  m.def(
      "run_fedsel",
      [](const ProblemInstance& inst, std::uint64_t seed, double c, bool trace) {
        FedSelParams p;
        p.c = c;
        p.trace_means = trace;
        RewardStream s(inst, seed);
        FedSelResult r;
        {
          py::gil_scoped_release release;
          r = run_fedsel(inst, p, s);
        }
        py::dict d = outcome_dict(r.outcome);
        d["transcript"] = r.transcript.to_ndjson();
        if (trace) d["good_event_held"] = audit_good_event(r.transcript, inst);
        return d;
      },
      py::arg("inst"), py::arg("seed"), py::arg("c") = 8.0, py::arg("trace_means") = false);

  m.def(
      "run_robust_fedsel",
      [](const ProblemInstance& inst, std::uint64_t seed, int f, const std::vector<int>& adversaries,
         const std::string& strategy, double c) {
        RobustParams p;
        p.c = c;
        p.f = f;
        AdversarySetup adv{adversaries, AdversaryStrategy::parse(strategy), mix_seed({seed, 0xadull})};
        RewardStream s(inst, seed);
        RobustResult r;
        {
          py::gil_scoped_release release;
          r = run_robust_fedsel(inst, p, adv, s);
        }
        py::dict d = outcome_dict(r.outcome);
        d["groups_correctly_voted"] = r.groups_correctly_voted;
        d["hull_violations"] = r.hull_violations;
        d["transcript"] = r.transcript.to_ndjson();
        return d;
      },
      py::arg("inst"), py::arg("seed"), py::arg("f") = 0, py::arg("adversaries") = std::vector<int>{},
      py::arg("strategy") = "silent", py::arg("c") = 8.0);

  m.def(
      "run_p2p",
      [](const ProblemInstance& inst, std::uint64_t seed, int f, const std::vector<int>& adversaries,
         const std::string& strategy, std::optional<std::string> graph_json, bool check) {
        P2PParams p;
        p.f = f;
        p.check_preconditions = check;
        const DirectedGraph g = graph_json ? graph_from_json(nlohmann::json::parse(*graph_json))
                                           : complete_graph_for(inst.groups());
        AdversarySetup adv{adversaries, AdversaryStrategy::parse(strategy), mix_seed({seed, 0xadull})};
        RewardStream s(inst, seed);
        P2PResult r;
        {
          py::gil_scoped_release release;
          r = run_p2p(inst, g, adv, p, s);
        }
        py::dict d;
        py::list outs;
        for (const auto& o : r.outputs)
          if (o) outs.append(py::make_tuple(o->set, o->index));
          else outs.append(py::none());
        d["outputs"] = outs;
        d["all_honest_correct"] = r.all_honest_correct;
        d["honest_correct_fraction"] = r.honest_correct_fraction;
        d["ticks"] = r.ticks;
        d["claim_violations"] = r.claim_violations;
        d["hull_violations"] = r.hull_violations;
        return d;
      },
      py::arg("inst"), py::arg("seed"), py::arg("f") = 0, py::arg("adversaries") = std::vector<int>{},
      py::arg("strategy") = "silent", py::arg("graph_json") = std::nullopt,
      py::arg("check_preconditions") = true);

  m.def(
      "is_strongly_r_robust",
      [](const std::string& graph_json, const std::vector<int>& group, int r) {
        return is_strongly_r_robust(graph_from_json(nlohmann::json::parse(graph_json)), group, r);
      });
  m.def("bridged_cliques_graph", [] { return graph_to_json(bridged_cliques_graph()).dump(); });
  m.def("complete_graph", [](int n) { return graph_to_json(complete_graph(n)).dump(); });

  m.def(
      "run_experiment",
      [](const std::string& protocol, const std::vector<double>& sigmas, const std::vector<int>& H,
         int trials, std::uint64_t seed, int clients_per_group, int f, const std::string& adversary,
         bool trace_means, const std::string& out_dir) {
        ExperimentConfig c;
        c.protocol = parse_protocol(protocol);
        c.sigmas = sigmas;
        c.comm_periods = H;
        c.trials = trials;
        c.seed = seed;
        c.clients_per_group = clients_per_group;
        c.f = f;
        c.adversary = adversary;
        c.trace_means = trace_means;
        c.out_dir = out_dir;
        ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = run_experiment(c);
        }
        std::string csv = summary_csv_header() + "\n";
        for (const auto& s : res.summary) csv += to_csv_line(s) + "\n";
        return csv;
      },
      py::arg("protocol") = "fedsel", py::arg("sigmas") = std::vector<double>{1.0},
      py::arg("H") = std::vector<int>{20}, py::arg("trials") = 10, py::arg("seed") = 1,
      py::arg("clients_per_group") = 1, py::arg("f") = 0, py::arg("adversary") = "silent",
      py::arg("trace_means") = false, py::arg("out_dir") = "");
}
