#include "pmdkit/convert.hpp"
#include "pmdkit/games.hpp"
#include "pmdkit/jointmeas.hpp"
#include "pmdkit/json_io.hpp"
#include "pmdkit/robustness.hpp"
#include "pmdkit/sampling.hpp"
#include "pmdkit/sdp.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace pmdkit;

namespace {

Pmd pmd_from_json_str(const std::string& text) {
  return pmd_from_json(Json::parse(text));
}

GuessingGame game_from_json_str(const std::string& text) {
  return game_from_json(Json::parse(text));
}

std::vector<std::string> report_issues(const ValidationReport& report) {
  std::vector<std::string> out;
  for (const auto& issue : report.issues) out.push_back(issue.what);
  return out;
}

}  // namespace

PYBIND11_MODULE(_pmdkit, m) {
  m.doc() =
      "Programmable measurement devices: joint measurability, "
      "incompatibility robustness, guessing games with post-information, "
      "and convertibility under free operations.";

  py::register_exception<DimensionError>(m, "DimensionError",
                                         PyExc_ValueError);
  py::register_exception<InvalidInputError>(m, "InvalidInputError",
                                            PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);

  py::class_<Pmd>(m, "Pmd")
      .def(py::init<>())
      .def_readwrite("dim", &Pmd::dim)
      .def_readwrite("programs", &Pmd::programs)
      .def_readwrite("outcomes", &Pmd::outcomes)
      .def_readwrite("effects", &Pmd::effects)
      .def("effect",
           [](const Pmd& pmd, int a, int x) -> Matrix {
             return pmd.effect(a, x);
           },
           py::arg("a"), py::arg("x"))
      .def("to_json", [](const Pmd& pmd) { return pmd_to_json(pmd).dump(2); })
      .def_static("from_json", &pmd_from_json_str)
      .def("__repr__", [](const Pmd& pmd) {
        return "<Pmd dim=" + std::to_string(pmd.dim) + " programs=" +
               std::to_string(pmd.n_programs()) + " outcomes=" +
               std::to_string(pmd.n_outcomes()) + ">";
      });

  py::class_<Ensemble>(m, "Ensemble")
      .def(py::init<>())
      .def_readwrite("dim", &Ensemble::dim)
      .def_readwrite("post_info", &Ensemble::post_info)
      .def_readwrite("answers", &Ensemble::answers)
      .def_readwrite("states", &Ensemble::states)
      .def("state",
           [](const Ensemble& ens, int w, int z) -> Matrix {
             return ens.state(w, z);
           },
           py::arg("w"), py::arg("z"));

  py::class_<GuessingGame>(m, "GuessingGame")
      .def(py::init<>())
      .def_readwrite("ensemble", &GuessingGame::ensemble)
      .def("to_json",
           [](const GuessingGame& g) { return game_to_json(g).dump(2); })
      .def_static("from_json", &game_from_json_str);

  py::class_<Povm>(m, "Povm")
      .def(py::init<>())
      .def_readwrite("effects", &Povm::effects);

  py::class_<SimpleDecomposition>(m, "SimpleDecomposition")
      .def(py::init<>())
      .def_readwrite("parent", &SimpleDecomposition::parent)
      .def_readwrite("programs", &SimpleDecomposition::programs)
      .def_readwrite("outcomes", &SimpleDecomposition::outcomes)
      .def_readwrite("post", &SimpleDecomposition::post)
      .def("post_prob", &SimpleDecomposition::post_prob, py::arg("a"),
           py::arg("i"), py::arg("x"));

  py::class_<ChoiMap>(m, "ChoiMap")
      .def(py::init<int, int, Matrix>(), py::arg("in_dim"),
           py::arg("out_dim"), py::arg("choi"))
      .def_readonly("in_dim", &ChoiMap::in_dim)
      .def_readonly("out_dim", &ChoiMap::out_dim)
      .def_readonly("choi", &ChoiMap::choi);

  py::class_<FreeOperation>(m, "FreeOperation")
      .def(py::init<>())
      .def_readwrite("randomness", &FreeOperation::randomness)
      .def_readwrite("instruments", &FreeOperation::instruments)
      .def_readwrite("target_programs", &FreeOperation::target_programs)
      .def_readwrite("target_outcomes", &FreeOperation::target_outcomes)
      .def("to_json", [](const FreeOperation& op) {
        return free_operation_to_json(op).dump(2);
      })
      .def_static("from_json", [](const std::string& text) {
        return free_operation_from_json(Json::parse(text));
      });

  m.def("validate_pmd",
        [](const Pmd& pmd) {
          const auto report = validate_pmd(pmd);
          return py::make_tuple(report.ok(), report_issues(report));
        },
        "Returns (ok, issues).");
  m.def("apply_free_operation", &apply_free_operation, py::arg("op"),
        py::arg("pmd"));
  m.def("compose_free_operations", &compose_free_operations,
        py::arg("second"), py::arg("first"));
  m.def("identity_operation", &identity_operation, py::arg("pmd"));
  m.def("mix_pmds", &mix_pmds, py::arg("weights"), py::arg("pmds"));

  py::class_<jointmeas::CompatibilityResult>(m, "CompatibilityResult")
      .def_readonly("is_simple", &jointmeas::CompatibilityResult::is_simple)
      .def_readonly("slack", &jointmeas::CompatibilityResult::slack)
      .def_readonly("decomposition",
                    &jointmeas::CompatibilityResult::decomposition)
      .def_readonly("witness", &jointmeas::CompatibilityResult::witness)
      .def_readonly("witness_margin",
                    &jointmeas::CompatibilityResult::witness_margin);
  m.def("check_simple",
        [](const Pmd& pmd) { return jointmeas::check_simple(pmd); },
        py::arg("pmd"));
  m.def("reconstruct", &jointmeas::reconstruct, py::arg("decomposition"));

  py::class_<robustness::RobustnessResult>(m, "RobustnessResult")
      .def_readonly("value", &robustness::RobustnessResult::value)
      .def_readonly("noise", &robustness::RobustnessResult::noise)
      .def_readonly("parent", &robustness::RobustnessResult::parent)
      .def_readonly("dual_value", &robustness::RobustnessResult::dual_value)
      .def_readonly("gap", &robustness::RobustnessResult::gap);
  py::class_<robustness::RobustnessWitness>(m, "RobustnessWitness")
      .def_readonly("dim", &robustness::RobustnessWitness::dim)
      .def_readonly("programs", &robustness::RobustnessWitness::programs)
      .def_readonly("outcomes", &robustness::RobustnessWitness::outcomes)
      .def_readonly("gamma", &robustness::RobustnessWitness::gamma)
      .def_readonly("omega", &robustness::RobustnessWitness::omega)
      .def_readonly("normalization",
                    &robustness::RobustnessWitness::normalization);
  py::class_<robustness::DualResult>(m, "DualResult")
      .def_readonly("value", &robustness::DualResult::value)
      .def_readonly("witness", &robustness::DualResult::witness);
  py::class_<robustness::AdvantageReport>(m, "AdvantageReport")
      .def_readonly("robustness", &robustness::AdvantageReport::robustness)
      .def_readonly("direct_payoff",
                    &robustness::AdvantageReport::direct_payoff)
      .def_readonly("simple_value",
                    &robustness::AdvantageReport::simple_value)
      .def_readonly("ratio", &robustness::AdvantageReport::ratio)
      .def_readonly("difference", &robustness::AdvantageReport::difference)
      .def_readonly("classical_ratio",
                    &robustness::AdvantageReport::classical_ratio)
      .def_readonly("passed", &robustness::AdvantageReport::pass);
  m.def("robustness_primal",
        [](const Pmd& pmd) { return robustness::primal(pmd); },
        py::arg("pmd"));
  m.def("robustness_dual",
        [](const Pmd& pmd) { return robustness::dual(pmd); }, py::arg("pmd"));
  m.def("witness_to_game", &robustness::witness_to_game, py::arg("witness"));
  m.def("verify_advantage_identity",
        [](const Pmd& pmd) {
          return robustness::verify_advantage_identity(pmd);
        },
        py::arg("pmd"));

  py::class_<games::ClassicalStrategy>(m, "ClassicalStrategy")
      .def_readonly("program_for_post_info",
                    &games::ClassicalStrategy::program_for_post_info)
      .def_readonly("answer_for_outcome",
                    &games::ClassicalStrategy::answer_for_outcome);
  py::class_<games::StrategyValue>(m, "StrategyValue")
      .def_readonly("value", &games::StrategyValue::value)
      .def_readonly("classical", &games::StrategyValue::classical)
      .def_readonly("function_povm", &games::StrategyValue::function_povm)
      .def_readonly("response", &games::StrategyValue::response)
      .def_readonly("lower_bound_only",
                    &games::StrategyValue::lower_bound_only)
      .def_readonly("converged", &games::StrategyValue::converged);
  m.def("pguess_classical", &games::pguess_classical, py::arg("pmd"),
        py::arg("game"));
  m.def("pguess_simple",
        [](const GuessingGame& game) { return games::pguess_simple(game); },
        py::arg("game"));
  m.def("pguess_seesaw",
        [](const Pmd& pmd, const GuessingGame& game, int instrument_outcomes,
           int restarts, std::uint64_t seed) {
          games::SeesawOptions opts;
          opts.instrument_outcomes = instrument_outcomes;
          opts.restarts = restarts;
          opts.seed = seed;
          return games::pguess_seesaw(pmd, game, opts);
        },
        py::arg("pmd"), py::arg("game"), py::arg("instrument_outcomes") = 0,
        py::arg("restarts") = 4, py::arg("seed") = 1);
  py::class_<games::WitnessOutcome>(m, "WitnessOutcome")
      .def_readonly("incompatible", &games::WitnessOutcome::incompatible)
      .def_readonly("margin", &games::WitnessOutcome::margin)
      .def_readonly("max_excess", &games::WitnessOutcome::max_excess)
      .def_readonly("game", &games::WitnessOutcome::game);
  m.def("incompatibility_witness_check",
        [](const Pmd& pmd, int sample_games, std::uint64_t seed) {
          games::WitnessCheckOptions opts;
          opts.sample_games = sample_games;
          opts.seed = seed;
          return games::incompatibility_witness_check(pmd, opts);
        },
        py::arg("pmd"), py::arg("sample_games") = 50, py::arg("seed") = 7);

  py::enum_<convert::Verdict>(m, "Verdict")
      .value("CONVERTIBLE", convert::Verdict::Convertible)
      .value("NOT_CONVERTIBLE_CLASSICAL",
             convert::Verdict::NotConvertibleClassical)
      .value("UNDECIDED", convert::Verdict::Undecided);
  py::class_<convert::ConversionCertificate>(m, "ConversionCertificate")
      .def_readonly("verdict", &convert::ConversionCertificate::verdict)
      .def_readonly("protocol", &convert::ConversionCertificate::protocol)
      .def_readonly("protocol_error",
                    &convert::ConversionCertificate::protocol_error)
      .def_readonly("witness_game",
                    &convert::ConversionCertificate::witness_game)
      .def_readonly("margin", &convert::ConversionCertificate::margin);
  m.def("convertibility_lp", &convert::convertibility_lp, py::arg("src"),
        py::arg("dst"));
  m.def("simple_interconvert", &convert::simple_interconvert,
        py::arg("src_decomposition"), py::arg("dst_decomposition"));
  m.def("refute_by_game_search",
        [](const Pmd& src, const Pmd& dst, int restarts, std::uint64_t seed) {
          convert::RefuteOptions opts;
          opts.restarts = restarts;
          opts.seed = seed;
          return convert::refute_by_game_search(src, dst, opts);
        },
        py::arg("src"), py::arg("dst"), py::arg("restarts") = 6,
        py::arg("seed") = 11);

  m.def("noisy_mub_pmd", &noisy_mub_pmd, py::arg("eta"), py::arg("dim") = 2);
  m.def("bb84_game", &bb84_game);
  m.def("random_pmd",
        [](int dim, int n_programs, int n_outcomes, std::uint64_t seed) {
          Rng rng(seed);
          return random_pmd(dim, n_programs, n_outcomes, rng);
        },
        py::arg("dim"), py::arg("n_programs"), py::arg("n_outcomes"),
        py::arg("seed"));
  m.def("random_simple_pmd",
        [](int dim, int n_programs, int n_outcomes, int n_parent,
           std::uint64_t seed) {
          Rng rng(seed);
          const auto sample =
              random_simple_pmd(dim, n_programs, n_outcomes, n_parent, rng);
          return py::make_tuple(sample.pmd, sample.decomposition);
        },
        py::arg("dim"), py::arg("n_programs"), py::arg("n_outcomes"),
        py::arg("n_parent"), py::arg("seed"));
  m.def("random_ensemble",
        [](int dim, int n_post_info, int n_answers, std::uint64_t seed) {
          Rng rng(seed);
          return random_ensemble(dim, n_post_info, n_answers, rng);
        },
        py::arg("dim"), py::arg("n_post_info"), py::arg("n_answers"),
        py::arg("seed"));
  m.def("random_free_operation",
        [](int source_dim, int n_source_programs, int n_source_outcomes,
           int target_dim, int n_target_programs, int n_target_outcomes,
           int n_random, int n_instrument_outcomes, std::uint64_t seed) {
          Rng rng(seed);
          return random_free_operation(
              source_dim, n_source_programs, n_source_outcomes, target_dim,
              n_target_programs, n_target_outcomes, n_random,
              n_instrument_outcomes, rng);
        },
        py::arg("source_dim"), py::arg("n_source_programs"),
        py::arg("n_source_outcomes"), py::arg("target_dim"),
        py::arg("n_target_programs"), py::arg("n_target_outcomes"),
        py::arg("n_random") = 2, py::arg("n_instrument_outcomes") = 2,
        py::arg("seed") = 1);
}
