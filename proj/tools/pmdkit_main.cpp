#include "pmdkit/convert.hpp"
#include "pmdkit/games.hpp"
#include "pmdkit/jointmeas.hpp"
#include "pmdkit/json_io.hpp"
#include "pmdkit/robustness.hpp"
#include "pmdkit/sampling.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

// Exit codes: 0 success / affirmative verdict, 1 negative domain verdict
// (invalid device, incompatible, not convertible, identity check failed),
// 2 usage or input error, 3 numerical failure.

namespace {

using namespace pmdkit;

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void print_row(const std::string& key, const std::string& value) {
  std::printf("%-16s %s\n", key.c_str(), value.c_str());
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PMDKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidInputError("PMDKIT_SEED is not an unsigned integer");
    }
  }
  return 1;
}

void emit(const Json& payload, bool as_json) {
  if (as_json) {
    std::cout << payload.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : payload.items()) {
    if (value.is_number_float()) {
      print_row(key, fmt12(value.get<double>()));
    } else if (value.is_boolean()) {
      print_row(key, value.get<bool>() ? "yes" : "no");
    } else if (value.is_string()) {
      print_row(key, value.get<std::string>());
    } else {
      print_row(key, value.dump());
    }
  }
}

Pmd load_pmd_or_report(const std::string& path, bool as_json, int& code) {
  const Pmd pmd = pmd_from_json(read_json_file(path));
  const ValidationReport report = validate_pmd(pmd);
  if (!report.ok()) {
    std::cerr << path << ": invalid device: " << report.summary() << "\n";
    if (as_json) {
      Json j;
      j["valid"] = false;
      j["issues"] = Json::array();
      for (const auto& issue : report.issues) {
        j["issues"].push_back(
            Json{{"what", issue.what}, {"magnitude", issue.magnitude}});
      }
      std::cout << j.dump(2) << "\n";
    }
    code = 1;
  }
  return pmd;
}

int run_validate(const std::string& path, bool as_json) {
  const Pmd pmd = pmd_from_json(read_json_file(path));
  const ValidationReport report = validate_pmd(pmd);
  Json j;
  j["valid"] = report.ok();
  j["issues"] = Json::array();
  for (const auto& issue : report.issues) {
    j["issues"].push_back(
        Json{{"what", issue.what}, {"magnitude", issue.magnitude}});
  }
  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    print_row("valid", report.ok() ? "yes" : "no");
    for (const auto& issue : report.issues) {
      print_row("issue", issue.what + " (" + fmt12(issue.magnitude) + ")");
    }
  }
  return report.ok() ? 0 : 1;
}

int run_compat(const std::string& path, bool as_json) {
  int code = 0;
  const Pmd pmd = load_pmd_or_report(path, as_json, code);
  if (code != 0) return code;
  const auto result = jointmeas::check_simple(pmd);
  Json j;
  j["simple"] = result.is_simple;
  j["slack"] = result.slack;
  if (!result.is_simple) j["witness_margin"] = result.witness_margin;
  emit(j, as_json);
  return result.is_simple ? 0 : 1;
}

int run_robustness(const std::string& path, double tol, bool as_json) {
  int code = 0;
  const Pmd pmd = load_pmd_or_report(path, as_json, code);
  if (code != 0) return code;
  robustness::RobustnessOptions opts;
  if (tol > 0) {
    opts.solver.gap_tol = tol;
    opts.solver.feas_tol = tol;
  }
  const auto p = robustness::primal(pmd, opts);
  const auto d = robustness::dual(pmd, opts);
  Json j;
  j["robustness"] = p.value;
  j["dual_value"] = d.value;
  j["primal_dual_gap"] = std::abs(p.value - d.value);
  emit(j, as_json);
  return 0;
}

int run_witness(const std::string& path, const std::string& out_path,
                bool as_json) {
  int code = 0;
  const Pmd pmd = load_pmd_or_report(path, as_json, code);
  if (code != 0) return code;
  const auto d = robustness::dual(pmd);
  const GuessingGame game = robustness::witness_to_game(d.witness);
  write_json_file(out_path, game_to_json(game));
  double direct = 0.0;
  for (int x = 0; x < pmd.n_programs(); ++x) {
    for (int a = 0; a < pmd.n_outcomes(); ++a) {
      direct += (pmd.effect(a, x) * game.ensemble.state(x, a)).trace().real();
    }
  }
  const double benchmark = games::pguess_simple(game).value;
  Json j;
  j["robustness"] = d.value;
  j["direct_payoff"] = direct;
  j["simple_value"] = benchmark;
  j["advantage"] = direct - benchmark;
  j["game_file"] = out_path;
  emit(j, as_json);
  return (direct - benchmark > 1e-7) ? 0 : 1;
}

int run_pguess(const std::string& pmd_path, const std::string& game_path,
               bool simple, bool seesaw, int restarts, std::uint64_t seed,
               bool as_json) {
  int code = 0;
  const Pmd pmd = load_pmd_or_report(pmd_path, as_json, code);
  if (code != 0) return code;
  const GuessingGame game = game_from_json(read_json_file(game_path));
  const ValidationReport report = validate_ensemble(game.ensemble);
  if (!report.ok()) {
    std::cerr << game_path << ": invalid game: " << report.summary() << "\n";
    return 1;
  }
  Json j;
  if (simple) {
    j["evaluator"] = "simple";
    j["value"] = games::pguess_simple(game).value;
  } else if (seesaw) {
    games::SeesawOptions opts;
    opts.restarts = restarts;
    opts.seed = seed;
    const auto sv = games::pguess_seesaw(pmd, game, opts);
    j["evaluator"] = "seesaw";
    j["value"] = sv.value;
    j["lower_bound_only"] = true;
    j["converged"] = sv.converged;
    j["restarts"] = restarts;
    j["seed"] = seed;
  } else {
    const auto sv = games::pguess_classical(pmd, game);
    j["evaluator"] = "classical";
    j["value"] = sv.value;
    Json programs = Json::array();
    for (int x : sv.classical->program_for_post_info) {
      programs.push_back(pmd.programs[x]);
    }
    j["program_choice"] = programs;
  }
  emit(j, as_json);
  return 0;
}

int run_convert(const std::string& src_path, const std::string& dst_path,
                bool refute, const std::string& out_path, std::uint64_t seed,
                bool as_json) {
  int code = 0;
  const Pmd src = load_pmd_or_report(src_path, as_json, code);
  if (code != 0) return code;
  const Pmd dst = load_pmd_or_report(dst_path, as_json, code);
  if (code != 0) return code;

  convert::ConversionCertificate cert;
  if (refute) {
    convert::RefuteOptions opts;
    opts.seed = seed;
    cert = convert::refute_by_game_search(src, dst, opts);
  } else {
    cert = convert::convertibility_lp(src, dst);
  }

  Json j;
  j["verdict"] = convert::to_string(cert.verdict);
  j["margin"] = cert.margin;
  if (cert.protocol.has_value()) {
    j["protocol_error"] = cert.protocol_error;
    j["protocol"] = free_operation_to_json(*cert.protocol);
  }
  if (cert.witness_game.has_value()) {
    j["witness_game"] = game_to_json(*cert.witness_game);
  }
  if (!out_path.empty()) {
    write_json_file(out_path, j);
  }
  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    print_row("verdict", convert::to_string(cert.verdict));
    print_row("margin", fmt12(cert.margin));
    if (cert.protocol.has_value()) {
      print_row("protocol_error", fmt12(cert.protocol_error));
    }
  }
  return cert.verdict == convert::Verdict::NotConvertibleClassical ? 1 : 0;
}

int run_verify_identity(const std::string& path, bool as_json) {
  int code = 0;
  const Pmd pmd = load_pmd_or_report(path, as_json, code);
  if (code != 0) return code;
  const auto report = robustness::verify_advantage_identity(pmd);
  Json j;
  j["robustness"] = report.robustness;
  j["one_plus_r"] = 1.0 + report.robustness;
  j["ratio"] = report.ratio;
  j["difference"] = report.difference;
  j["direct_payoff"] = report.direct_payoff;
  j["simple_value"] = report.simple_value;
  j["classical_ratio"] = report.classical_ratio;
  j["pass"] = report.pass;
  emit(j, as_json);
  return report.pass ? 0 : 1;
}

int run_demo(const std::string& which, double eta, int dim,
             const std::string& out_path, bool as_json) {
  if (which != "noisy-mub") {
    std::cerr << "unknown demo '" << which << "' (available: noisy-mub)\n";
    return 2;
  }
  const Pmd pmd = noisy_mub_pmd(eta, dim);
  const Json j = pmd_to_json(pmd);
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json_file(out_path, j);
    Json note;
    note["written"] = out_path;
    note["eta"] = eta;
    note["dim"] = dim;
    emit(note, as_json);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pmdkit: joint measurability, incompatibility robustness, "
               "guessing games, and convertibility for programmable "
               "measurement devices"};
  app.require_subcommand(1);

  std::string format = "table";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "table"}));

  std::string pmd_path, game_path, src_path, dst_path, out_path;
  double tol = 0.0;
  double eta = 0.5;
  int dim = 2;
  bool flag_simple = false, flag_seesaw = false, flag_refute = false;
  int restarts = 4;
  std::uint64_t seed = 0;

  auto* cmd_validate =
      app.add_subcommand("validate", "Check a device file against its invariants");
  cmd_validate->add_option("pmd", pmd_path, "Device JSON file")->required();

  auto* cmd_compat =
      app.add_subcommand("compat", "Decide joint measurability");
  cmd_compat->add_option("pmd", pmd_path, "Device JSON file")->required();

  auto* cmd_rob = app.add_subcommand(
      "robustness", "Incompatibility robustness via both conic programs");
  cmd_rob->add_option("pmd", pmd_path, "Device JSON file")->required();
  cmd_rob->add_option("--tol", tol, "Solver tolerance override");

  auto* cmd_witness = app.add_subcommand(
      "witness", "Extract the optimal witness game from the dual program");
  cmd_witness->add_option("pmd", pmd_path, "Device JSON file")->required();
  cmd_witness->add_option("-o,--output", out_path, "Game JSON output file")
      ->required();

  auto* cmd_pguess =
      app.add_subcommand("pguess", "Evaluate a guessing game");
  cmd_pguess->add_option("pmd", pmd_path, "Device JSON file")->required();
  cmd_pguess->add_option("game", game_path, "Game JSON file")->required();
  cmd_pguess->add_flag("--simple", flag_simple,
                       "Simple-device benchmark (function-POVM program)");
  cmd_pguess->add_flag("--seesaw", flag_seesaw,
                       "Alternating lower bound with quantum pre-processing");
  cmd_pguess->add_option("--restarts", restarts, "See-saw restarts");
  cmd_pguess->add_option("--seed", seed, "See-saw seed");

  auto* cmd_convert =
      app.add_subcommand("convert", "Decide convertibility between devices");
  cmd_convert->add_option("src", src_path, "Source device JSON")->required();
  cmd_convert->add_option("dst", dst_path, "Target device JSON")->required();
  cmd_convert->add_flag("--refute", flag_refute,
                        "Search witness games instead of the exact LP");
  cmd_convert->add_option("-o,--output", out_path, "Certificate JSON output");
  cmd_convert->add_option("--seed", seed, "Search seed");

  auto* cmd_verify = app.add_subcommand(
      "verify-thm2", "Check the robustness/advantage-ratio identity");
  cmd_verify->add_option("pmd", pmd_path, "Device JSON file")->required();

  auto* cmd_demo = app.add_subcommand("demo", "Emit a demo device");
  std::string demo_name;
  cmd_demo->add_option("name", demo_name, "Demo name (noisy-mub)")->required();
  cmd_demo->add_option("--eta", eta, "Sharpness in [0,1]")->required();
  cmd_demo->add_option("--dim", dim, "Hilbert space dimension");
  cmd_demo->add_option("-o,--output", out_path, "Device JSON output file");

  for (CLI::App* sub :
       {cmd_validate, cmd_compat, cmd_rob, cmd_witness, cmd_pguess,
        cmd_convert, cmd_verify, cmd_demo}) {
    sub->fallthrough();  // let --format trail the subcommand
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const bool as_json = (format == "json");
  try {
    if (seed == 0) seed = default_seed();
    if (cmd_validate->parsed()) return run_validate(pmd_path, as_json);
    if (cmd_compat->parsed()) return run_compat(pmd_path, as_json);
    if (cmd_rob->parsed()) return run_robustness(pmd_path, tol, as_json);
    if (cmd_witness->parsed()) return run_witness(pmd_path, out_path, as_json);
    if (cmd_pguess->parsed()) {
      if (flag_simple && flag_seesaw) {
        std::cerr << "--simple and --seesaw are mutually exclusive\n";
        return 2;
      }
      return run_pguess(pmd_path, game_path, flag_simple, flag_seesaw,
                        restarts, seed, as_json);
    }
    if (cmd_convert->parsed()) {
      return run_convert(src_path, dst_path, flag_refute, out_path, seed,
                         as_json);
    }
    if (cmd_verify->parsed()) return run_verify_identity(pmd_path, as_json);
    if (cmd_demo->parsed()) {
      return run_demo(demo_name, eta, dim, out_path, as_json);
    }
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DimensionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "JSON error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
