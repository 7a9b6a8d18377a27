#include "pmdkit/json_io.hpp"

#include <fstream>
#include <sstream>

namespace pmdkit {

namespace {

std::vector<std::string> labels_from(const Json& j, const char* key) {
  std::vector<std::string> labels;
  for (const Json& v : j.at(key)) labels.push_back(v.get<std::string>());
  return labels;
}

Json labeled_matrix_table(const std::vector<std::string>& rows,
                          const std::vector<std::string>& cols,
                          const std::function<const Matrix&(int, int)>& at) {
  Json table = Json::object();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Json inner = Json::object();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      inner[cols[c]] = matrix_to_json(at(static_cast<int>(r),
                                         static_cast<int>(c)));
    }
    table[rows[r]] = std::move(inner);
  }
  return table;
}

}  // namespace

Json pmd_to_json(const Pmd& pmd) {
  Json j;
  j["dim"] = pmd.dim;
  j["programs"] = pmd.programs;
  j["outcomes"] = pmd.outcomes;
  j["effects"] = labeled_matrix_table(
      pmd.programs, pmd.outcomes,
      [&pmd](int x, int a) -> const Matrix& { return pmd.effect(a, x); });
  return j;
}

Pmd pmd_from_json(const Json& j) {
  Pmd pmd;
  pmd.dim = j.at("dim").get<int>();
  pmd.programs = labels_from(j, "programs");
  pmd.outcomes = labels_from(j, "outcomes");
  const Json& effects = j.at("effects");
  pmd.effects.reserve(pmd.programs.size() * pmd.outcomes.size());
  for (const std::string& x : pmd.programs) {
    if (!effects.contains(x)) {
      throw InvalidInputError("PMD JSON: missing effects for program '" + x +
                              "'");
    }
    for (const std::string& a : pmd.outcomes) {
      if (!effects.at(x).contains(a)) {
        throw InvalidInputError("PMD JSON: missing effect (" + a + "|" + x +
                                ")");
      }
      Matrix m = matrix_from_json(effects.at(x).at(a));
      if (m.rows() != pmd.dim || m.cols() != pmd.dim) {
        throw DimensionError("PMD JSON: effect (" + a + "|" + x +
                             ") has wrong shape");
      }
      pmd.effects.push_back(std::move(m));
    }
  }
  return pmd;
}

Json ensemble_to_json(const Ensemble& ensemble) {
  Json j;
  j["dim"] = ensemble.dim;
  j["post_info"] = ensemble.post_info;
  j["answers"] = ensemble.answers;
  j["states"] = labeled_matrix_table(
      ensemble.post_info, ensemble.answers,
      [&ensemble](int w, int z) -> const Matrix& {
        return ensemble.state(w, z);
      });
  return j;
}

Ensemble ensemble_from_json(const Json& j) {
  Ensemble ens;
  ens.dim = j.at("dim").get<int>();
  ens.post_info = labels_from(j, "post_info");
  ens.answers = labels_from(j, "answers");
  const Json& states = j.at("states");
  for (const std::string& w : ens.post_info) {
    if (!states.contains(w)) {
      throw InvalidInputError("ensemble JSON: missing states for '" + w + "'");
    }
    for (const std::string& z : ens.answers) {
      if (!states.at(w).contains(z)) {
        throw InvalidInputError("ensemble JSON: missing state (" + w + "," + z +
                                ")");
      }
      Matrix m = matrix_from_json(states.at(w).at(z));
      if (m.rows() != ens.dim || m.cols() != ens.dim) {
        throw DimensionError("ensemble JSON: state (" + w + "," + z +
                             ") has wrong shape");
      }
      ens.states.push_back(std::move(m));
    }
  }
  return ens;
}

Json game_to_json(const GuessingGame& game) {
  return ensemble_to_json(game.ensemble);
}

GuessingGame game_from_json(const Json& j) {
  return GuessingGame{ensemble_from_json(j)};
}

Json choi_to_json(const ChoiMap& map) {
  Json j;
  j["in_dim"] = map.in_dim;
  j["out_dim"] = map.out_dim;
  j["choi"] = matrix_to_json(map.choi);
  return j;
}

ChoiMap choi_from_json(const Json& j) {
  return ChoiMap(j.at("in_dim").get<int>(), j.at("out_dim").get<int>(),
                 matrix_from_json(j.at("choi")));
}

Json channel_to_json(const ClassicalChannel& channel) {
  Json j;
  j["input_sizes"] = channel.input_sizes;
  j["output_size"] = channel.output_size;
  j["table"] = channel.table;
  return j;
}

ClassicalChannel channel_from_json(const Json& j) {
  ClassicalChannel ch;
  ch.input_sizes = j.at("input_sizes").get<std::vector<int>>();
  ch.output_size = j.at("output_size").get<int>();
  ch.table = j.at("table").get<std::vector<double>>();
  if (ch.table.size() !=
      static_cast<std::size_t>(ch.joint_inputs()) * ch.output_size) {
    throw DimensionError("channel JSON: table size mismatch");
  }
  return ch;
}

Json free_operation_to_json(const FreeOperation& op) {
  Json j;
  j["mu"] = op.randomness;
  Json instruments = Json::array();
  for (const auto& family : op.instruments) {
    Json fam = Json::array();
    for (const ChoiMap& m : family) fam.push_back(choi_to_json(m));
    instruments.push_back(std::move(fam));
  }
  j["instruments"] = std::move(instruments);
  j["pre_channel"] = channel_to_json(op.pre);
  j["post_channel"] = channel_to_json(op.post);
  j["target_programs"] = op.target_programs;
  j["target_outcomes"] = op.target_outcomes;
  return j;
}

FreeOperation free_operation_from_json(const Json& j) {
  FreeOperation op;
  op.randomness = j.at("mu").get<std::vector<double>>();
  for (const Json& fam : j.at("instruments")) {
    std::vector<ChoiMap> family;
    for (const Json& m : fam) family.push_back(choi_from_json(m));
    op.instruments.push_back(std::move(family));
  }
  op.pre = channel_from_json(j.at("pre_channel"));
  op.post = channel_from_json(j.at("post_channel"));
  op.target_programs = labels_from(j, "target_programs");
  op.target_outcomes = labels_from(j, "target_outcomes");
  return op;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInputError("cannot open file: " + path);
  }
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInputError("cannot parse JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("cannot open file for writing: " + path);
  }
  out << j.dump(2) << "\n";
}

}  // namespace pmdkit
