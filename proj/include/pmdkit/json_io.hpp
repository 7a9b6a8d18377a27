#ifndef PMDKIT_JSON_IO_HPP
#define PMDKIT_JSON_IO_HPP

#include "pmdkit/devices.hpp"
#include "pmdkit/json_matrix.hpp"

#include <string>

// JSON schemas for every file the toolkit reads or writes. Loading only
// checks structure (shapes, alphabets, table sizes); physical invariants
// are the validators' job, so an invalid device can be loaded and then
// reported on. All files are UTF-8 with numbers as decimal doubles.

namespace pmdkit {

// {"dim": d, "programs": [...], "outcomes": [...],
//  "effects": {"x0": {"a0": {"re": ..., "im": ...}, ...}, ...}}
Json pmd_to_json(const Pmd& pmd);
Pmd pmd_from_json(const Json& j);

// {"dim": d, "post_info": [...], "answers": [...],
//  "states": {"w0": {"z0": {"re": ..., "im": ...}, ...}, ...}}
Json ensemble_to_json(const Ensemble& ensemble);
Ensemble ensemble_from_json(const Json& j);

Json game_to_json(const GuessingGame& game);
GuessingGame game_from_json(const Json& j);

Json choi_to_json(const ChoiMap& map);
ChoiMap choi_from_json(const Json& j);

Json channel_to_json(const ClassicalChannel& channel);
ClassicalChannel channel_from_json(const Json& j);

// {"mu": [...], "instruments": [[choi, ...], ...],
//  "pre_channel": {...}, "post_channel": {...},
//  "target_programs": [...], "target_outcomes": [...]}
Json free_operation_to_json(const FreeOperation& op);
FreeOperation free_operation_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace pmdkit

#endif  // PMDKIT_JSON_IO_HPP
