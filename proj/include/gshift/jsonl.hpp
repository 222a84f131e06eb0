#pragma once
// JSONL (one JSON object per line) serialization of configurations. Doubles
// are printed in shortest round-trip form, so coordinates survive a
// write/read cycle bit-exactly.
#include <json.hpp>

#include <string>
#include <vector>

#include "gshift/core.hpp"

namespace gshift {

using json = nlohmann::ordered_json;

json spin_to_json(const Spin& s);
Spin spin_from_json(const json& j);

json config_to_json(const MarkedConfiguration& cfg);
MarkedConfiguration config_from_json(const json& j);

std::string config_to_line(const MarkedConfiguration& cfg);
MarkedConfiguration config_from_line(const std::string& line);

void write_configs_jsonl(const std::string& path, const std::vector<MarkedConfiguration>& cfgs);
std::vector<MarkedConfiguration> read_configs_jsonl(const std::string& path);

}  // namespace gshift
