#pragma once

#include <string>

#include "ct/tracker.hpp"

namespace ct {

// All run parameters behind one flat key=value file. A deserialized config
// re-serializes byte-identically.
struct RunConfig {
    TrackerParams tracker;
};

RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);
void save_config(const std::string& path, const RunConfig& cfg);

// Applies one `key=value` override; throws ParseError on unknown keys or
// malformed values.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace ct
