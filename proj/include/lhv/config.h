// Copyright 2026 The lhv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LHV_CONFIG_H
#define LHV_CONFIG_H

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lhv/base_layer.h"
#include "lhv/layers.h"

namespace lhv {

/// Bad user input: malformed config, out-of-range value, bad universe file.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Raw key=value entries with the line each came from (0 for command-line
/// flags). Later assignments override earlier ones.
struct ConfigEntry {
    std::string value;
    int line = 0;
};
using ConfigEntries = std::map<std::string, ConfigEntry>;

/// Parses "key = value" lines; '#' starts a comment, blank lines are
/// skipped. Throws ConfigError naming the line for malformed lines, unknown
/// keys and duplicates.
ConfigEntries parse_config_text(const std::string &text);
ConfigEntries read_config_file(const std::string &path);

/// Keys accepted in config files and as --key flags.
const std::vector<std::string> &config_keys();

struct ExperimentConfig {
    int n = 0;
    int L = 2;
    int M = 100;
    uint64_t trials = 100000;
    std::optional<uint64_t> seed;
    unsigned threads = 0;
    bool tie_weights = false;
    bool balanced = false;
    bool genuine = false;
    bool witness = false;

    /// Named settings: a, b, c, a2, b2.
    std::map<std::string, UnitVector3> settings;

    // Emission parameters.
    double theta = 1.0;
    uint64_t k = 100000;
    int labels = 50;
    double p1 = 1.0;
    double p2 = 1.0;

    /// Grid points per axis for the spline check.
    int grid = 501;

    /// Every key that was set, in canonical text form.
    std::map<std::string, std::string> echo;

    /// Settings in the given name order. Throws ConfigError if one is missing.
    std::vector<UnitVector3> settings_for(const std::vector<std::string> &names) const;
    uint64_t require_seed() const;
};

/// Converts and validates entries. `require_n` makes `n` mandatory.
ExperimentConfig config_from_entries(const ConfigEntries &entries, bool require_n = true);
ExperimentConfig load_config(const std::string &path);

/// "x,y,z" with |norm - 1| <= 1e-9, then scaled to unit length.
UnitVector3 parse_setting(const std::string &text, const std::string &key);

inline constexpr const char *kUniverseSchema = "lhv.universe";
inline constexpr int kUniverseVersion = 1;

nlohmann::json universe_to_json(const LayerUniverse &universe);
/// Throws ConfigError on schema or version mismatch and on invalid layers.
LayerUniverse universe_from_json(const nlohmann::json &doc);
void save_universe(const LayerUniverse &universe, const std::string &path);
LayerUniverse load_universe(const std::string &path);

}  // namespace lhv

#endif
