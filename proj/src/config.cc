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

#include "lhv/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lhv {

namespace {

std::string trim(const std::string &s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string where(const std::string &key, const ConfigEntry &entry) {
    if (entry.line > 0) {
        return "line " + std::to_string(entry.line) + ": key `" + key + "`";
    }
    return "key `" + key + "`";
}

template <typename T>
T parse_integer(const std::string &key, const ConfigEntry &entry) {
    T value{};
    const std::string &s = entry.value;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError(where(key, entry) + ": expected an integer, got '" + s + "'");
    }
    return value;
}

double parse_real(const std::string &key, const std::string &text, const ConfigEntry &entry) {
    std::string s = trim(text);
    size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(value)) {
        throw ConfigError(where(key, entry) + ": expected a number, got '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string &key, const ConfigEntry &entry) {
    std::string s = entry.value;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        return false;
    }
    throw ConfigError(where(key, entry) + ": expected true or false, got '" + entry.value + "'");
}

std::vector<double> parse_list(const std::string &key, const ConfigEntry &entry) {
    std::vector<double> out;
    std::stringstream ss(entry.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_real(key, item, entry));
    }
    return out;
}

std::string format_real(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string format_setting(const UnitVector3 &v) {
    return format_real(v[0]) + "," + format_real(v[1]) + "," + format_real(v[2]);
}

UnitVector3 setting_from_list(const std::vector<double> &xyz, const std::string &context) {
    if (xyz.size() != 3) {
        throw ConfigError(context + ": expected three comma-separated components");
    }
    double norm = std::sqrt(xyz[0] * xyz[0] + xyz[1] * xyz[1] + xyz[2] * xyz[2]);
    if (std::abs(norm - 1.0) > 1e-9) {
        throw ConfigError(context + ": setting has norm " + format_real(norm) + ", expected 1 within 1e-9");
    }
    return UnitVector3::normalized(xyz[0], xyz[1], xyz[2]);
}

}  // namespace

const std::vector<std::string> &config_keys() {
    static const std::vector<std::string> keys = {
        "n",     "L",      "M",           "trials", "seed", "threads", "tie_weights", "balanced",
        "genuine", "witness", "a",         "b",      "c",    "a2",      "b2",          "angle",
        "angles", "spin_angles", "theta",  "k",      "labels", "p1",    "p2",          "grid",
    };
    return keys;
}

ConfigEntries parse_config_text(const std::string &text) {
    const auto &keys = config_keys();
    ConfigEntries entries;
    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        std::string content = raw.substr(0, raw.find('#'));
        content = trim(content);
        if (content.empty()) {
            continue;
        }
        auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected key = value, got '" + content + "'");
        }
        std::string key = trim(content.substr(0, eq));
        std::string value = trim(content.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": missing key before '='");
        }
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError("line " + std::to_string(line) + ": unknown key `" + key + "`");
        }
        if (value.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": key `" + key + "` has no value");
        }
        if (entries.count(key)) {
            throw ConfigError("line " + std::to_string(line) + ": key `" + key + "` repeats line " +
                              std::to_string(entries[key].line));
        }
        entries[key] = ConfigEntry{value, line};
    }
    return entries;
}

ConfigEntries read_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config_text(buffer.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

UnitVector3 parse_setting(const std::string &text, const std::string &key) {
    ConfigEntry entry{text, 0};
    return setting_from_list(parse_list(key, entry), "key `" + key + "`");
}

ExperimentConfig config_from_entries(const ConfigEntries &entries, bool require_n) {
    ExperimentConfig cfg;
    auto find = [&](const std::string &key) -> const ConfigEntry * {
        auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };

    if (const auto *e = find("n")) {
        cfg.n = parse_integer<int>("n", *e);
        if (cfg.n < 4) {
            throw ConfigError(where("n", *e) + ": n = " + e->value + " but the spline construction requires n >= 4");
        }
        cfg.echo["n"] = std::to_string(cfg.n);
    } else if (require_n) {
        throw ConfigError("missing required key `n` (spline resolution, n >= 4)");
    }
    if (const auto *e = find("L")) {
        cfg.L = parse_integer<int>("L", *e);
        if (cfg.L < 1) {
            throw ConfigError(where("L", *e) + ": requires L >= 1");
        }
        cfg.echo["L"] = std::to_string(cfg.L);
    }
    if (const auto *e = find("M")) {
        cfg.M = parse_integer<int>("M", *e);
        if (cfg.M < 1) {
            throw ConfigError(where("M", *e) + ": requires M >= 1 layer pair");
        }
        cfg.echo["M"] = std::to_string(cfg.M);
    }
    if (const auto *e = find("trials")) {
        if (!e->value.empty() && e->value[0] == '-') {
            throw ConfigError(where("trials", *e) + ": requires trials >= 1");
        }
        cfg.trials = parse_integer<uint64_t>("trials", *e);
        if (cfg.trials < 1) {
            throw ConfigError(where("trials", *e) + ": requires trials >= 1");
        }
        cfg.echo["trials"] = std::to_string(cfg.trials);
    }
    if (const auto *e = find("seed")) {
        cfg.seed = parse_integer<uint64_t>("seed", *e);
        cfg.echo["seed"] = std::to_string(*cfg.seed);
    }
    if (const auto *e = find("threads")) {
        cfg.threads = parse_integer<unsigned>("threads", *e);
        cfg.echo["threads"] = std::to_string(cfg.threads);
    }
    for (auto [key, flag] : {std::pair{"tie_weights", &cfg.tie_weights}, std::pair{"balanced", &cfg.balanced},
                             std::pair{"genuine", &cfg.genuine}, std::pair{"witness", &cfg.witness}}) {
        if (const auto *e = find(key)) {
            *flag = parse_bool(key, *e);
            cfg.echo[key] = *flag ? "true" : "false";
        }
    }

    for (const char *key : {"a", "b", "c", "a2", "b2"}) {
        if (const auto *e = find(key)) {
            cfg.settings.insert_or_assign(key, setting_from_list(parse_list(key, *e), where(key, *e)));
        }
    }
    if (const auto *e = find("angle")) {
        double degrees = parse_real("angle", e->value, *e);
        for (const char *key : {"a", "b"}) {
            if (cfg.settings.count(key)) {
                throw ConfigError(where("angle", *e) + ": conflicts with explicit setting `" + key + "`");
            }
        }
        cfg.settings.insert_or_assign("a", UnitVector3::from_angle_degrees(0.0));
        cfg.settings.insert_or_assign("b", UnitVector3::from_angle_degrees(degrees));
        cfg.echo["angle"] = format_real(degrees);
    }
    bool spin_angles = false;
    if (const auto *e = find("spin_angles")) {
        spin_angles = parse_bool("spin_angles", *e);
        cfg.echo["spin_angles"] = spin_angles ? "true" : "false";
    }
    if (const auto *e = find("angles")) {
        std::vector<double> angles = parse_list("angles", *e);
        if (angles.size() != 4) {
            throw ConfigError(where("angles", *e) + ": expected four angles a, a', b, b' in degrees");
        }
        const char *names[4] = {"a", "a2", "b", "b2"};
        for (int j = 0; j < 4; ++j) {
            if (cfg.settings.count(names[j])) {
                throw ConfigError(where("angles", *e) + ": conflicts with explicit setting `" + names[j] + "`");
            }
            // Polarizer angles map to twice the angle on the sphere.
            double degrees = spin_angles ? angles[j] : 2.0 * angles[j];
            cfg.settings.insert_or_assign(names[j], UnitVector3::from_angle_degrees(degrees));
        }
        cfg.echo["angles"] = e->value;
    }
    for (const auto &[name, v] : cfg.settings) {
        cfg.echo[name] = format_setting(v);
    }

    if (const auto *e = find("theta")) {
        cfg.theta = parse_real("theta", e->value, *e);
        if (!(cfg.theta > 0.0)) {
            throw ConfigError(where("theta", *e) + ": requires theta > 0");
        }
        cfg.echo["theta"] = format_real(cfg.theta);
    }
    if (const auto *e = find("k")) {
        if (!e->value.empty() && e->value[0] == '-') {
            throw ConfigError(where("k", *e) + ": requires k >= 1");
        }
        cfg.k = parse_integer<uint64_t>("k", *e);
        if (cfg.k < 1) {
            throw ConfigError(where("k", *e) + ": requires k >= 1");
        }
        cfg.echo["k"] = std::to_string(cfg.k);
    }
    if (const auto *e = find("labels")) {
        cfg.labels = parse_integer<int>("labels", *e);
        if (cfg.labels < 1) {
            throw ConfigError(where("labels", *e) + ": requires labels >= 1");
        }
        cfg.echo["labels"] = std::to_string(cfg.labels);
    }
    for (auto [key, p] : {std::pair{"p1", &cfg.p1}, std::pair{"p2", &cfg.p2}}) {
        if (const auto *e = find(key)) {
            *p = parse_real(key, e->value, *e);
            if (!(*p > 0.0 && *p <= 1.0)) {
                throw ConfigError(where(key, *e) + ": readiness probability must lie in (0, 1]");
            }
            cfg.echo[key] = format_real(*p);
        }
    }
    if (const auto *e = find("grid")) {
        cfg.grid = parse_integer<int>("grid", *e);
        if (cfg.grid < 2) {
            throw ConfigError(where("grid", *e) + ": requires grid >= 2");
        }
        cfg.echo["grid"] = std::to_string(cfg.grid);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    ConfigEntries entries = read_config_file(path);
    try {
        return config_from_entries(entries);
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::vector<UnitVector3> ExperimentConfig::settings_for(const std::vector<std::string> &names) const {
    std::vector<UnitVector3> out;
    for (const auto &name : names) {
        auto it = settings.find(name);
        if (it == settings.end()) {
            throw ConfigError("missing required setting `" + name + "`");
        }
        out.push_back(it->second);
    }
    return out;
}

uint64_t ExperimentConfig::require_seed() const {
    if (!seed) {
        throw ConfigError("missing required key `seed`; seeds must be given explicitly");
    }
    return *seed;
}

nlohmann::json universe_to_json(const LayerUniverse &universe) {
    nlohmann::json pairs = nlohmann::json::array();
    for (int m = 1; m <= universe.pair_count(); ++m) {
        const LayerDescriptor &layer = universe.layer(2 * m - 1);
        pairs.push_back({
            {"column_of", layer.column_map()},
            {"row_of", layer.row_map()},
            {"weights", layer.weights().values()},
        });
    }
    return {
        {"schema", kUniverseSchema},
        {"version", kUniverseVersion},
        {"n", universe.n()},
        {"L", universe.L()},
        {"tie_weights", universe.tie_weights()},
        {"balanced", universe.balanced()},
        {"pairs", pairs},
    };
}

LayerUniverse universe_from_json(const nlohmann::json &doc) {
    try {
        if (!doc.is_object() || doc.value("schema", std::string()) != kUniverseSchema) {
            throw ConfigError(std::string("not a universe file: expected schema '") + kUniverseSchema + "'");
        }
        int version = doc.at("version").get<int>();
        if (version != kUniverseVersion) {
            throw ConfigError("universe file has schema version " + std::to_string(version) +
                              " but this build reads version " + std::to_string(kUniverseVersion));
        }
        int n = doc.at("n").get<int>();
        int L = doc.at("L").get<int>();
        if (n < 4) {
            throw ConfigError("universe file has n = " + std::to_string(n) + "; requires n >= 4");
        }
        std::vector<LayerDescriptor> originals;
        for (const auto &pair : doc.at("pairs")) {
            originals.emplace_back(n, pair.at("column_of").get<std::vector<int>>(),
                                   pair.at("row_of").get<std::vector<int>>(),
                                   WeightVector(pair.at("weights").get<std::vector<double>>()), 1);
        }
        return LayerUniverse(n, L, doc.at("tie_weights").get<bool>(), doc.at("balanced").get<bool>(),
                             std::move(originals));
    } catch (const ConfigError &) {
        throw;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed universe file: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("invalid universe file: ") + e.what());
    } catch (const std::domain_error &e) {
        throw ConfigError(std::string("invalid universe file: ") + e.what());
    }
}

void save_universe(const LayerUniverse &universe, const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write universe file '" + path + "'");
    }
    out << universe_to_json(universe).dump(1) << '\n';
}

LayerUniverse load_universe(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read universe file '" + path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path + ": malformed JSON: " + e.what());
    }
    try {
        return universe_from_json(doc);
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace lhv
