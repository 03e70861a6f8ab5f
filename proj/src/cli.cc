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

#include "lhv/cli.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "CLI11.hpp"
#include "json.hpp"
#include "lhv/analysis.h"
#include "lhv/config.h"
#include "lhv/emission.h"
#include "lhv/sampler.h"

namespace lhv {

namespace {

using nlohmann::json;

struct Request {
    std::string command;
    ConfigEntries entries;
    std::string config_path;
    std::string out_path;
    std::string csv_path;
    std::string universe_path;
};

// A CSV side file: header line plus rows.
struct Csv {
    std::string header;
    std::vector<std::string> rows;
};

struct Outcome {
    json result;
    std::optional<Csv> csv;
    int exit_code = kExitOk;
};

std::string flag_of(const std::string &key) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    return "--" + flag;
}

const std::map<std::string, std::string> &key_help() {
    static const std::map<std::string, std::string> help = {
        {"n", "spline resolution, n >= 4"},
        {"L", "number of weight intervals"},
        {"M", "number of sampled layer pairs"},
        {"trials", "Monte Carlo trials per correlation"},
        {"seed", "64-bit random seed (required for random commands)"},
        {"threads", "worker threads, 0 = all cores (results do not depend on it)"},
        {"tie_weights", "share one weight vector across all layers"},
        {"balanced", "expand each sampled layer into all cyclic rotations"},
        {"genuine", "use the exactly normalized first-layer variant"},
        {"witness", "also report the value with companion layers removed"},
        {"a", "setting a as x,y,z"},
        {"b", "setting b as x,y,z"},
        {"c", "alternate setting c as x,y,z"},
        {"a2", "setting a' as x,y,z"},
        {"b2", "setting b' as x,y,z"},
        {"angle", "a = (1,0,0), b = (cos t, sin t, 0) for t in degrees"},
        {"angles", "polarizer angles a,a',b,b' in degrees"},
        {"spin_angles", "take --angles as angles between setting vectors"},
        {"theta", "mean waiting time between emissions"},
        {"k", "number of emissions"},
        {"labels", "number of labels N"},
        {"p1", "readiness probability at station 1"},
        {"p2", "readiness probability at station 2"},
        {"grid", "grid points per axis"},
    };
    return help;
}

const std::vector<std::string> kBoolKeys = {"tie_weights", "balanced", "genuine", "witness", "spin_angles"};

bool is_bool_key(const std::string &key) {
    return std::find(kBoolKeys.begin(), kBoolKeys.end(), key) != kBoolKeys.end();
}

const std::vector<std::string> kUniverseKeys = {"n", "L", "M", "seed", "tie_weights", "balanced"};

std::vector<std::string> keys_for(const std::string &command) {
    std::vector<std::string> keys;
    auto add = [&](std::initializer_list<std::string> more) { keys.insert(keys.end(), more); };
    if (command == "verify") {
        add({"n", "a", "b", "angle", "genuine"});
    } else if (command == "layers") {
        keys = kUniverseKeys;
    } else if (command == "analyze") {
        keys = kUniverseKeys;
        add({"a", "b", "c", "angle", "witness"});
    } else if (command == "simulate") {
        keys = kUniverseKeys;
        add({"a", "b", "angle", "trials", "threads", "genuine"});
    } else if (command == "chsh") {
        keys = kUniverseKeys;
        add({"a", "a2", "b", "b2", "angles", "spin_angles", "trials", "threads", "genuine"});
    } else if (command == "poisson") {
        add({"theta", "k", "labels", "seed", "p1", "p2"});
    } else if (command == "splines") {
        add({"n", "grid"});
    }
    return keys;
}

bool uses_universe(const std::string &command) {
    return command == "layers" || command == "analyze" || command == "simulate" || command == "chsh";
}

json setting_json(const UnitVector3 &v) {
    return json::array({v[0], v[1], v[2]});
}

json estimate_json(const CorrelationEstimate &e) {
    return {
        {"mean", e.mean},
        {"stderr", e.stderr},
        {"trials", e.trials},
        {"exact_target", e.exact_target},
        {"model_expectation", e.model_expectation},
        {"z_score", e.stderr > 0.0 ? (e.mean - e.exact_target) / e.stderr : 0.0},
    };
}

FirstLayerMeasure::Mode mode_of(const ExperimentConfig &cfg) {
    return cfg.genuine ? FirstLayerMeasure::Mode::kGenuine : FirstLayerMeasure::Mode::kSpline;
}

// Universe streams and experiment streams never overlap.
RandomStream universe_stream(uint64_t seed) {
    return RandomStream(seed).split(1);
}
RandomStream experiment_stream(uint64_t seed) {
    return RandomStream(seed).split(2);
}

LayerUniverse obtain_universe(const Request &req, const ExperimentConfig &cfg) {
    if (!req.universe_path.empty()) {
        LayerUniverse universe = load_universe(req.universe_path);
        if (cfg.n != 0 && cfg.n != universe.n()) {
            throw ConfigError("key `n` = " + std::to_string(cfg.n) + " disagrees with universe file n = " +
                              std::to_string(universe.n()));
        }
        return universe;
    }
    if (cfg.n == 0) {
        throw ConfigError("missing required key `n` (spline resolution, n >= 4)");
    }
    UniverseOptions options;
    options.n = cfg.n;
    options.L = cfg.L;
    options.pairs = cfg.M;
    options.tie_weights = cfg.tie_weights;
    options.balanced = cfg.balanced;
    RandomStream rng = universe_stream(cfg.require_seed());
    return LayerUniverse::sample(options, rng);
}

json universe_summary(const LayerUniverse &universe) {
    return {
        {"n", universe.n()},
        {"L", universe.L()},
        {"pairs", universe.pair_count()},
        {"labels", universe.label_count()},
        {"tie_weights", universe.tie_weights()},
        {"balanced", universe.balanced()},
        {"cells", universe.layer(1).cell_count()},
    };
}

Outcome run_verify(const Request &, const ExperimentConfig &cfg) {
    auto s = cfg.settings_for({"a", "b"});
    FirstLayerMeasure mu(s[0], s[1], cfg.n, mode_of(cfg));
    double target = -dot(s[0], s[1]) + 0.0;
    double integral = mu.pair_integral();
    double abs_error = std::abs(integral + dot(s[0], s[1]));
    double upper = 1.0 + 1.0 / (4.0 * cfg.n * cfg.n);
    Outcome outcome;
    outcome.result = {
        {"a", setting_json(s[0])},
        {"b", setting_json(s[1])},
        {"mode", cfg.genuine ? "genuine" : "spline"},
        {"m1", mu.m1()},
        {"m2", mu.m2()},
        {"total_mass", mu.total_mass()},
        {"theta_hat", mu.theta_hat()},
        {"mass_window", json::array({1.0, upper})},
        {"mass_in_window", mu.total_mass() >= 1.0 - 1e-12 && mu.total_mass() < upper},
        {"pair_integral", integral},
        {"target", target},
        {"abs_error", abs_error},
        {"normalized_expectation", integral / mu.total_mass()},
        {"identity_holds", abs_error <= 1e-12},
    };
    GenuineVariantMass g = genuine_variant_mass(s[0], s[1]);
    outcome.result["genuine_variant"] = {
        {"m1", g.m1},
        {"m2_literal", g.m2_literal},
        {"total_literal", g.total_literal},
        {"m2_half", g.m2_half},
        {"total_half", g.total_half},
        {"literal_is_normalized", g.literal_is_normalized},
    };
    outcome.exit_code = abs_error <= 1e-12 ? kExitOk : kExitUsage;
    return outcome;
}

Outcome run_layers(const Request &req, const ExperimentConfig &cfg) {
    LayerUniverse universe = obtain_universe(req, cfg);
    Outcome outcome;
    outcome.result = universe_summary(universe);
    outcome.result["count_layers"] = count_layers(universe.n()).str();
    // The universe itself is the primary artifact of this command.
    outcome.result["universe"] = universe_to_json(universe);
    return outcome;
}

Outcome run_analyze(const Request &req, const ExperimentConfig &cfg) {
    auto s = cfg.settings_for({"a", "b", "c"});
    LayerUniverse universe = obtain_universe(req, cfg);
    FirstLayerMeasure mu_ab(s[0], s[1], universe.n());
    FirstLayerMeasure mu_ac(s[0], s[2], universe.n());
    DependenceReport d = dependence_report(universe, mu_ab, mu_ac);
    Outcome outcome;
    json &r = outcome.result;
    r["universe"] = universe_summary(universe);
    r["a"] = setting_json(s[0]);
    r["b"] = setting_json(s[1]);
    r["c"] = setting_json(s[2]);
    r["pair_expectation"] = pair_expectation(universe, mu_ab);
    r["target"] = -dot(s[0], s[1]) + 0.0;
    r["conditional_expectation_zero"] = conditional_expectation_zero(universe, mu_ab);
    auto ca = conditional_expectation(universe, mu_ab, Station::kA);
    auto cb = conditional_expectation(universe, mu_ab, Station::kB);
    r["conditional_expectation"] = {
        {"A_given_local", ca.given_local},
        {"A_given_source", ca.given_source},
        {"B_given_local", cb.given_local},
        {"B_given_source", cb.given_source},
    };
    if (cfg.witness) {
        r["witness_without_companions"] = conditional_expectation_zero(universe, mu_ab, true);
    }
    r["dependence"] = {
        {"tv_joint_vs_product", d.tv_joint_vs_product},
        {"tv_cond_indep", d.tv_cond_indep},
        {"cond_pair_dependence", d.cond_pair_dependence},
        {"setting_shift", d.setting_shift},
        {"marginal_uniformity", d.marginal_uniformity},
        {"marginal_setting_shift", d.marginal_setting_shift},
        {"r_lambda_dependence", d.r_lambda_dependence},
        {"ii_star_defect", d.ii_star_defect},
        {"uniform_defect_bound", d.uniform_defect_bound},
        {"theta_hat", d.theta_hat},
    };
    return outcome;
}

Csv batch_csv(const std::vector<std::pair<std::string, const CorrelationEstimate *>> &runs) {
    Csv csv;
    csv.header = "run,batch,mean";
    for (const auto &[name, est] : runs) {
        for (size_t b = 0; b < est->batch_means.size(); ++b) {
            std::ostringstream row;
            row.precision(17);
            row << name << ',' << b << ',' << est->batch_means[b];
            csv.rows.push_back(row.str());
        }
    }
    return csv;
}

Outcome run_simulate(const Request &req, const ExperimentConfig &cfg) {
    auto s = cfg.settings_for({"a", "b"});
    LayerUniverse universe = obtain_universe(req, cfg);
    Sampler sampler(universe, s[0], s[1], mode_of(cfg));
    CorrelationEstimate est = run_experiment(sampler, cfg.trials, experiment_stream(cfg.require_seed()), cfg.threads);
    Outcome outcome;
    outcome.result = estimate_json(est);
    outcome.result["universe"] = universe_summary(universe);
    outcome.result["a"] = setting_json(s[0]);
    outcome.result["b"] = setting_json(s[1]);
    outcome.result["mode"] = cfg.genuine ? "genuine" : "spline";
    outcome.result["batches"] = est.batch_means.size();
    outcome.csv = batch_csv({{"ab", &est}});
    return outcome;
}

Outcome run_chsh(const Request &req, const ExperimentConfig &cfg) {
    auto s = cfg.settings_for({"a", "a2", "b", "b2"});
    LayerUniverse universe = obtain_universe(req, cfg);
    ChshResult res = chsh(universe, s[0], s[1], s[2], s[3], cfg.trials, experiment_stream(cfg.require_seed()),
                          mode_of(cfg), cfg.threads);
    Outcome outcome;
    json &r = outcome.result;
    r["universe"] = universe_summary(universe);
    r["settings"] = {{"a", setting_json(s[0])}, {"a2", setting_json(s[1])},
                     {"b", setting_json(s[2])}, {"b2", setting_json(s[3])}};
    r["E_ab"] = estimate_json(res.estimates[0]);
    r["E_ab2"] = estimate_json(res.estimates[1]);
    r["E_a2b"] = estimate_json(res.estimates[2]);
    r["E_a2b2"] = estimate_json(res.estimates[3]);
    r["S"] = res.S;
    r["stderr"] = res.stderr;
    r["exact_target"] = res.exact_target;
    r["z_score"] = res.stderr > 0.0 ? (res.S - res.exact_target) / res.stderr : 0.0;
    r["mode"] = cfg.genuine ? "genuine" : "spline";
    outcome.csv = batch_csv({{"ab", &res.estimates[0]},
                             {"ab2", &res.estimates[1]},
                             {"a2b", &res.estimates[2]},
                             {"a2b2", &res.estimates[3]}});
    return outcome;
}

double chi_square_quantile(int categories, double p) {
    boost::math::chi_squared dist(categories - 1);
    return boost::math::quantile(dist, p);
}

Outcome run_poisson(const Request &, const ExperimentConfig &cfg) {
    uint64_t seed = cfg.require_seed();
    RandomStream trace_rng = RandomStream(seed).split(1);
    EmissionTrace trace = generate_trace(cfg.theta, cfg.k, trace_rng);
    DiscrepancyStats stats = discrepancy_stats(trace.fracs);

    std::vector<uint64_t> counts(cfg.labels, 0);
    for (double x : trace.cums) {
        ++counts[label_from_time(x, cfg.labels) - 1];
    }
    double mean_wait = 0.0;
    for (double t : trace.waits) {
        mean_wait += t;
    }
    mean_wait /= static_cast<double>(trace.size());

    Outcome outcome;
    json &r = outcome.result;
    r["k"] = cfg.k;
    r["theta"] = cfg.theta;
    r["intensity"] = trace.intensity();
    r["mean_wait"] = mean_wait;
    r["star_discrepancy"] = stats.star;
    r["extreme_discrepancy"] = stats.extreme;
    r["labels"] = cfg.labels;
    json label_stats = {{"counts", counts}};
    if (cfg.labels > 1) {
        label_stats["chi_square"] = chi_square_uniform(counts);
        label_stats["quantile_999"] = chi_square_quantile(cfg.labels, 0.999);
    }
    r["label_uniformity"] = label_stats;

    RandomStream gate_rng = RandomStream(seed).split(2);
    GateResult gate = detector_gate(cfg.p1, cfg.p2, cfg.labels, cfg.k, cfg.theta, gate_rng);
    json gate_stats = {
        {"p1", cfg.p1},
        {"p2", cfg.p2},
        {"accepted", gate.accepted},
        {"acceptance_rate", gate.acceptance_rate()},
        {"expected_rate", cfg.p1 * cfg.p2},
        {"tv_gated_vs_all", gate.tv_gated_vs_all()},
    };
    if (cfg.labels > 1 && gate.accepted > 0) {
        gate_stats["chi_square"] = chi_square_uniform(gate.gated_counts);
        gate_stats["quantile_999"] = chi_square_quantile(cfg.labels, 0.999);
    }
    r["gate"] = gate_stats;

    // Star discrepancy of prefixes at four sizes per decade from 1000 on.
    std::vector<double> ks, stars;
    Csv csv;
    csv.header = "k,star_discrepancy";
    std::vector<uint64_t> sizes;
    for (int j = 0;; ++j) {
        auto size = static_cast<uint64_t>(std::llround(1000.0 * std::pow(10.0, j / 4.0)));
        if (size >= cfg.k) {
            break;
        }
        sizes.push_back(size);
    }
    sizes.push_back(cfg.k);
    for (uint64_t size : sizes) {
        double d = star_discrepancy(std::span<const double>(trace.fracs.data(), size));
        std::ostringstream row;
        row.precision(17);
        row << size << ',' << d;
        csv.rows.push_back(row.str());
        if (size >= 1000) {
            ks.push_back(static_cast<double>(size));
            stars.push_back(d);
        }
    }
    if (ks.size() >= 2) {
        SlopeFit fit = fit_loglog_slope(ks, stars);
        r["loglog_slope"] = fit.slope;
    }
    outcome.csv = csv;
    return outcome;
}

Outcome run_splines(const Request &, const ExperimentConfig &cfg) {
    SplineSystem spline(cfg.n);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    const int g = cfg.grid;
    for (int ix = 0; ix < g; ++ix) {
        double x = static_cast<double>(ix) / (g - 1);
        for (int iy = 0; iy < g; ++iy) {
            double y = static_cast<double>(iy) / (g - 1);
            double r = spline.approx_sq_diff(x, y) - (y - x) * (y - x);
            lo = first ? r : std::min(lo, r);
            hi = first ? r : std::max(hi, r);
            first = false;
        }
    }
    Outcome outcome;
    outcome.result = {
        {"n", cfg.n},
        {"grid", g},
        {"residual_min", lo},
        {"residual_max", hi},
        {"bound", spline.residual_bound()},
        {"within_bound", lo >= -1e-12 && hi <= spline.residual_bound() + 1e-12},
    };
    Csv csv;
    csv.header = "x";
    for (int i = spline.first_index(); i <= spline.last_index(); ++i) {
        csv.header += ",N" + std::to_string(i);
    }
    for (int ix = 0; ix < g; ++ix) {
        double x = static_cast<double>(ix) / (g - 1);
        std::ostringstream row;
        row.precision(17);
        row << x;
        for (int i = spline.first_index(); i <= spline.last_index(); ++i) {
            row << ',' << spline.basis(i, x);
        }
        csv.rows.push_back(row.str());
    }
    outcome.csv = csv;
    return outcome;
}

Outcome dispatch(const Request &req, const ExperimentConfig &cfg) {
    static const std::map<std::string, std::function<Outcome(const Request &, const ExperimentConfig &)>> table = {
        {"verify", run_verify}, {"layers", run_layers},   {"analyze", run_analyze}, {"simulate", run_simulate},
        {"chsh", run_chsh},     {"poisson", run_poisson}, {"splines", run_splines},
    };
    return table.at(req.command)(req, cfg);
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

int execute(const Request &req, std::ostream &out) {
    ConfigEntries entries;
    if (!req.config_path.empty()) {
        entries = read_config_file(req.config_path);
        const auto allowed = keys_for(req.command);
        for (const auto &[key, entry] : entries) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                throw ConfigError(req.config_path + ": line " + std::to_string(entry.line) + ": key `" + key +
                                  "` does not apply to '" + req.command + "'");
            }
        }
    }
    for (const auto &[key, entry] : req.entries) {
        entries[key] = entry;
    }
    bool needs_n = !(req.command == "poisson" || (uses_universe(req.command) && !req.universe_path.empty()));
    ExperimentConfig cfg;
    try {
        cfg = config_from_entries(entries, needs_n);
    } catch (const ConfigError &e) {
        if (!req.config_path.empty()) {
            throw ConfigError(req.config_path + ": " + e.what());
        }
        throw;
    }

    Outcome outcome = dispatch(req, cfg);

    json report = {
        {"schema", kReportSchema},
        {"version", kReportVersion},
        {"universe_schema", {{"name", kUniverseSchema}, {"version", kUniverseVersion}}},
        {"command", req.command},
        {"config", cfg.echo},
        {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
        {"result", outcome.result},
    };
    if (!req.universe_path.empty()) {
        report["universe_file"] = req.universe_path;
    }
    std::string text;
    if (req.command == "layers" && !req.out_path.empty()) {
        // --out receives the loadable universe file; the report keeps a summary.
        write_text(req.out_path, outcome.result["universe"].dump(1) + "\n");
        report["result"].erase("universe");
        report["universe_out"] = req.out_path;
        out << report.dump(2) << '\n';
    } else if (!req.out_path.empty()) {
        write_text(req.out_path, report.dump(2) + "\n");
    } else {
        out << report.dump(2) << '\n';
    }
    if (!req.csv_path.empty()) {
        if (!outcome.csv) {
            throw ConfigError("'" + req.command + "' has no CSV output");
        }
        std::string csv = outcome.csv->header + "\n";
        for (const auto &row : outcome.csv->rows) {
            csv += row + "\n";
        }
        write_text(req.csv_path, csv);
    }
    return outcome.exit_code;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Local hidden-variable EPR simulator", "lhv"};
    app.require_subcommand(1);

    Request req;
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, bool>> switches;
    const auto &help = key_help();
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"verify", "check the exact first-layer identities for one setting pair"},
        {"layers", "sample a layer universe and serialize it"},
        {"analyze", "exact dependence and parameter-independence report"},
        {"simulate", "Monte Carlo estimate of E{A B}"},
        {"chsh", "Monte Carlo CHSH combination"},
        {"poisson", "emission times, discrepancy and label statistics"},
        {"splines", "spline residual check on a grid"},
    };
    for (const auto &[name, description] : commands) {
        CLI::App *sub = app.add_subcommand(name, description);
        sub->add_option("--config", req.config_path, "key = value config file");
        sub->add_option("--out", req.out_path, "write the JSON report here instead of stdout");
        sub->add_option("--csv", req.csv_path, "write the CSV series here");
        if (uses_universe(name) && name != "layers") {
            sub->add_option("--universe", req.universe_path, "load the layer universe from this file");
        }
        for (const auto &key : keys_for(name)) {
            if (is_bool_key(key)) {
                sub->add_flag(flag_of(key), switches[name][key], help.at(key));
            } else {
                sub->add_option(flag_of(key), values[name][key], help.at(key));
            }
        }
        sub->callback([&req, name = name]() { req.command = name; });
    }

    std::vector<const char *> argv;
    argv.push_back("lhv");
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "lhv: " << e.what() << '\n';
        err << "run 'lhv --help' for usage\n";
        return kExitUsage;
    }

    for (const auto &[key, text] : values[req.command]) {
        CLI::App *sub = app.get_subcommand(req.command);
        if (sub->count(flag_of(key)) > 0) {
            req.entries[key] = ConfigEntry{text, 0};
        }
    }
    for (const auto &[key, on] : switches[req.command]) {
        if (on) {
            req.entries[key] = ConfigEntry{"true", 0};
        }
    }

    try {
        return execute(req, out);
    } catch (const ConfigError &e) {
        err << "lhv " << req.command << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument &e) {
        err << "lhv " << req.command << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::domain_error &e) {
        err << "lhv " << req.command << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "lhv " << req.command << ": internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace lhv
