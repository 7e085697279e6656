#include "zenodot/config.hpp"

#include <fstream>
#include <set>

#include "zenodot/errors.hpp"

namespace zenodot::io {

namespace {

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& allowed) {
    if (!obj.is_object())
        throw ConfigError("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            throw ConfigError("config: unknown key '" + section + "." + key + "'");
    }
}

template <typename T>
T require(const json& obj, const std::string& section, const std::string& key) {
    if (!obj.contains(key))
        throw ConfigError("config: missing required key '" + section + "." + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: key '" + section + "." + key + "' has the wrong type");
    }
}

template <typename T>
T optional_or(const json& obj, const std::string& section, const std::string& key,
              T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: key '" + section + "." + key + "' has the wrong type");
    }
}

bath::SpinBathSpec parse_bath(const json& obj) {
    check_keys(obj, "bath",
               {"n_spins", "couplings", "zeeman", "electron_zeeman", "flip_flop",
                "convention"});
    bath::SpinBathSpec spec;
    spec.n_spins = require<int>(obj, "bath", "n_spins");
    spec.couplings = require<std::vector<double>>(obj, "bath", "couplings");
    spec.zeeman = require<std::vector<double>>(obj, "bath", "zeeman");
    spec.electron_zeeman = require<double>(obj, "bath", "electron_zeeman");
    spec.flip_flop = optional_or<bool>(obj, "bath", "flip_flop", true);
    const std::string conv = optional_or<std::string>(obj, "bath", "convention", "pauli");
    if (conv != "pauli")
        throw ConfigError("config: bath.convention must be 'pauli'");
    spec.validate();
    return spec;
}

EnsembleSpec parse_ensemble(const json& obj) {
    check_keys(obj, "ensemble",
               {"n_spins", "mean_coupling", "sd_coupling", "mean_zeeman", "sd_zeeman",
                "electron_zeeman", "flip_flop", "truncate_negative"});
    EnsembleSpec e;
    e.n_spins = require<int>(obj, "ensemble", "n_spins");
    e.mean_coupling = require<double>(obj, "ensemble", "mean_coupling");
    e.sd_coupling = require<double>(obj, "ensemble", "sd_coupling");
    e.mean_zeeman = require<double>(obj, "ensemble", "mean_zeeman");
    e.sd_zeeman = require<double>(obj, "ensemble", "sd_zeeman");
    e.electron_zeeman = require<double>(obj, "ensemble", "electron_zeeman");
    e.flip_flop = optional_or<bool>(obj, "ensemble", "flip_flop", true);
    e.truncate_negative = optional_or<bool>(obj, "ensemble", "truncate_negative", false);
    e.validate();
    return e;
}

optics::OpticalParams parse_optics(const json& obj) {
    check_keys(obj, "optics", {"omega_c", "omega_0", "omega_L", "kappa", "g"});
    optics::OpticalParams p;
    p.omega_c = require<double>(obj, "optics", "omega_c");
    p.omega_0 = require<double>(obj, "optics", "omega_0");
    p.omega_L = require<double>(obj, "optics", "omega_L");
    p.kappa = require<double>(obj, "optics", "kappa");
    p.g = require<double>(obj, "optics", "g");
    p.validate();
    return p;
}

channel::NoiseSpec parse_noise(const json& obj) {
    check_keys(obj, "noise", {"sigma_s", "mean_s", "n_quad", "mode"});
    channel::NoiseSpec n;
    n.sigma_s = require<double>(obj, "noise", "sigma_s");
    n.mean_s = optional_or<double>(obj, "noise", "mean_s", 0.0);
    n.n_quad = optional_or<int>(obj, "noise", "n_quad", 21);
    const std::string mode =
        optional_or<std::string>(obj, "noise", "mode", "per_event_sample");
    if (mode == "per_event_sample") {
        n.mode = channel::NoiseMode::per_event_sample;
    } else if (mode == "averaged_channel") {
        n.mode = channel::NoiseMode::averaged_channel;
    } else {
        throw ConfigError("config: noise.mode must be 'per_event_sample' or "
                          "'averaged_channel'");
    }
    n.validate();
    return n;
}

RunSection parse_run(const json& obj) {
    check_keys(obj, "run",
               {"rate", "rates", "tau_max", "tau_points", "n_trajectories",
                "n_bath_draws", "seed", "estimator", "selective_window_factor",
                "normalization"});
    RunSection r;
    if (obj.contains("rate") && obj.contains("rates"))
        throw ConfigError("config: give either run.rate or run.rates, not both");
    if (obj.contains("rates")) {
        r.rates = require<std::vector<double>>(obj, "run", "rates");
    } else if (obj.contains("rate")) {
        r.rates = {require<double>(obj, "run", "rate")};
    } else {
        throw ConfigError("config: missing required key 'run.rate' (or 'run.rates')");
    }
    if (r.rates.empty()) throw ConfigError("config: run.rates must not be empty");
    if (!obj.contains("tau_max"))
        throw ConfigError("config: missing required key 'run.tau_max'");
    if (obj.at("tau_max").is_array()) {
        r.tau_max = require<std::vector<double>>(obj, "run", "tau_max");
        if (r.tau_max.size() != r.rates.size())
            throw ConfigError("config: run.tau_max list must match run.rates length");
    } else {
        r.tau_max = {require<double>(obj, "run", "tau_max")};
    }
    r.tau_points = optional_or<int>(obj, "run", "tau_points", 101);
    r.n_trajectories = optional_or<int>(obj, "run", "n_trajectories", 200);
    r.n_bath_draws = optional_or<int>(obj, "run", "n_bath_draws", 1);
    r.seed = optional_or<std::uint64_t>(obj, "run", "seed", 1);
    const std::string est =
        optional_or<std::string>(obj, "run", "estimator", "nonselective");
    if (est == "nonselective") {
        r.estimator = mc::Estimator::nonselective;
    } else if (est == "selective") {
        r.estimator = mc::Estimator::selective;
    } else {
        throw ConfigError("config: run.estimator must be 'nonselective' or 'selective'");
    }
    r.selective_window_factor =
        optional_or<double>(obj, "run", "selective_window_factor", 64.0);
    const std::string norm =
        optional_or<std::string>(obj, "run", "normalization", "pooled");
    if (norm == "pooled") {
        r.normalization = mc::Normalization::pooled;
    } else if (norm == "per_bath") {
        r.normalization = mc::Normalization::per_bath;
    } else {
        throw ConfigError("config: run.normalization must be 'pooled' or 'per_bath'");
    }
    return r;
}

SawtoothSection parse_sawtooth(const json& obj) {
    check_keys(obj, "sawtooth", {"state_i", "state_j", "dt_event", "t_max", "steps"});
    SawtoothSection s;
    s.state_i = optional_or<int>(obj, "sawtooth", "state_i", -1);
    s.state_j = optional_or<int>(obj, "sawtooth", "state_j", -1);
    if (obj.contains("dt_event") && !obj.at("dt_event").is_null())
        s.dt_event = require<double>(obj, "sawtooth", "dt_event");
    s.t_max = optional_or<double>(obj, "sawtooth", "t_max", 20.0);
    s.steps = optional_or<int>(obj, "sawtooth", "steps", 400);
    return s;
}

PovmSection parse_povm(const json& obj) {
    check_keys(obj, "povm", {"delta_min", "delta_max", "n_points"});
    PovmSection p;
    p.delta_min = optional_or<double>(obj, "povm", "delta_min", -2.0);
    p.delta_max = optional_or<double>(obj, "povm", "delta_max", 2.0);
    p.n_points = optional_or<int>(obj, "povm", "n_points", 2001);
    if (!(p.delta_max > p.delta_min) || p.n_points < 2)
        throw ConfigError("config: povm needs delta_max > delta_min and n_points >= 2");
    return p;
}

ValiditySection parse_validity(const json& obj) {
    check_keys(obj, "validity", {"t_fluc", "threshold"});
    ValiditySection v;
    v.t_fluc = require<double>(obj, "validity", "t_fluc");
    v.threshold = optional_or<double>(obj, "validity", "threshold", 100.0);
    return v;
}

}  // namespace

void EnsembleSpec::validate() const {
    if (n_spins < 1 || n_spins > 14)
        throw ConfigError("ensemble: n_spins must be in [1, 14]");
    if (sd_coupling < 0.0 || sd_zeeman < 0.0)
        throw ConfigError("ensemble: standard deviations must be >= 0");
    if (flip_flop && !(electron_zeeman > 0.0))
        throw ConfigError("ensemble: electron_zeeman must be > 0 when flip_flop is set");
}

const bath::SpinBathSpec& ConfigDocument::require_bath() const {
    if (!fixed_bath)
        throw ConfigError("config: this command requires a fixed 'bath' section");
    return *fixed_bath;
}

ConfigDocument parse_config(const json& doc) {
    check_keys(doc, "<root>",
               {"schema_version", "bath", "ensemble", "optics", "noise", "run",
                "sawtooth", "povm", "validity"});
    ConfigDocument cfg;
    cfg.schema_version = require<int>(doc, "<root>", "schema_version");
    if (cfg.schema_version != 1)
        throw ConfigError("config: unsupported schema_version (expected 1)");
    if (doc.contains("bath")) cfg.fixed_bath = parse_bath(doc.at("bath"));
    if (doc.contains("ensemble")) cfg.ensemble = parse_ensemble(doc.at("ensemble"));
    if (!doc.contains("optics"))
        throw ConfigError("config: missing required key '<root>.optics'");
    cfg.optics = parse_optics(doc.at("optics"));
    if (doc.contains("noise")) cfg.noise = parse_noise(doc.at("noise"));
    if (doc.contains("run")) cfg.run = parse_run(doc.at("run"));
    if (doc.contains("sawtooth")) cfg.sawtooth = parse_sawtooth(doc.at("sawtooth"));
    if (doc.contains("povm")) cfg.povm = parse_povm(doc.at("povm"));
    if (doc.contains("validity")) cfg.validity = parse_validity(doc.at("validity"));
    if (!cfg.fixed_bath && !cfg.ensemble) {
        // povm/validity work without spins; g2/sawtooth/zeno will complain later
    }
    return cfg;
}

ConfigDocument load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }
    return parse_config(doc);
}

json to_json(const ConfigDocument& cfg) {
    json doc;
    doc["schema_version"] = cfg.schema_version;
    if (cfg.fixed_bath) {
        const auto& b = *cfg.fixed_bath;
        doc["bath"] = {{"n_spins", b.n_spins},
                       {"couplings", b.couplings},
                       {"zeeman", b.zeeman},
                       {"electron_zeeman", b.electron_zeeman},
                       {"flip_flop", b.flip_flop},
                       {"convention", "pauli"}};
    }
    if (cfg.ensemble) {
        const auto& e = *cfg.ensemble;
        doc["ensemble"] = {{"n_spins", e.n_spins},
                           {"mean_coupling", e.mean_coupling},
                           {"sd_coupling", e.sd_coupling},
                           {"mean_zeeman", e.mean_zeeman},
                           {"sd_zeeman", e.sd_zeeman},
                           {"electron_zeeman", e.electron_zeeman},
                           {"flip_flop", e.flip_flop},
                           {"truncate_negative", e.truncate_negative}};
    }
    doc["optics"] = {{"omega_c", cfg.optics.omega_c},
                     {"omega_0", cfg.optics.omega_0},
                     {"omega_L", cfg.optics.omega_L},
                     {"kappa", cfg.optics.kappa},
                     {"g", cfg.optics.g}};
    if (cfg.noise) {
        doc["noise"] = {{"sigma_s", cfg.noise->sigma_s},
                        {"mean_s", cfg.noise->mean_s},
                        {"n_quad", cfg.noise->n_quad},
                        {"mode", cfg.noise->mode == channel::NoiseMode::per_event_sample
                                     ? "per_event_sample"
                                     : "averaged_channel"}};
    }
    doc["run"] = {
        {"rates", cfg.run.rates},
        {"tau_max", cfg.run.tau_max},
        {"tau_points", cfg.run.tau_points},
        {"n_trajectories", cfg.run.n_trajectories},
        {"n_bath_draws", cfg.run.n_bath_draws},
        {"seed", cfg.run.seed},
        {"estimator",
         cfg.run.estimator == mc::Estimator::selective ? "selective" : "nonselective"},
        {"selective_window_factor", cfg.run.selective_window_factor},
        {"normalization", cfg.run.normalization == mc::Normalization::per_bath
                              ? "per_bath"
                              : "pooled"}};
    json saw = {{"state_i", cfg.sawtooth.state_i},
                {"state_j", cfg.sawtooth.state_j},
                {"t_max", cfg.sawtooth.t_max},
                {"steps", cfg.sawtooth.steps}};
    if (cfg.sawtooth.dt_event) saw["dt_event"] = *cfg.sawtooth.dt_event;
    doc["sawtooth"] = saw;
    doc["povm"] = {{"delta_min", cfg.povm.delta_min},
                   {"delta_max", cfg.povm.delta_max},
                   {"n_points", cfg.povm.n_points}};
    doc["validity"] = {{"t_fluc", cfg.validity.t_fluc},
                       {"threshold", cfg.validity.threshold}};
    return doc;
}

bath::SpinBathSpec draw_random_bath(int n, double mean_coupling, double sd_coupling,
                                    double mean_zeeman, double sd_zeeman,
                                    double electron_zeeman, rng::Stream& stream,
                                    bool truncate_negative, bool flip_flop) {
    if (n < 1) throw ConfigError("draw_random_bath: n must be >= 1");
    if (sd_coupling < 0.0 || sd_zeeman < 0.0)
        throw ConfigError("draw_random_bath: standard deviations must be >= 0");
    bath::SpinBathSpec spec;
    spec.n_spins = n;
    spec.electron_zeeman = electron_zeeman;
    spec.flip_flop = flip_flop;
    auto draw = [&](double mean, double sd) {
        double x = stream.gaussian(mean, sd);
        if (truncate_negative) {
            while (x < 0.0) x = stream.gaussian(mean, sd);
        }
        return x;
    };
    for (int k = 0; k < n; ++k) spec.couplings.push_back(draw(mean_coupling, sd_coupling));
    for (int k = 0; k < n; ++k) spec.zeeman.push_back(draw(mean_zeeman, sd_zeeman));
    spec.validate();
    return spec;
}

}  // namespace zenodot::io
