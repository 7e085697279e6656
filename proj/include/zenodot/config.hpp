// config.hpp — JSON configuration documents
//
// Strict schema: a required integer schema_version (currently 1), known
// sections only, unknown or missing-required keys rejected with the offending
// key named. Energies are ueV, times ns, rates 1/ns. Either a fixed "bath" or
// a Gaussian "ensemble" section supplies the nuclear spins.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "zenodot/engine.hpp"
#include "zenodot/measurement.hpp"
#include "zenodot/random.hpp"
#include "zenodot/reflectivity.hpp"
#include "zenodot/spin_bath.hpp"

namespace zenodot::io {

using json = nlohmann::json;

struct EnsembleSpec {
    int n_spins = 8;
    double mean_coupling = 0.5;   // <A_k>, ueV
    double sd_coupling = 0.25;
    double mean_zeeman = 0.5;     // <omega_k>, ueV
    double sd_zeeman = 0.01;
    double electron_zeeman = 25.0;
    bool flip_flop = true;
    bool truncate_negative = false;

    void validate() const;
};

struct RunSection {
    std::vector<double> rates;      // one file per rate
    std::vector<double> tau_max;    // single value or one per rate
    int tau_points = 101;
    int n_trajectories = 200;
    int n_bath_draws = 1;
    std::uint64_t seed = 1;
    mc::Estimator estimator = mc::Estimator::nonselective;
    double selective_window_factor = 64.0;
    mc::Normalization normalization = mc::Normalization::pooled;
};

struct SawtoothSection {
    int state_i = -1;   // -1: pick the pair with the largest |<i|H_N|j>|
    int state_j = -1;
    std::optional<double> dt_event;   // ns; absent = no events
    double t_max = 20.0;
    int steps = 400;
};

struct PovmSection {
    double delta_min = -2.0;
    double delta_max = 2.0;
    int n_points = 2001;
};

struct ValiditySection {
    double t_fluc = 1e6;
    double threshold = 100.0;
};

struct ConfigDocument {
    int schema_version = 1;
    std::optional<bath::SpinBathSpec> fixed_bath;
    std::optional<EnsembleSpec> ensemble;
    optics::OpticalParams optics;
    std::optional<channel::NoiseSpec> noise;
    RunSection run;
    SawtoothSection sawtooth;
    PovmSection povm;
    ValiditySection validity;

    // the bath used by single-bath commands; throws when only an ensemble is given
    const bath::SpinBathSpec& require_bath() const;
};

// Parse and validate; throws ConfigError naming the offending key.
ConfigDocument parse_config(const json& doc);
ConfigDocument load_config(const std::string& path);  // IoError on read failure

// Fully resolved round-trippable document (defaults filled in).
json to_json(const ConfigDocument& cfg);

// Independent Gaussian draws of couplings and Zeeman splittings per spin.
bath::SpinBathSpec draw_random_bath(int n, double mean_coupling, double sd_coupling,
                                    double mean_zeeman, double sd_zeeman,
                                    double electron_zeeman, rng::Stream& stream,
                                    bool truncate_negative = false, bool flip_flop = true);

}  // namespace zenodot::io
