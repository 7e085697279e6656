// zenodot — cross-polarised photon correlation simulator CLI
//
// Subcommands: povm | g2 | sawtooth | zeno | validity.
// Exit codes: 0 success, 1 configuration error, 2 numeric/singularity error,
// 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zenodot/commands.hpp"
#include "zenodot/config.hpp"
#include "zenodot/errors.hpp"
#include "zenodot/results.hpp"

namespace {

using namespace zenodot;

struct GlobalOptions {
    std::string config_path;
    std::string output = "";
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

std::string with_rate_suffix(const std::string& base, std::size_t index) {
    const auto dot = base.find_last_of('.');
    const std::string stem = dot == std::string::npos ? base : base.substr(0, dot);
    const std::string ext = dot == std::string::npos ? "" : base.substr(dot);
    return stem + ".rate" + std::to_string(index) + ext;
}

int run(const std::string& command, const GlobalOptions& opt,
        io::ConfigDocument& cfg) {
    if (opt.seed) cfg.run.seed = *opt.seed;
    const std::string out =
        opt.output.empty() ? command + "." + opt.format : opt.output;
    if (command == "g2") {
        auto files = io::cmd_g2(cfg, opt.threads);
        if (files.size() == 2) {
            // single rate: per-rate file only
            io::write_result(files[0], out, opt.format);
        } else {
            for (std::size_t i = 0; i + 1 < files.size(); ++i)
                io::write_result(files[i], with_rate_suffix(out, i), opt.format);
            io::write_result(files.back(), out, opt.format);
        }
        return 0;
    }
    io::ResultFile r;
    if (command == "povm") {
        r = io::cmd_povm(cfg);
    } else if (command == "sawtooth") {
        r = io::cmd_sawtooth(cfg);
    } else if (command == "zeno") {
        r = io::cmd_zeno(cfg);
    } else if (command == "validity") {
        r = io::cmd_validity(cfg);
    } else {
        throw ConfigError("unknown command: " + command);
    }
    io::write_result(r, out, opt.format);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zenodot — quantum-dot nuclear-spin photon correlation simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions opt;
    app.add_option("--config", opt.config_path, "JSON configuration file")->required();
    app.add_option("--output", opt.output, "output path (default <command>.<format>)");
    app.add_option("--format", opt.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "override run.seed");
    app.add_option("--threads", opt.threads, "worker threads for trajectories")
        ->check(CLI::PositiveNumber);

    auto* povm = app.add_subcommand("povm", "scattering probabilities vs Overhauser shift");
    povm->fallthrough();
    double delta_min = 0, delta_max = 0;
    int n_points = 0;
    auto* o_dmin = povm->add_option("--delta-min", delta_min, "sweep start, ueV");
    auto* o_dmax = povm->add_option("--delta-max", delta_max, "sweep end, ueV");
    auto* o_npts = povm->add_option("--points", n_points, "sweep points");

    auto* g2 = app.add_subcommand("g2", "cross-polarised intensity autocorrelation");
    g2->fallthrough();
    std::vector<double> rates;
    std::vector<double> tau_max;
    int tau_points = 0, n_traj = 0, n_baths = 0;
    std::string estimator;
    auto* o_rates = g2->add_option("--rates", rates, "scattering rates, 1/ns");
    auto* o_tmax = g2->add_option("--tau-max", tau_max, "max delay(s), ns");
    auto* o_tpts = g2->add_option("--tau-points", tau_points, "grid points");
    auto* o_traj = g2->add_option("--trajectories", n_traj, "trajectories per bath");
    auto* o_bd = g2->add_option("--bath-draws", n_baths, "ensemble bath draws");
    auto* o_est = g2->add_option("--estimator", estimator, "nonselective or selective")
                      ->check(CLI::IsMember({"nonselective", "selective"}));

    auto* saw = app.add_subcommand("sawtooth", "two-level perturbative trajectory");
    saw->fallthrough();
    double dt_event = 0, t_max = 0;
    int steps = 0, state_i = -1, state_j = -1;
    auto* o_dte = saw->add_option("--dt-event", dt_event, "event spacing, ns (0 = none)");
    auto* o_stm = saw->add_option("--t-max", t_max, "trajectory length, ns");
    auto* o_stp = saw->add_option("--steps", steps, "grid intervals");
    auto* o_si = saw->add_option("--state-i", state_i, "basis index i");
    auto* o_sj = saw->add_option("--state-j", state_j, "basis index j");

    auto* zen = app.add_subcommand("zeno", "nuclear Zeno time of the configured bath");
    zen->fallthrough();
    auto* val = app.add_subcommand("validity", "slow-bath validity diagnostics");
    val->fallthrough();
    double t_fluc = 0;
    auto* o_tf = val->add_option("--t-fluc", t_fluc, "Overhauser fluctuation time, ns");
    (void)zen;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        io::ConfigDocument cfg = io::load_config(opt.config_path);
        if (seed_opt->count()) opt.seed = seed_flag;
        if (o_dmin->count()) cfg.povm.delta_min = delta_min;
        if (o_dmax->count()) cfg.povm.delta_max = delta_max;
        if (o_npts->count()) cfg.povm.n_points = n_points;
        if (o_rates->count()) cfg.run.rates = rates;
        if (o_tmax->count()) cfg.run.tau_max = tau_max;
        if (o_tpts->count()) cfg.run.tau_points = tau_points;
        if (o_traj->count()) cfg.run.n_trajectories = n_traj;
        if (o_bd->count()) cfg.run.n_bath_draws = n_baths;
        if (o_est->count())
            cfg.run.estimator = estimator == "selective" ? mc::Estimator::selective
                                                         : mc::Estimator::nonselective;
        if (o_dte->count()) {
            if (dt_event > 0)
                cfg.sawtooth.dt_event = dt_event;
            else
                cfg.sawtooth.dt_event.reset();
        }
        if (o_stm->count()) cfg.sawtooth.t_max = t_max;
        if (o_stp->count()) cfg.sawtooth.steps = steps;
        if (o_si->count()) cfg.sawtooth.state_i = state_i;
        if (o_sj->count()) cfg.sawtooth.state_j = state_j;
        if (o_tf->count()) cfg.validity.t_fluc = t_fluc;
        if (cfg.run.tau_max.size() > 1 && cfg.run.tau_max.size() != cfg.run.rates.size())
            throw ConfigError("run: tau_max list must match rates length");

        return run(app.get_subcommands().front()->get_name(), opt, cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
