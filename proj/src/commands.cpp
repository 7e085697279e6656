#include "zenodot/commands.hpp"

#include <cmath>

#include "zenodot/analytics.hpp"
#include "zenodot/engine.hpp"
#include "zenodot/errors.hpp"
#include "zenodot/units.hpp"

namespace zenodot::io {

namespace {

ResultFile make_result(const ConfigDocument& cfg, const std::string& command) {
    ResultFile r;
    r.command = command;
    r.seed = cfg.run.seed;
    r.config = to_json(cfg);
    return r;
}

double tau_max_for_rate(const RunSection& run, std::size_t rate_index) {
    if (run.tau_max.size() == 1) return run.tau_max[0];
    return run.tau_max[rate_index];
}

}  // namespace

ResultFile cmd_povm(const ConfigDocument& cfg) {
    ResultFile r = make_result(cfg, "povm");
    r.columns = {"delta_ueV", "p_co", "p_cr", "phase_rad"};
    const auto& p = cfg.povm;
    for (int k = 0; k < p.n_points; ++k) {
        const double delta =
            p.delta_min + (p.delta_max - p.delta_min) * k / (p.n_points - 1);
        r.rows.push_back({delta, optics::povm_weight(cfg.optics, delta, optics::Polarisation::co),
                          optics::povm_weight(cfg.optics, delta, optics::Polarisation::cr),
                          optics::phase_shift(cfg.optics, delta)});
    }
    return r;
}

std::vector<ResultFile> cmd_g2(const ConfigDocument& cfg, int threads) {
    if (!cfg.fixed_bath && !cfg.ensemble)
        throw ConfigError("g2: config needs a 'bath' or 'ensemble' section");
    std::vector<ResultFile> files;
    ResultFile combined = make_result(cfg, "g2");
    combined.columns = {"rate_per_ns", "tau_ns", "g2", "stderr"};
    for (std::size_t ri = 0; ri < cfg.run.rates.size(); ++ri) {
        mc::RunConfig run;
        run.optics = cfg.optics;
        run.noise = cfg.noise;
        run.rate = cfg.run.rates[ri];
        run.tau_max = tau_max_for_rate(cfg.run, ri);
        run.tau_points = cfg.run.tau_points;
        run.n_trajectories = cfg.run.n_trajectories;
        run.n_bath_draws = cfg.run.n_bath_draws;
        run.seed = cfg.run.seed;
        run.estimator = cfg.run.estimator;
        run.threads = threads;
        run.selective_window_factor = cfg.run.selective_window_factor;
        run.normalization = cfg.run.normalization;

        CorrelationSeries series;
        const bool use_ensemble = cfg.ensemble && (!cfg.fixed_bath || cfg.run.n_bath_draws > 1);
        if (use_ensemble) {
            const EnsembleSpec e = *cfg.ensemble;
            // placeholder; ensemble_g2 substitutes one drawn bath per draw index
            run.bath = bath::SpinBathSpec{1, {1.0}, {0.0}, 1.0, false};
            series = mc::ensemble_g2(run, [&e](rng::Stream& st) {
                return draw_random_bath(e.n_spins, e.mean_coupling, e.sd_coupling,
                                        e.mean_zeeman, e.sd_zeeman, e.electron_zeeman,
                                        st, e.truncate_negative, e.flip_flop);
            });
        } else {
            if (cfg.run.n_bath_draws > 1)
                throw ConfigError("g2: n_bath_draws > 1 requires an 'ensemble' section");
            run.bath = cfg.require_bath();
            run.n_bath_draws = 1;
            series = run.estimator == mc::Estimator::selective ? mc::g2_selective(run)
                                                               : mc::g2_nonselective(run);
        }
        ResultFile r = make_result(cfg, "g2");
        r.columns = {"tau_ns", "g2", "stderr"};
        r.warnings = series.meta.warnings;
        for (std::size_t k = 0; k < series.taus.size(); ++k) {
            r.rows.push_back({series.taus[k], series.g2[k], series.stderr_[k]});
            combined.rows.push_back(
                {run.rate, series.taus[k], series.g2[k], series.stderr_[k]});
        }
        for (const auto& w : series.meta.warnings) combined.warnings.push_back(w);
        files.push_back(std::move(r));
    }
    files.push_back(std::move(combined));
    return files;
}

std::pair<int, int> default_sawtooth_pair(const zeno::ZenoContext& ctx) {
    const int d = ctx.spec.dim();
    int bi = 0, bj = 1;
    double best = -1.0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double c = std::abs(ctx.h_n(i, j));
            if (c > best) {
                best = c;
                bi = i;
                bj = j;
            }
        }
    if (ctx.ch.o_v_eff(bj) > ctx.ch.o_v_eff(bi)) std::swap(bi, bj);
    return {bi, bj};
}

ResultFile cmd_sawtooth(const ConfigDocument& cfg) {
    const auto ctx =
        zeno::make_zeno_context(cfg.require_bath(), cfg.optics, std::nullopt, cfg.noise);
    int i = cfg.sawtooth.state_i, j = cfg.sawtooth.state_j;
    if (i < 0 || j < 0) std::tie(i, j) = default_sawtooth_pair(ctx);
    const auto points = zeno::sawtooth_trajectory(ctx, i, j, cfg.sawtooth.dt_event,
                                                  cfg.sawtooth.t_max, cfg.sawtooth.steps);
    ResultFile r = make_result(cfg, "sawtooth");
    r.columns = {"t_ns", "bloch_y", "bloch_z", "p_value"};
    for (const auto& pt : points)
        r.rows.push_back({pt.t, pt.bloch_y, pt.bloch_z, pt.p_value});
    return r;
}

ResultFile cmd_zeno(const ConfigDocument& cfg) {
    const auto ctx =
        zeno::make_zeno_context(cfg.require_bath(), cfg.optics, std::nullopt, cfg.noise);
    const double tz = zeno::zeno_time(ctx);
    ResultFile r = make_result(cfg, "zeno");
    r.columns = {"tau_z_ns", "double_commutator_trace_ueV2", "m0", "p_v", "g2_0"};
    const double trace = (zenodot::hbar / tz) * (zenodot::hbar / tz);
    r.rows.push_back({tz, trace, ctx.m0, ctx.p_v, ctx.m0 / (ctx.p_v * ctx.p_v)});
    return r;
}

ResultFile cmd_validity(const ConfigDocument& cfg) {
    const auto rep =
        optics::validity_report(cfg.optics, cfg.validity.t_fluc, cfg.validity.threshold);
    ResultFile r = make_result(cfg, "validity");
    r.columns = {"w_f_ueV", "phase_slope_per_ueV", "t_delta_min_ns", "t_fluc_ns", "ok"};
    r.rows.push_back({rep.linewidth, rep.phase_slope, rep.t_delta_min, rep.t_fluc,
                      rep.ok ? 1.0 : 0.0});
    return r;
}

}  // namespace zenodot::io
