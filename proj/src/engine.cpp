#include "zenodot/engine.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <string>
#include <thread>

#include "zenodot/errors.hpp"
#include "zenodot/units.hpp"

namespace zenodot::mc {

using Complex = std::complex<double>;

void RunConfig::validate() const {
    bath.validate();
    optics.validate();
    if (noise) noise->validate();
    if (rate < 0.0 || !std::isfinite(rate)) throw ConfigError("run: rate must be >= 0");
    if (!(tau_max > 0.0)) throw ConfigError("run: tau_max must be > 0");
    if (tau_points < 2) throw ConfigError("run: tau_points must be >= 2");
    if (n_trajectories < 1) throw ConfigError("run: n_trajectories must be >= 1");
    if (n_bath_draws < 1) throw ConfigError("run: n_bath_draws must be >= 1");
    if (threads < 1) throw ConfigError("run: threads must be >= 1");
    if (!(selective_window_factor >= 2.0))
        throw ConfigError("run: selective_window_factor must be >= 2");
}

std::vector<double> RunConfig::tau_grid() const {
    std::vector<double> taus(tau_points);
    for (int k = 0; k < tau_points; ++k)
        taus[k] = tau_max * k / (tau_points - 1);
    return taus;
}

zeno::ScatteringSchedule sample_event_times(double rate, double tau_max,
                                            rng::Stream& stream) {
    if (rate < 0.0) throw ConfigError("sample_event_times: rate must be >= 0");
    zeno::ScatteringSchedule schedule;
    schedule.tau = tau_max;
    if (rate == 0.0) return schedule;
    double t = stream.exponential(rate);
    while (t < tau_max) {
        schedule.times.push_back(t);
        t += stream.exponential(rate);
    }
    return schedule;
}

// ---------------------------- BathEngine -------------------------------

BathEngine::BathEngine(const bath::SpinBathSpec& spec, const optics::OpticalParams& p,
                       const std::optional<channel::NoiseSpec>& noise)
    : spec_(spec), optics_(p), noise_(noise) {
    spec_.validate();
    optics_.validate();
    if (noise_) noise_->validate();
    dim_ = spec_.dim();
    const int n = spec_.n_spins;

    // group computational basis states by total I^z sector (popcount)
    std::vector<std::vector<int>> members(n + 1);
    for (int i = 0; i < dim_; ++i)
        members[std::popcount(static_cast<unsigned>(i))].push_back(i);

    // quadrature family of (weight, shift) pairs; single node when noiseless
    std::vector<std::pair<double, double>> family{{1.0, 0.0}};
    if (noise_ && (noise_->sigma_s > 0.0 || noise_->mean_s != 0.0)) {
        if (noise_->sigma_s == 0.0) {
            family = {{1.0, noise_->mean_s}};
        } else {
            family.clear();
            for (const auto& [x, w] : channel::gauss_hermite_normal(noise_->n_quad))
                family.push_back({w, noise_->mean_s + noise_->sigma_s * x});
        }
    }

    const Matrix delta_full = bath::overhauser_operator(spec_);
    const Matrix h_full = bath::nuclear_hamiltonian(spec_);

    double pv_sum = 0.0, m0_sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const auto& idx = members[k];
        const int s = static_cast<int>(idx.size());
        Matrix dblk(s, s), hblk(s, s);
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b) {
                dblk(a, b) = delta_full(idx[a], idx[b]);
                hblk(a, b) = h_full(idx[a], idx[b]);
            }
        Sector sec;
        const auto dspec = bath::spectral(dblk);
        sec.deltas = dspec.eigenvalues;
        const Matrix h_o = dspec.eigenvectors.adjoint() * hblk * dspec.eigenvectors;
        const auto hspec = bath::spectral(h_o);
        sec.energies = hspec.eigenvalues;
        sec.w = hspec.eigenvectors;

        shifted_vectors(sec, 0.0, sec.m_v, sec.m_h);
        sec.o_eff = Eigen::VectorXd::Zero(s);
        sec.r_nonsel = Matrix::Zero(s, s);
        sec.r_v = Matrix::Zero(s, s);
        sec.r_h = Matrix::Zero(s, s);
        for (const auto& [wgt, shift] : family) {
            Eigen::VectorXcd mv, mh;
            if (shift == 0.0) {
                mv = sec.m_v;
                mh = sec.m_h;
            } else {
                shifted_vectors(sec, shift, mv, mh);
            }
            sec.o_eff += wgt * mv.cwiseAbs2();
            sec.r_v.noalias() += wgt * (mv * mv.adjoint());
            sec.r_h.noalias() += wgt * (mh * mh.adjoint());
        }
        sec.r_nonsel = sec.r_v + sec.r_h;
        sec.r_nonsel.diagonal().setOnes();
        if (per_event_noise()) {
            // Kraus families represent a continuous shift distribution here:
            // the POVM used for the initial state and readouts is the exact
            // Gaussian average (quadrature cannot resolve narrow lines)
            sec.o_eff =
                channel::gaussian_average_povm(optics_, sec.deltas, noise_->mean_s,
                                               noise_->sigma_s);
        }

        sec.q.noalias() =
            sec.w.adjoint() * sec.o_eff.cast<Complex>().asDiagonal() * sec.w;
        const Eigen::VectorXd vdiag = sec.o_eff / static_cast<double>(dim_);
        sec.rho0.noalias() =
            sec.w.adjoint() * vdiag.cast<Complex>().asDiagonal() * sec.w;
        pv_sum += sec.o_eff.sum();
        m0_sum += sec.o_eff.squaredNorm();
        sectors_.push_back(std::move(sec));
    }
    p_v_ = pv_sum / dim_;
    m0_ = m0_sum / dim_;
}

bool BathEngine::per_event_noise() const {
    return noise_ && noise_->mode == channel::NoiseMode::per_event_sample &&
           noise_->sigma_s > 0.0;
}

void BathEngine::shifted_vectors(const Sector& sec, double shift, Eigen::VectorXcd& mv,
                                 Eigen::VectorXcd& mh) const {
    const int s = static_cast<int>(sec.deltas.size());
    mv.resize(s);
    mh.resize(s);
    for (int i = 0; i < s; ++i) {
        const auto c = optics::channel_coefficients(optics_, sec.deltas(i) + shift);
        mv(i) = c.r_cr;
        mh(i) = c.r_co;
    }
}

void BathEngine::init_varrho(State& s) const {
    if (s.rho.size() != sectors_.size()) {
        s.rho.clear();
        s.scratch_o.clear();
        s.scratch_t.clear();
        s.phases.clear();
        s.mv.clear();
        s.mh.clear();
        for (const auto& sec : sectors_) {
            const int n = static_cast<int>(sec.deltas.size());
            s.rho.emplace_back(n, n);
            s.scratch_o.emplace_back(n, n);
            s.scratch_t.emplace_back(n, n);
            s.phases.emplace_back(n);
            s.mv.emplace_back(n);
            s.mh.emplace_back(n);
        }
    }
    for (std::size_t k = 0; k < sectors_.size(); ++k) s.rho[k] = sectors_[k].rho0;
    s.t = 0.0;
}

void BathEngine::init_mixed(State& s) const {
    init_varrho(s);
    for (std::size_t k = 0; k < sectors_.size(); ++k) {
        const int n = static_cast<int>(sectors_[k].deltas.size());
        s.rho[k] = Matrix::Identity(n, n) / static_cast<double>(dim_);
    }
}

void BathEngine::advance(State& s, double to_time) const {
    const double u = to_time - s.t;
    if (u == 0.0) return;
    for (std::size_t k = 0; k < sectors_.size(); ++k) {
        const auto& e = sectors_[k].energies;
        const int n = static_cast<int>(e.size());
        if (n == 1) continue;
        Eigen::VectorXcd& f = s.phases[k];
        for (int a = 0; a < n; ++a) f(a) = std::exp(Complex(0.0, -e(a) * u / hbar));
        Matrix& rho = s.rho[k];
        for (int b = 0; b < n; ++b) {
            const Complex fb = std::conj(f(b));
            for (int a = 0; a < n; ++a) rho(a, b) *= f(a) * fb;
        }
    }
    s.t = to_time;
}

double BathEngine::read(const State& s) const {
    double m = 0.0;
    for (std::size_t k = 0; k < sectors_.size(); ++k) {
        const Matrix& q = sectors_[k].q;
        const Matrix& rho = s.rho[k];
        // Tr(q rho) = sum_ab q(a,b) rho(b,a)
        m += q.transpose().cwiseProduct(rho).sum().real();
    }
    return m;
}

void BathEngine::event_nonselective(State& s, rng::Stream* noise_rng) const {
    const bool sampled = per_event_noise();
    double shift = 0.0;
    if (sampled) {
        if (noise_rng == nullptr)
            throw ConfigError("engine: per-event noise requires a random stream");
        shift = noise_rng->gaussian(noise_->mean_s, noise_->sigma_s);
    }
    for (std::size_t k = 0; k < sectors_.size(); ++k) {
        const Sector& sec = sectors_[k];
        const int n = static_cast<int>(sec.deltas.size());
        if (n == 1) continue;
        Matrix& rho_o = s.scratch_o[k];
        Matrix& tmp = s.scratch_t[k];
        tmp.noalias() = sec.w * s.rho[k];
        rho_o.noalias() = tmp * sec.w.adjoint();
        if (!sampled) {
            rho_o = rho_o.cwiseProduct(sec.r_nonsel);
        } else {
            Eigen::VectorXcd& mv = s.mv[k];
            Eigen::VectorXcd& mh = s.mh[k];
            shifted_vectors(sec, shift, mv, mh);
            for (int b = 0; b < n; ++b)
                for (int a = 0; a < n; ++a) {
                    if (a == b) continue;
                    rho_o(a, b) *= mv(a) * std::conj(mv(b)) + mh(a) * std::conj(mh(b));
                }
        }
        tmp.noalias() = sec.w.adjoint() * rho_o;
        s.rho[k].noalias() = tmp * sec.w;
    }
}

bool BathEngine::event_selective(State& s, rng::Stream& stream) const {
    const bool sampled = per_event_noise();
    double shift = 0.0;
    if (sampled) shift = stream.gaussian(noise_->mean_s, noise_->sigma_s);

    // rotate all sectors into the Overhauser basis
    double pv = 0.0;
    for (std::size_t k = 0; k < sectors_.size(); ++k) {
        const Sector& sec = sectors_[k];
        Matrix& rho_o = s.scratch_o[k];
        Matrix& tmp = s.scratch_t[k];
        tmp.noalias() = sec.w * s.rho[k];
        rho_o.noalias() = tmp * sec.w.adjoint();
        if (sampled) {
            shifted_vectors(sec, shift, s.mv[k], s.mh[k]);
            pv += s.mv[k].cwiseAbs2().dot(rho_o.diagonal().real());
        } else {
            pv += sec.o_eff.dot(rho_o.diagonal().real());
        }
    }
    pv = std::clamp(pv, 0.0, 1.0);
    const bool outcome_v = stream.uniform01() < pv;
    const double p = outcome_v ? pv : 1.0 - pv;
    if (!(p > 0.0)) throw NumericError("selective event: zero-probability outcome");

    for (std::size_t k = 0; k < sectors_.size(); ++k) {
        const Sector& sec = sectors_[k];
        const int n = static_cast<int>(sec.deltas.size());
        Matrix& rho_o = s.scratch_o[k];
        Matrix& tmp = s.scratch_t[k];
        if (sampled) {
            const Eigen::VectorXcd& m = outcome_v ? s.mv[k] : s.mh[k];
            for (int b = 0; b < n; ++b)
                for (int a = 0; a < n; ++a)
                    rho_o(a, b) *= m(a) * std::conj(m(b)) / p;
        } else {
            const Matrix& r = outcome_v ? sec.r_v : sec.r_h;
            rho_o = rho_o.cwiseProduct(r) / p;
        }
        tmp.noalias() = sec.w.adjoint() * rho_o;
        s.rho[k].noalias() = tmp * sec.w;
    }
    return outcome_v;
}

std::vector<double> BathEngine::nonselective_curve(const zeno::ScatteringSchedule& schedule,
                                                   const std::vector<double>& taus,
                                                   rng::Stream* noise_rng) const {
    State st;
    init_varrho(st);
    std::vector<double> curve;
    curve.reserve(taus.size());
    std::size_t next_event = 0;
    for (double tau : taus) {
        while (next_event < schedule.times.size() && schedule.times[next_event] <= tau) {
            advance(st, schedule.times[next_event]);
            event_nonselective(st, noise_rng);
            ++next_event;
        }
        advance(st, tau);
        curve.push_back(read(st));
    }
    return curve;
}

std::vector<double> BathEngine::selective_record(double rate, double duration,
                                                 rng::Stream& stream) const {
    State st;
    init_mixed(st);
    std::vector<double> v_times;
    if (rate <= 0.0) return v_times;
    double t = stream.exponential(rate);
    while (t < duration) {
        advance(st, t);
        if (event_selective(st, stream)) v_times.push_back(t);
        t += stream.exponential(rate);
    }
    return v_times;
}

// ---------------------------- estimators -------------------------------

namespace {

struct Accumulator {
    std::vector<double> sum, sumsq;
    long n = 0;
    explicit Accumulator(std::size_t points) : sum(points, 0.0), sumsq(points, 0.0) {}
    void add(const std::vector<double>& curve) {
        for (std::size_t k = 0; k < curve.size(); ++k) {
            sum[k] += curve[k];
            sumsq[k] += curve[k] * curve[k];
        }
        ++n;
    }
};

void run_parallel(int n_jobs, int threads, const std::function<void(int)>& job) {
    if (threads <= 1 || n_jobs <= 1) {
        for (int i = 0; i < n_jobs; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_jobs) return;
            job(i);
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min(threads, n_jobs);
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

void warn_high_rate(const RunConfig& cfg, SeriesMeta& meta) {
    const double per_step = cfg.rate * cfg.tau_max / (cfg.tau_points - 1);
    if (per_step > 10.0)
        meta.warnings.push_back("expected events per tau-grid step is " +
                                std::to_string(per_step) + "; runtime scales with it");
}

// Non-selective numerator curves for one bath, reduced in trajectory order.
void bath_nonselective(const BathEngine& engine, const RunConfig& cfg, int bath_index,
                       Accumulator& acc) {
    const auto taus = cfg.tau_grid();
    if (cfg.rate == 0.0) {
        zeno::ScatteringSchedule empty;
        empty.tau = cfg.tau_max;
        acc.add(engine.nonselective_curve(empty, taus, nullptr));
        return;
    }
    std::vector<std::vector<double>> curves(cfg.n_trajectories);
    run_parallel(cfg.n_trajectories, cfg.threads, [&](int i) {
        rng::Stream st(cfg.seed, rng::Purpose::trajectory,
                       static_cast<std::uint64_t>(bath_index),
                       static_cast<std::uint64_t>(i));
        const auto schedule = sample_event_times(cfg.rate, cfg.tau_max, st);
        curves[i] = engine.nonselective_curve(schedule, taus, &st);
    });
    for (const auto& c : curves) acc.add(c);
}

CorrelationSeries finalize_nonselective(const RunConfig& cfg, const Accumulator& acc,
                                        const std::vector<double>& p_v_per_bath,
                                        SeriesMeta meta) {
    CorrelationSeries out;
    out.taus = cfg.tau_grid();
    const long n = acc.n;
    double norm = 0.0;
    if (cfg.normalization == Normalization::pooled) {
        double pbar = 0.0;
        for (double p : p_v_per_bath) pbar += p;
        pbar /= static_cast<double>(p_v_per_bath.size());
        norm = pbar * pbar;
    }
    if (!(norm > 0.0) && cfg.normalization == Normalization::pooled)
        throw NumericError("g2: undefined correlation, ensemble Tr(O_V rho_N) = 0");
    for (std::size_t k = 0; k < out.taus.size(); ++k) {
        const double mean = acc.sum[k] / n;
        const double var = n > 1 ? std::max(0.0, (acc.sumsq[k] - n * mean * mean) / (n - 1)) : 0.0;
        const double se = n > 1 ? std::sqrt(var / n) : 0.0;
        out.g2.push_back(mean / norm);
        out.stderr_.push_back(se / norm);
    }
    meta.rate = cfg.rate;
    meta.seed = cfg.seed;
    meta.n_trajectories = cfg.rate == 0.0 ? 1 : cfg.n_trajectories;
    meta.p_v_per_bath = p_v_per_bath;
    out.meta = std::move(meta);
    return out;
}

}  // namespace

CorrelationSeries g2_nonselective(const RunConfig& cfg) {
    cfg.validate();
    BathEngine engine(cfg.bath, cfg.optics, cfg.noise);
    if (!(engine.p_v() > 0.0))
        throw NumericError("g2_nonselective: undefined correlation, Tr(O_V rho_N) = 0");
    SeriesMeta meta;
    meta.estimator = "nonselective";
    meta.n_bath_draws = 1;
    warn_high_rate(cfg, meta);
    Accumulator acc(cfg.tau_points);
    bath_nonselective(engine, cfg, 0, acc);
    return finalize_nonselective(cfg, acc, {engine.p_v()}, std::move(meta));
}

CorrelationSeries ensemble_g2(const RunConfig& cfg, const BathSampler& sampler) {
    cfg.validate();
    if (cfg.estimator == Estimator::selective)
        throw ConfigError("ensemble_g2: selective estimator supports single baths only");
    SeriesMeta meta;
    meta.estimator = "nonselective";
    meta.n_bath_draws = cfg.n_bath_draws;
    warn_high_rate(cfg, meta);
    Accumulator acc(cfg.tau_points);
    std::vector<double> p_v_per_bath;
    std::vector<Accumulator> per_bath;
    for (int b = 0; b < cfg.n_bath_draws; ++b) {
        rng::Stream bstream(cfg.seed, rng::Purpose::bath_draw, static_cast<std::uint64_t>(b));
        bath::SpinBathSpec spec = sampler(bstream);
        RunConfig sub = cfg;
        sub.bath = spec;
        BathEngine engine(spec, cfg.optics, cfg.noise);
        p_v_per_bath.push_back(engine.p_v());
        if (cfg.normalization == Normalization::per_bath) {
            if (!(engine.p_v() > 0.0))
                throw NumericError("ensemble_g2: bath draw with Tr(O_V rho_N) = 0 "
                                   "cannot be normalised per bath");
            Accumulator bacc(cfg.tau_points);
            bath_nonselective(engine, sub, b, bacc);
            // rescale curves into g2 units before pooling
            const double inv = 1.0 / (engine.p_v() * engine.p_v());
            for (std::size_t k = 0; k < bacc.sum.size(); ++k) {
                bacc.sum[k] *= inv;
                bacc.sumsq[k] *= inv * inv;
            }
            per_bath.push_back(std::move(bacc));
        } else {
            bath_nonselective(engine, sub, b, acc);
        }
    }
    if (cfg.normalization == Normalization::per_bath) {
        Accumulator merged(cfg.tau_points);
        for (const auto& bacc : per_bath) {
            for (std::size_t k = 0; k < merged.sum.size(); ++k) {
                merged.sum[k] += bacc.sum[k];
                merged.sumsq[k] += bacc.sumsq[k];
            }
            merged.n += bacc.n;
        }
        RunConfig unit = cfg;
        unit.normalization = Normalization::pooled;
        CorrelationSeries out =
            finalize_nonselective(unit, merged, std::vector<double>(cfg.n_bath_draws, 1.0),
                                  std::move(meta));
        out.meta.p_v_per_bath = p_v_per_bath;
        out.meta.n_bath_draws = cfg.n_bath_draws;
        return out;
    }
    return finalize_nonselective(cfg, acc, p_v_per_bath, std::move(meta));
}

CorrelationSeries g2_selective(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.rate <= 0.0)
        throw ConfigError("g2_selective: requires rate > 0 (no detections otherwise)");
    BathEngine engine(cfg.bath, cfg.optics, cfg.noise);
    if (!(engine.p_v() > 0.0))
        throw NumericError("g2_selective: undefined correlation, Tr(O_V rho_N) = 0");
    const auto taus = cfg.tau_grid();
    const double width = cfg.tau_max / (cfg.tau_points - 1);
    const double duration = cfg.selective_window_factor * cfg.tau_max;

    std::vector<std::vector<double>> counts(cfg.n_trajectories);
    std::vector<long> n_v(cfg.n_trajectories, 0);
    run_parallel(cfg.n_trajectories, cfg.threads, [&](int i) {
        rng::Stream st(cfg.seed, rng::Purpose::trajectory, 0,
                       static_cast<std::uint64_t>(i));
        const auto times = engine.selective_record(cfg.rate, duration, st);
        n_v[i] = static_cast<long>(times.size());
        std::vector<double> c(taus.size(), 0.0);
        // histogram ordered pair delays into bins centred on the tau grid
        for (std::size_t a = 0; a < times.size(); ++a) {
            for (std::size_t b = a + 1; b < times.size(); ++b) {
                const double d = times[b] - times[a];
                if (d >= cfg.tau_max + 0.5 * width) break;
                const int bin = static_cast<int>(std::floor(d / width + 0.5));
                if (bin < static_cast<int>(taus.size())) c[bin] += 1.0;
            }
        }
        counts[i] = std::move(c);
    });

    long total_v = 0;
    for (long v : n_v) total_v += v;
    const double lambda_v =
        static_cast<double>(total_v) / (cfg.n_trajectories * duration);

    CorrelationSeries out;
    out.taus = taus;
    out.meta.rate = cfg.rate;
    out.meta.seed = cfg.seed;
    out.meta.estimator = "selective";
    out.meta.n_trajectories = cfg.n_trajectories;
    out.meta.n_bath_draws = 1;
    out.meta.p_v_per_bath = {engine.p_v()};
    if (total_v < 1000)
        out.meta.warnings.push_back("insufficient V events (" + std::to_string(total_v) +
                                    "); g2 estimate has wide errors");
    if (!(lambda_v > 0.0))
        throw NumericError("g2_selective: no V detections in the simulated records");
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double bin_width = (k == 0) ? 0.5 * width : width;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < cfg.n_trajectories; ++i) {
            const double g =
                counts[i][k] / (lambda_v * lambda_v * bin_width * (duration - taus[k]));
            sum += g;
            sumsq += g * g;
        }
        const double n = cfg.n_trajectories;
        const double mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sumsq - n * mean * mean) / (n - 1)) : 0.0;
        out.g2.push_back(mean);
        out.stderr_.push_back(n > 1 ? std::sqrt(var / n) : 0.0);
    }
    return out;
}

}  // namespace zenodot::mc
