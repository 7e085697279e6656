#include "zenodot/analytics.hpp"

#include <cmath>
#include <complex>

#include "zenodot/errors.hpp"
#include "zenodot/units.hpp"

namespace zenodot::zeno {

using Complex = std::complex<double>;

void ScatteringSchedule::validate() const {
    if (!(tau > 0.0)) throw ConfigError("schedule: tau must be > 0");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev && t < tau))
            throw ConfigError("schedule: times must be strictly ascending inside (0, tau)");
        prev = t;
    }
}

ZenoContext make_zeno_context(const bath::SpinBathSpec& spec,
                              const optics::OpticalParams& p,
                              std::optional<Eigen::VectorXd> rho_diag,
                              std::optional<channel::NoiseSpec> noise) {
    spec.validate();
    p.validate();
    ZenoContext ctx;
    ctx.spec = spec;
    ctx.overhauser = bath::spectral(bath::overhauser_operator(spec));
    const Matrix h_lab = bath::nuclear_hamiltonian(spec);
    ctx.h_n = ctx.overhauser.eigenvectors.adjoint() * h_lab * ctx.overhauser.eigenvectors;
    ctx.h_spec = bath::spectral(ctx.h_n);
    ctx.ch = noise ? channel::build_noisy_channel(p, ctx.overhauser, *noise)
                   : channel::build_channel(p, ctx.overhauser);

    const int d = spec.dim();
    Eigen::VectorXd diag;
    if (rho_diag) {
        if (rho_diag->size() != d)
            throw ConfigError("zeno context: rho_diag length must equal 2^n_spins");
        if (rho_diag->minCoeff() < 0.0 || !(rho_diag->sum() > 0.0))
            throw ConfigError("zeno context: rho_diag must be nonnegative with positive sum");
        diag = *rho_diag / rho_diag->sum();
    } else {
        diag = Eigen::VectorXd::Constant(d, 1.0 / d);
    }
    ctx.rho_ss = channel::NuclearState::from_diagonal(diag, &ctx.overhauser);
    ctx.varrho = channel::apply_selective(ctx.ch, ctx.rho_ss, channel::Outcome::V).first;
    ctx.p_v = ctx.ch.o_v_eff.dot(diag);
    ctx.m0 = ctx.varrho.trace == 0.0 ? 0.0 : ctx.ch.o_v_eff.dot(ctx.varrho.matrix.diagonal().real());
    return ctx;
}

namespace {

// coherence-rescaling factor matrix of the non-selective channel (family averaged)
Matrix factor_matrix(const channel::MeasurementChannel& ch) {
    const int d = ch.dim();
    Matrix f = Matrix::Zero(d, d);
    for (const auto& node : ch.family)
        f.noalias() += node.weight * (node.m_v * node.m_v.adjoint() +
                                      node.m_h * node.m_h.adjoint());
    f.diagonal().setOnes();
    return f;
}

double double_commutator_trace(const ZenoContext& ctx) {
    const Matrix& h = ctx.h_n;
    const Matrix c1 = h * ctx.varrho.matrix - ctx.varrho.matrix * h;
    const Matrix c2 = h * c1 - c1 * h;
    return ctx.ch.o_v_eff.dot(c2.diagonal().real());
}

}  // namespace

double zeno_time(const ZenoContext& ctx) {
    const double t = double_commutator_trace(ctx);
    const double scale = std::max(1.0, ctx.h_n.squaredNorm() * ctx.varrho.trace);
    if (!(t > 1e-13 * scale))
        throw NumericError("zeno_time: no quadratic decay (double-commutator trace "
                           "is not positive; frozen dynamics)");
    return hbar / std::sqrt(t);
}

CorrelationSeries low_power_g2(const ZenoContext& ctx, const std::vector<double>& taus) {
    if (!(ctx.p_v > 0.0))
        throw NumericError("low_power_g2: undefined correlation, Tr(O_V rho_N) = 0");
    const int d = ctx.spec.dim();
    const Matrix& w = ctx.h_spec.eigenvectors;
    const Matrix b = w.adjoint() * ctx.varrho.matrix * w;
    const Matrix q = w.adjoint() * ctx.ch.o_v_eff.cast<Complex>().asDiagonal() * w;
    // m(tau) = sum_ab q_ab b_ba exp(-i (E_b - E_a) tau / hbar) = f^dag C f
    const Matrix c = q.cwiseProduct(b.transpose());
    CorrelationSeries out;
    out.taus = taus;
    out.g2.reserve(taus.size());
    out.stderr_.assign(taus.size(), 0.0);
    Eigen::VectorXcd f(d);
    for (double tau : taus) {
        if (tau < 0.0) throw ConfigError("low_power_g2: tau must be >= 0");
        for (int a = 0; a < d; ++a)
            f(a) = std::exp(Complex(0.0, -ctx.h_spec.eigenvalues(a) * tau / hbar));
        const Complex m = f.dot(c * f);  // f^dagger (c f)
        out.g2.push_back(m.real() / (ctx.p_v * ctx.p_v));
    }
    out.meta.rate = 0.0;
    out.meta.estimator = "analytic";
    out.meta.p_v_per_bath = {ctx.p_v};
    return out;
}

double exclusive_probability_exact(const ZenoContext& ctx,
                                   const ScatteringSchedule& schedule) {
    schedule.validate();
    channel::NuclearState rho = ctx.varrho;
    double t = 0.0;
    for (double te : schedule.times) {
        const Matrix u = bath::propagator(ctx.h_spec, te - t);
        rho = channel::NuclearState(u * rho.matrix * u.adjoint(), rho.basis);
        rho = channel::apply_noisy_nonselective(ctx.ch, rho);
        t = te;
    }
    const Matrix u = bath::propagator(ctx.h_spec, schedule.tau - t);
    const Matrix fin = u * rho.matrix * u.adjoint();
    return ctx.ch.o_v_eff.dot(fin.diagonal().real());
}

double slope_function(const ZenoContext& ctx, const ScatteringSchedule& schedule, int n) {
    schedule.validate();
    if (n < 0 || n > static_cast<int>(schedule.times.size()))
        throw ConfigError("slope_function: n out of range");
    if (n == 0) return 0.0;
    const Matrix& h = ctx.h_n;
    const Matrix c1 = h * ctx.varrho.matrix - ctx.varrho.matrix * h;
    const Matrix f = factor_matrix(ctx.ch);
    const int d = ctx.spec.dim();
    // Tr(O_V [H, X]) = sum_ab g_ab x_ba with g = [O_V, H]
    Matrix g(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            g(a, b) = (ctx.ch.o_v_eff(a) - ctx.ch.o_v_eff(b)) * h(a, b);
    // trace_term(m) = Tr(O_V [H, Phi^m(c1)]); accumulate elementwise powers of f
    std::vector<double> trace_term(n + 1, 0.0);
    Matrix fp = Matrix::Ones(d, d);
    for (int m = 1; m <= n; ++m) {
        fp = fp.cwiseProduct(f);
        Complex s(0.0, 0.0);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) s += g(a, b) * fp(b, a) * c1(b, a);
        trace_term[m] = s.real();
    }
    double out = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double dj = schedule.times[j - 1] - (j >= 2 ? schedule.times[j - 2] : 0.0);
        out += dj * trace_term[n - j + 1];
    }
    return out / (hbar * hbar);
}

double exclusive_probability_perturbative(const ZenoContext& ctx,
                                          const ScatteringSchedule& schedule) {
    schedule.validate();
    const int n = static_cast<int>(schedule.times.size());
    const Matrix& h = ctx.h_n;
    const Matrix c1 = h * ctx.varrho.matrix - ctx.varrho.matrix * h;
    const Matrix c2 = h * c1 - c1 * h;
    const double t2 = ctx.ch.o_v_eff.dot(c2.diagonal().real()) / (hbar * hbar);
    double out = ctx.m0;
    double prev = 0.0;
    for (int k = 1; k <= n + 1; ++k) {
        const double tk = (k <= n) ? schedule.times[k - 1] : schedule.tau;
        const double dk = tk - prev;
        prev = tk;
        out -= dk * slope_function(ctx, schedule, k - 1) + 0.5 * dk * dk * t2;
    }
    return out;
}

std::vector<SawtoothPoint> sawtooth_trajectory(const ZenoContext& ctx, int i, int j,
                                               std::optional<double> dt_event,
                                               double t_max, int steps) {
    const int d = ctx.spec.dim();
    if (i < 0 || j < 0 || i >= d || j >= d || i == j)
        throw ConfigError("sawtooth: need two distinct valid basis indices");
    if (dt_event && !(*dt_event > 0.0))
        throw ConfigError("sawtooth: dt_event must be > 0");
    if (!(t_max > 0.0) || steps < 1)
        throw ConfigError("sawtooth: t_max must be > 0 and steps >= 1");

    const Matrix& h = ctx.h_n;
    Matrix base = Matrix::Zero(d, d);
    base(i, i) = 1.0;
    const Matrix c1 = h * base - base * h;
    const Matrix c2 = h * c1 - c1 * h;
    const Matrix f = factor_matrix(ctx.ch);

    Matrix acc1 = Matrix::Zero(d, d);   // first-order contribution after last event
    Matrix acc2 = Matrix::Zero(d, d);
    Matrix h_acc1 = Matrix::Zero(d, d); // [H, acc1], cached per segment
    double t_last = 0.0;
    int event_count = 0;

    const Complex ih(0.0, 1.0 / hbar);
    auto state_at = [&](double u) -> Matrix {
        Matrix cur1 = acc1 - ih * u * c1;
        Matrix cur2 = acc2 - ih * u * h_acc1 - (0.5 * u * u / (hbar * hbar)) * c2;
        return base + cur1 + cur2;
    };
    auto apply_event = [&](double te) {
        const double u = te - t_last;
        Matrix cur1 = acc1 - ih * u * c1;
        Matrix cur2 = acc2 - ih * u * h_acc1 - (0.5 * u * u / (hbar * hbar)) * c2;
        acc1 = f.cwiseProduct(cur1);
        acc2 = f.cwiseProduct(cur2);
        h_acc1 = h * acc1 - acc1 * h;
        t_last = te;
        ++event_count;
    };

    std::vector<SawtoothPoint> out;
    out.reserve(steps + 1);
    const double eps = 1e-9 * t_max;
    for (int k = 0; k <= steps; ++k) {
        const double t = t_max * k / steps;
        if (dt_event) {
            while ((event_count + 1) * *dt_event <= t + eps)
                apply_event((event_count + 1) * *dt_event);
        }
        const Matrix rho = state_at(t - t_last);
        SawtoothPoint pt;
        pt.t = t;
        pt.bloch_y = -2.0 * rho(i, j).imag();
        pt.bloch_z = (rho(i, i) - rho(j, j)).real();
        pt.p_value = ctx.ch.o_v_eff.dot(rho.diagonal().real());
        out.push_back(pt);
    }
    return out;
}

}  // namespace zenodot::zeno
