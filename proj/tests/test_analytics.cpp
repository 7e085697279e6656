#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracle.hpp"
#include "zenodot/analytics.hpp"
#include "zenodot/errors.hpp"
#include "zenodot/random.hpp"
#include "zenodot/units.hpp"

using namespace zenodot;
using zeno::Matrix;
using Complex = std::complex<double>;

namespace {

bath::SpinBathSpec canonical_fig3_bath() {
    bath::SpinBathSpec s;
    s.n_spins = 2;
    s.couplings = {1.0, 3.0};
    s.zeeman = {2.5, 1.5};
    s.electron_zeeman = 40.0;
    return s;
}

// probe detuned onto the upper middle Overhauser line
optics::OpticalParams fig3_optics() {
    return {.omega_c = 0.0, .omega_0 = 0.0, .omega_L = 2.0, .kappa = 4000.0, .g = 30.0};
}

zeno::ZenoContext fig3_ctx() {
    return zeno::make_zeno_context(canonical_fig3_bath(), fig3_optics());
}

zeno::ScatteringSchedule schedule_of(std::vector<double> times, double tau) {
    zeno::ScatteringSchedule s;
    s.times = std::move(times);
    s.tau = tau;
    return s;
}

// dense reference evolution built from the oracle constructions: propagate
// with dense exponentials and Kraus products, no elementwise shortcuts
double dense_exclusive(const zeno::ZenoContext& ctx, const zeno::ScatteringSchedule& sch) {
    const int d = ctx.spec.dim();
    Eigen::SelfAdjointEigenSolver<Matrix> es(ctx.h_n);
    auto u_of = [&](double dt) -> Matrix {
        Eigen::VectorXcd ph(d);
        for (int a = 0; a < d; ++a)
            ph(a) = std::exp(Complex(0, -es.eigenvalues()(a) * dt / hbar));
        return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    };
    const Matrix mv = ctx.ch.m_v.asDiagonal();
    const Matrix mh = ctx.ch.m_h.asDiagonal();
    Matrix rho = ctx.varrho.matrix;
    double t = 0.0;
    for (double te : sch.times) {
        const Matrix u = u_of(te - t);
        rho = u * rho * u.adjoint();
        rho = mv * rho * mv.adjoint() + mh * rho * mh.adjoint();
        t = te;
    }
    const Matrix u = u_of(sch.tau - t);
    rho = u * rho * u.adjoint();
    Complex out = 0.0;
    for (int i = 0; i < d; ++i) out += ctx.ch.o_v(i) * rho(i, i);
    return out.real();
}

}  // namespace

TEST_CASE("zeno context basics") {
    const auto ctx = fig3_ctx();
    CHECK(ctx.p_v == doctest::Approx(0.250429475808938).epsilon(1e-12));
    CHECK(ctx.m0 == doctest::Approx(0.249987601691743).epsilon(1e-12));
    // varrho trace equals Tr(O_V rho_ss)
    CHECK(ctx.varrho.trace == doctest::Approx(ctx.p_v).epsilon(1e-12));
    // middle Overhauser pair at +/- sqrt(4 + 0.0375^2)
    CHECK(ctx.overhauser.eigenvalues(2) ==
          doctest::Approx(std::sqrt(4.0 + 0.0375 * 0.0375)).epsilon(1e-12));
}

TEST_CASE("zeno_time") {
    SUBCASE("single spin has frozen dynamics") {
        bath::SpinBathSpec s;
        s.n_spins = 1;
        s.couplings = {1.0};
        s.zeeman = {0.5};
        s.electron_zeeman = 10.0;
        const auto ctx = zeno::make_zeno_context(s, fig3_optics());
        CHECK_THROWS_AS(zeno::zeno_time(ctx), NumericError);
    }
    SUBCASE("uniform nuclear zeeman freezes the two-spin bath") {
        auto s = canonical_fig3_bath();
        s.zeeman = {1.1, 1.1};
        const auto ctx = zeno::make_zeno_context(s, fig3_optics());
        CHECK_THROWS_AS(zeno::zeno_time(ctx), NumericError);
    }
    SUBCASE("canonical fig. 3 configuration, frozen golden value") {
        // brute-force value from the independent oracle route
        CHECK(zeno::zeno_time(fig3_ctx()) ==
              doctest::Approx(49.6713723637232).epsilon(1e-10));
    }
    SUBCASE("matches a dense double-commutator evaluated from scratch") {
        const auto ctx = fig3_ctx();
        const Matrix ref_d = oracle::overhauser({1.0, 3.0}, 40.0, true);
        const Matrix ref_h = oracle::nuclear_h({1.0, 3.0}, {2.5, 1.5}, 40.0, true);
        Eigen::SelfAdjointEigenSolver<Matrix> es(ref_d);
        const Matrix ho = es.eigenvectors().adjoint() * ref_h * es.eigenvectors();
        const double pi = 3.14159265358979323846;
        const Complex r0 = Complex(0.0 - 2.0, pi * 4000.0) / Complex(0.0 - 2.0, -pi * 4000.0);
        Eigen::VectorXd ov(4);
        for (int i = 0; i < 4; ++i)
            ov(i) = std::norm(0.5 * (oracle::reflectivity(0, 0, 2.0, 4000, 30,
                                                          es.eigenvalues()(i)) -
                                     r0));
        Matrix varrho = Matrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i) varrho(i, i) = ov(i) / 4.0;
        const Matrix c1 = ho * varrho - varrho * ho;
        const Matrix c2 = ho * c1 - c1 * ho;
        Complex tr = 0.0;
        for (int i = 0; i < 4; ++i) tr += ov(i) * c2(i, i);
        CHECK(zeno::zeno_time(ctx) ==
              doctest::Approx(hbar / std::sqrt(tr.real())).epsilon(1e-9));
    }
}

TEST_CASE("low_power_g2") {
    SUBCASE("single spin: constant series") {
        bath::SpinBathSpec s;
        s.n_spins = 1;
        s.couplings = {0.05};
        s.zeeman = {0.5};
        s.electron_zeeman = 10.0;
        const auto ctx = zeno::make_zeno_context(s, fig3_optics());
        const auto series = zeno::low_power_g2(ctx, {0.0, 1.0, 10.0, 500.0});
        for (double g : series.g2) CHECK(g == doctest::Approx(series.g2[0]).epsilon(1e-12));
    }
    SUBCASE("g2(0) = Tr(O_V^2 rho)/Tr(O_V rho)^2 >= 1 for maximally mixed states") {
        rng::Stream st(53, rng::Purpose::generic);
        for (int rep = 0; rep < 10; ++rep) {
            bath::SpinBathSpec s;
            s.n_spins = 2 + static_cast<int>(st.uniform01() * 2);
            for (int k = 0; k < s.n_spins; ++k) {
                s.couplings.push_back(st.gaussian(0.5, 0.3));
                s.zeeman.push_back(st.gaussian(0.5, 0.2));
            }
            s.electron_zeeman = 20.0;
            optics::OpticalParams p = fig3_optics();
            p.omega_L = st.gaussian(0.0, 1.0);
            const auto ctx = zeno::make_zeno_context(s, p);
            if (!(ctx.p_v > 0.0)) continue;
            const auto series = zeno::low_power_g2(ctx, {0.0});
            CHECK(series.g2[0] >= 1.0 - 1e-10);
            CHECK(series.g2[0] ==
                  doctest::Approx(ctx.m0 / (ctx.p_v * ctx.p_v)).epsilon(1e-12));
        }
    }
    SUBCASE("fig. 3 config: quadratic law with quartic remainder") {
        const auto ctx = fig3_ctx();
        const double tz = zeno::zeno_time(ctx);
        const double g20 = ctx.m0 / (ctx.p_v * ctx.p_v);
        auto remainder = [&](double tau) {
            const auto s = zeno::low_power_g2(ctx, {tau});
            const double quad = g20 - tau * tau / (2.0 * tz * tz * ctx.p_v * ctx.p_v);
            return std::abs(s.g2[0] - quad);
        };
        // halving tau shrinks the remainder by ~16 (odd orders vanish)
        const double tau = 0.04 * tz;
        const double r1 = remainder(tau);
        const double r2 = remainder(tau / 2.0);
        CHECK(r1 > 0.0);
        CHECK(r1 / r2 > 10.0);
        CHECK(r1 / r2 < 24.0);
    }
    SUBCASE("undefined correlation when the cross channel is closed") {
        auto p = fig3_optics();
        p.g = 0.0;
        const auto ctx = zeno::make_zeno_context(canonical_fig3_bath(), p);
        CHECK_THROWS_AS(zeno::low_power_g2(ctx, {0.0}), NumericError);
    }
}

TEST_CASE("exclusive_probability_exact") {
    const auto ctx = fig3_ctx();

    SUBCASE("empty schedule reduces to the low-power numerator") {
        for (double tau : {0.5, 3.0, 17.0}) {
            const double p = zeno::exclusive_probability_exact(ctx, schedule_of({}, tau));
            const double g = zeno::low_power_g2(ctx, {tau}).g2[0];
            CHECK(p == doctest::Approx(g * ctx.p_v * ctx.p_v).epsilon(1e-12));
        }
    }
    SUBCASE("matches the dense kron-built reference on random schedules") {
        rng::Stream st(59, rng::Purpose::generic);
        for (int rep = 0; rep < 20; ++rep) {
            const double tau = 2.0 + 10.0 * st.uniform01();
            std::vector<double> times;
            double t = tau * st.uniform01() * 0.3;
            while (t < tau && times.size() < 8) {
                times.push_back(t);
                t += tau * (0.05 + 0.3 * st.uniform01());
            }
            const auto sch = schedule_of(times, tau);
            CHECK(zeno::exclusive_probability_exact(ctx, sch) ==
                  doctest::Approx(dense_exclusive(ctx, sch)).epsilon(1e-11));
        }
    }
    SUBCASE("applying the channel twice squares the coherence factor") {
        auto rho = channel::NuclearState(Matrix::Ones(4, 4) / 4.0);
        const auto once = channel::apply_nonselective(ctx.ch, rho);
        const auto twice = channel::apply_nonselective(ctx.ch, once);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                if (i == j) continue;
                const Complex f = channel::coherence_factor(ctx.ch, i, j);
                CHECK(std::abs(twice.matrix(i, j) - f * f * rho.matrix(i, j) / 1.0) <
                      1e-13);
            }
    }
    SUBCASE("frozen dynamics: schedule independent") {
        auto s = canonical_fig3_bath();
        s.zeeman = {0.7, 0.7};  // uniform: [H_N, Delta] = 0
        const auto fro = zeno::make_zeno_context(s, fig3_optics());
        const double base = zeno::exclusive_probability_exact(fro, schedule_of({}, 5.0));
        const double with_events =
            zeno::exclusive_probability_exact(fro, schedule_of({1.0, 2.5, 4.0}, 5.0));
        CHECK(base == doctest::Approx(fro.m0).epsilon(1e-12));
        CHECK(with_events == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("slope function") {
    const auto ctx = fig3_ctx();
    const auto sch = schedule_of({3.0, 5.0, 9.0}, 12.0);

    SUBCASE("S_0 = 0") { CHECK(zeno::slope_function(ctx, sch, 0) == 0.0); }

    SUBCASE("single event closed form, frozen golden value") {
        const auto s1 = schedule_of({3.0}, 5.0);
        CHECK(zeno::slope_function(ctx, s1, 1) ==
              doctest::Approx(2.00269293476975e-07).epsilon(1e-9));
    }
    SUBCASE("matches dense brute-force evaluation") {
        // S_1 = Delta_1 Tr(O_V [H, Phi[H, varrho]]) / hbar^2 via dense products
        const auto s1 = schedule_of({3.0}, 5.0);
        const Matrix c1 = ctx.h_n * ctx.varrho.matrix - ctx.varrho.matrix * ctx.h_n;
        const auto phi_c1 = channel::apply_noisy_nonselective(
            ctx.ch, channel::NuclearState(c1, ctx.varrho.basis));
        const Matrix inner = ctx.h_n * phi_c1.matrix - phi_c1.matrix * ctx.h_n;
        Complex tr = 0.0;
        for (int i = 0; i < 4; ++i) tr += ctx.ch.o_v(i) * inner(i, i);
        const double expect = 3.0 * tr.real() / (hbar * hbar);
        CHECK(zeno::slope_function(ctx, s1, 1) == doctest::Approx(expect).epsilon(1e-10));
    }
    SUBCASE("identity channel: S_n = t_n / tau_z^2") {
        // keep the fig. 3 POVM and varrho but make scattering polarisation
        // independent: a constant-amplitude Kraus node, coherence factors all 1
        auto ctx_id = fig3_ctx();
        const double tz = zeno::zeno_time(ctx_id);
        channel::KrausNode node;
        node.weight = 1.0;
        node.shift = 0.0;
        node.m_v = Eigen::VectorXcd::Constant(4, Complex(0.6, 0.0));
        node.m_h = Eigen::VectorXcd::Constant(4, Complex(0.8, 0.0));
        ctx_id.ch.family = {node};
        for (int n = 1; n <= 3; ++n) {
            const double sn = zeno::slope_function(ctx_id, sch, n);
            CHECK(sn == doctest::Approx(sch.times[n - 1] / (tz * tz)).epsilon(1e-10));
        }
    }
}

namespace {

// which-state scrambling family: same POVM, fully projective coherence action
void make_projective(zeno::ZenoContext& ctx) {
    const int d = ctx.spec.dim();
    std::vector<channel::KrausNode> family;
    for (int q = 0; q < d; ++q) {
        channel::KrausNode node;
        node.weight = 1.0 / d;
        node.shift = 0.0;
        node.m_v = Eigen::VectorXcd::Zero(d);
        node.m_h = Eigen::VectorXcd::Zero(d);
        node.m_v(q) = std::sqrt(static_cast<double>(d)) * ctx.ch.m_v(q);
        node.m_h(q) = std::sqrt(static_cast<double>(d)) * ctx.ch.m_h(q);
        family.push_back(std::move(node));
    }
    ctx.ch.family = std::move(family);
}

}  // namespace

TEST_CASE("exclusive_probability_perturbative") {
    const auto ctx = fig3_ctx();
    const double tz = zeno::zeno_time(ctx);

    SUBCASE("empty schedule: quadratic law") {
        for (double tau : {0.5, 2.0, 6.0}) {
            const double p =
                zeno::exclusive_probability_perturbative(ctx, schedule_of({}, tau));
            CHECK(p == doctest::Approx(ctx.m0 - tau * tau / (2.0 * tz * tz))
                           .epsilon(1e-12));
        }
    }
    SUBCASE("agrees with the exact route to third order") {
        rng::Stream st(61, rng::Purpose::generic);
        double emax1 = 0.0, emax2 = 0.0;
        for (int rep = 0; rep < 40; ++rep) {
            const double tau = 3.0 + 5.0 * st.uniform01();
            std::vector<double> times;
            double t = tau * (0.05 + 0.2 * st.uniform01());
            while (t < tau && times.size() < 10) {
                times.push_back(t);
                t += tau * (0.08 + 0.25 * st.uniform01());
            }
            const auto sch = schedule_of(times, tau);
            const double e1 = std::abs(zeno::exclusive_probability_exact(ctx, sch) -
                                       zeno::exclusive_probability_perturbative(ctx, sch));
            auto half = sch;
            for (double& x : half.times) x /= 2.0;
            half.tau /= 2.0;
            const double e2 =
                std::abs(zeno::exclusive_probability_exact(ctx, half) -
                         zeno::exclusive_probability_perturbative(ctx, half));
            emax1 = std::max(emax1, e1);
            emax2 = std::max(emax2, e2);
        }
        CHECK(emax1 > 1e-12);          // errors measurable
        CHECK(emax1 / emax2 >= 6.0);   // cubic-or-better scaling
    }
    SUBCASE("projective channel: Markovian linear decay") {
        auto proj = fig3_ctx();
        make_projective(proj);
        const double t2 = 1.0 / (tz * tz);  // same POVM, same tau_z
        for (int n : {4, 9, 19}) {
            const double tau = 8.0;
            const double dt = tau / (n + 1);
            std::vector<double> times;
            for (int k = 1; k <= n; ++k) times.push_back(k * dt);
            const auto sch = schedule_of(times, tau);
            const double p = zeno::exclusive_probability_perturbative(proj, sch);
            CHECK(p == doctest::Approx(proj.m0 - 0.5 * dt * tau * t2).epsilon(1e-9));
        }
        // monotone Zeno flattening: more events, higher probability
        double prev = -1e9;
        for (int n : {1, 3, 7, 15}) {
            const double tau = 8.0;
            std::vector<double> times;
            for (int k = 1; k <= n; ++k) times.push_back(k * tau / (n + 1));
            const double p =
                zeno::exclusive_probability_perturbative(proj, schedule_of(times, tau));
            CHECK(p > prev);
            prev = p;
        }
    }
    SUBCASE("trace identities behind the expansion") {
        // Tr[Phi A] = Tr[A]; Tr[Phi(O_V A)] = Tr[O_V Phi(A)]; Tr[O_V varrho_k^(1)] = 0
        rng::Stream st(67, rng::Purpose::generic);
        Matrix a(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) a(i, j) = Complex(st.gaussian(), st.gaussian());
        const Matrix ov = ctx.ch.o_v_eff.cast<Complex>().asDiagonal();
        const auto phi = [&](const Matrix& x) {
            return channel::apply_noisy_nonselective(ctx.ch, channel::NuclearState(x))
                .matrix;
        };
        CHECK(std::abs(phi(a).trace() - a.trace()) < 1e-12);
        CHECK(std::abs((phi(ov * a)).trace() - (ov * phi(a)).trace()) < 1e-12);
        // varrho_k^(1) is a repeated channel image of a commutator: traceless and
        // O_V-traceless
        const Matrix c1 = ctx.h_n * ctx.varrho.matrix - ctx.varrho.matrix * ctx.h_n;
        Matrix rk = phi(c1);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(rk.trace()) < 1e-12);
            CHECK(std::abs((ov * rk).trace()) < 1e-12);
            rk = phi(rk);
        }
    }
}

TEST_CASE("sawtooth trajectory") {
    const auto ctx = fig3_ctx();
    // middle pair, bright state first: deltas ascend, so indices 2 (bright) and 1
    const int i = 2, j = 1;

    SUBCASE("no events: linear coherence growth, quadratic population decay") {
        const auto pts = zeno::sawtooth_trajectory(ctx, i, j, std::nullopt, 8.0, 160);
        CHECK(pts.front().bloch_z == doctest::Approx(1.0));
        CHECK(pts.front().bloch_y == doctest::Approx(0.0));
        // linear growth: y(2t)/y(t) ~ 2 at small t
        const double y1 = std::abs(pts[10].bloch_y);
        const double y2 = std::abs(pts[20].bloch_y);
        CHECK(y2 / y1 == doctest::Approx(2.0).epsilon(0.02));
        // quadratic decay: (1 - z(2t)) / (1 - z(t)) ~ 4
        const double z1 = 1.0 - pts[10].bloch_z;
        const double z2 = 1.0 - pts[20].bloch_z;
        CHECK(z2 / z1 == doctest::Approx(4.0).epsilon(0.02));
    }
    SUBCASE("events rescale the tracked coherence by the channel factor") {
        const auto free_run = zeno::sawtooth_trajectory(ctx, i, j, std::nullopt, 8.0, 800);
        const auto kicked = zeno::sawtooth_trajectory(ctx, i, j, 4.0, 8.0, 800);
        // identical up to just before the first event at t = 4
        for (int k = 0; k < 400; ++k) {
            CHECK(kicked[k].bloch_y == doctest::Approx(free_run[k].bloch_y).epsilon(1e-12));
            CHECK(kicked[k].bloch_z == doctest::Approx(free_run[k].bloch_z).epsilon(1e-12));
        }
        // discontinuity exactly at the event
        const double jump =
            std::abs(kicked[400].bloch_y - free_run[400].bloch_y);
        CHECK(jump > 1e-4);
        const double pre_gap = std::abs(kicked[399].bloch_y - free_run[399].bloch_y);
        CHECK(pre_gap < 1e-12);
    }
    SUBCASE("more frequent events flatten the p curve (fig. 3 ordering)") {
        const auto none = zeno::sawtooth_trajectory(ctx, i, j, std::nullopt, 20.0, 400);
        const auto five = zeno::sawtooth_trajectory(ctx, i, j, 5.0, 20.0, 400);
        const auto two = zeno::sawtooth_trajectory(ctx, i, j, 2.0, 20.0, 400);
        CHECK(two.back().p_value > five.back().p_value);
        CHECK(five.back().p_value > none.back().p_value);
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(zeno::sawtooth_trajectory(ctx, 1, 1, std::nullopt, 5.0, 10),
                        ConfigError);
        CHECK_THROWS_AS(zeno::sawtooth_trajectory(ctx, 0, 1, -2.0, 5.0, 10), ConfigError);
    }
}
