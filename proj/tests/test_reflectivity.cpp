#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracle.hpp"
#include "zenodot/errors.hpp"
#include "zenodot/random.hpp"
#include "zenodot/reflectivity.hpp"
#include "zenodot/units.hpp"

using namespace zenodot;
using Complex = std::complex<double>;

namespace {

constexpr double pi = 3.14159265358979323846;

optics::OpticalParams fig2_optics() {
    return {.omega_c = 0.0, .omega_0 = 0.0, .omega_L = 0.0, .kappa = 4000.0, .g = 30.0};
}

}  // namespace

TEST_CASE("reflectivity special points") {
    auto p = fig2_optics();

    // exact QD resonance: numerator vanishes
    p.omega_L = 0.37;
    CHECK(std::abs(optics::reflectivity(p, 0.37) - Complex(1.0, 0.0)) < 1e-14);

    // empty cavity on cavity resonance reflects with a sign flip
    optics::OpticalParams p0 = fig2_optics();
    p0.g = 0.0;
    CHECK(std::abs(optics::reflectivity(p0, 0.8) - Complex(-1.0, 0.0)) < 1e-12);

    // fully resonant closed form (1 - ix)/(1 + ix), frozen at kappa=4000, g=30,
    // delta=0.45 where x = 2 pi
    const Complex r = optics::reflectivity(fig2_optics(), 0.45);
    CHECK(r.real() == doctest::Approx(-0.95057).epsilon(2e-4));
    CHECK(r.imag() == doctest::Approx(-0.31035).epsilon(2e-4));
    const double x = pi * 4000.0 * 0.45 / 900.0;
    const Complex closed = (Complex(1, -x)) / (Complex(1, x));
    CHECK(std::abs(r - closed) < 1e-12);

    // singular point: g = 0 and omega_L = omega_0 + delta
    optics::OpticalParams sing = fig2_optics();
    sing.g = 0.0;
    CHECK_THROWS_AS(optics::reflectivity(sing, 0.0), NumericError);
}

TEST_CASE("reflectivity equals the literal formula on random draws") {
    rng::Stream st(19, rng::Purpose::generic);
    for (int rep = 0; rep < 200; ++rep) {
        optics::OpticalParams p;
        p.omega_c = st.gaussian(0, 50);
        p.omega_0 = st.gaussian(0, 50);
        p.omega_L = st.gaussian(0, 50);
        p.kappa = 10.0 + 5000.0 * st.uniform01();
        p.g = 100.0 * st.uniform01();
        const double delta = st.gaussian(0, 5);
        const Complex lib = optics::reflectivity(p, delta);
        const Complex ref =
            oracle::reflectivity(p.omega_c, p.omega_0, p.omega_L, p.kappa, p.g, delta);
        CHECK(std::abs(lib - ref) < 1e-12);
    }
}

TEST_CASE("unimodularity and channel completeness over 1e4 random draws") {
    rng::Stream st(23, rng::Purpose::generic);
    double worst_r = 0.0, worst_sum = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
        optics::OpticalParams p;
        p.omega_c = st.gaussian(0, 100);
        p.omega_0 = st.gaussian(0, 100);
        p.omega_L = st.gaussian(0, 100);
        p.kappa = 1.0 + 6000.0 * st.uniform01();
        p.g = 200.0 * st.uniform01();
        const double delta = st.gaussian(0, 10);
        const auto c = optics::channel_coefficients(p, delta);
        worst_r = std::max({worst_r, std::abs(std::abs(c.r) - 1.0),
                            std::abs(std::abs(c.r0) - 1.0)});
        worst_sum = std::max(worst_sum,
                             std::abs(std::norm(c.r_co) + std::norm(c.r_cr) - 1.0));
    }
    CHECK(worst_r < 1e-12);
    CHECK(worst_sum < 1e-12);
}

TEST_CASE("channel coefficients") {
    const auto p = fig2_optics();

    // delta = 0 fully resonant: all weight in the cross channel
    const auto c0 = optics::channel_coefficients(p, 0.0);
    CHECK(std::abs(c0.r_cr - Complex(1.0, 0.0)) < 1e-13);
    CHECK(std::abs(c0.r_co) < 1e-13);

    // g = 0: no cross-polarised scattering at all
    optics::OpticalParams pg = p;
    pg.g = 0.0;
    for (double delta : {-3.0, 0.7, 12.0})
        CHECK(std::abs(optics::channel_coefficients(pg, delta).r_cr) < 1e-13);

    // crossover at x = 1, i.e. delta = g^2/(pi kappa)
    const double dstar = p.g * p.g / (pi * p.kappa);
    const auto cc = optics::channel_coefficients(p, dstar);
    CHECK(std::norm(cc.r_cr) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(cc.r_co) == doctest::Approx(0.5).epsilon(1e-12));

    // fully resonant closed forms r_cr = 1/(1+ix), r_co = -ix/(1+ix)
    for (double delta : {0.03, 0.2, 1.4}) {
        const double x = pi * p.kappa * delta / (p.g * p.g);
        const auto c = optics::channel_coefficients(p, delta);
        CHECK(std::abs(c.r_cr - 1.0 / Complex(1, x)) < 1e-12);
        CHECK(std::abs(c.r_co - Complex(0, -x) / Complex(1, x)) < 1e-12);
    }
}

TEST_CASE("povm weights") {
    const auto p = fig2_optics();
    CHECK(optics::povm_weight(p, 0.0, optics::Polarisation::cr) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(optics::povm_weight(p, 0.0, optics::Polarisation::co) < 1e-12);
    CHECK(optics::povm_weight(p, 1e5, optics::Polarisation::cr) < 1e-4);
    // symmetry at full resonance
    for (double delta : {0.05, 0.3, 2.0})
        CHECK(optics::povm_weight(p, delta, optics::Polarisation::cr) ==
              doctest::Approx(optics::povm_weight(p, -delta, optics::Polarisation::cr))
                  .epsilon(1e-12));
    // 50/50 crossover found by bisection matches g^2/(pi kappa)
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (optics::povm_weight(p, mid, optics::Polarisation::cr) > 0.5)
            lo = mid;
        else
            hi = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(p.g * p.g / (pi * p.kappa)).epsilon(1e-9));
    CHECK(0.5 * (lo + hi) == doctest::Approx(0.07162).epsilon(2e-4));
}

TEST_CASE("phase shift") {
    const auto p = fig2_optics();
    CHECK(std::abs(optics::phase_shift(p, 0.0)) == doctest::Approx(pi).epsilon(1e-12));

    optics::OpticalParams pg = p;
    pg.g = 0.0;
    CHECK(optics::phase_shift(pg, 0.4) == doctest::Approx(0.0));

    // d arg(r)/d omega_L = 2 pi kappa / g^2 at full resonance, by central difference
    const double h = 1e-6;
    optics::OpticalParams pp = p, pm = p;
    pp.omega_L = h;
    pm.omega_L = -h;
    const double da = (std::arg(optics::reflectivity(pp, 0.0)) -
                       std::arg(optics::reflectivity(pm, 0.0))) /
                      (2.0 * h);
    CHECK(da == doctest::Approx(2.0 * pi * p.kappa / (p.g * p.g)).epsilon(1e-6));

    // wrapped into (-pi, pi]
    rng::Stream st(29, rng::Purpose::generic);
    for (int rep = 0; rep < 100; ++rep) {
        optics::OpticalParams q = p;
        q.omega_L = st.gaussian(0, 10);
        const double theta = optics::phase_shift(q, st.gaussian(0, 2));
        CHECK(theta <= pi);
        CHECK(theta > -pi);
    }
}

TEST_CASE("empty-cavity limit: g = 0 reflectivity equals the reference for all delta") {
    rng::Stream st(31, rng::Purpose::generic);
    for (int rep = 0; rep < 100; ++rep) {
        optics::OpticalParams p;
        p.omega_c = st.gaussian(0, 30);
        p.omega_0 = st.gaussian(0, 30);
        p.omega_L = st.gaussian(0, 30);
        p.kappa = 1.0 + 3000.0 * st.uniform01();
        p.g = 0.0;
        const double delta = st.gaussian(0, 5);
        if (std::abs(p.omega_0 + delta - p.omega_L) < 1e-6) continue;
        CHECK(std::abs(optics::reflectivity(p, delta) -
                       optics::empty_cavity_reflectivity(p)) < 1e-10);
    }
}

TEST_CASE("validity report") {
    const auto p = fig2_optics();
    const auto rep = optics::validity_report(p, 1000.0);
    CHECK(rep.linewidth == doctest::Approx(0.225));
    CHECK(rep.phase_slope == doctest::Approx(2.0 * pi * 4000.0 / 900.0));
    CHECK(rep.phase_slope == doctest::Approx(27.93).epsilon(1e-3));
    CHECK(rep.t_delta_min == doctest::Approx(hbar / 0.225));
    CHECK(rep.t_delta_min == doctest::Approx(2.9254).epsilon(1e-4));
    CHECK(rep.ok);  // 1000 / 2.93 > 100

    CHECK_FALSE(optics::validity_report(p, 100.0).ok);
    CHECK_THROWS_AS(optics::validity_report(p, -1.0), ConfigError);
    optics::OpticalParams bad = p;
    bad.kappa = 0.0;
    CHECK_THROWS_AS(optics::validity_report(bad, 10.0), ConfigError);
}
