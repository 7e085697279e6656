#include "zenodot/reflectivity.hpp"

#include <cmath>
#include <numbers>

#include "zenodot/errors.hpp"
#include "zenodot/units.hpp"

namespace zenodot::optics {

namespace {
constexpr double pi = std::numbers::pi;
}

void OpticalParams::validate() const {
    if (!(kappa > 0.0)) throw ConfigError("optics: kappa must be > 0");
    if (g < 0.0) throw ConfigError("optics: g must be >= 0");
    for (double x : {omega_c, omega_0, omega_L, kappa, g})
        if (!std::isfinite(x)) throw ConfigError("optics: parameters must be finite");
}

Complex reflectivity(const OpticalParams& p, double delta) {
    const double detune_q = p.omega_0 + delta - p.omega_L;
    const Complex den =
        Complex(p.omega_c - p.omega_L, -pi * p.kappa) * detune_q - p.g * p.g;
    if (std::abs(den) == 0.0)
        throw NumericError("reflectivity: singular parameters (g = 0 with "
                           "omega_L = omega_0 + delta)");
    return 1.0 + Complex(0.0, 2.0 * pi * p.kappa) * detune_q / den;
}

Complex empty_cavity_reflectivity(const OpticalParams& p) {
    return Complex(p.omega_c - p.omega_L, pi * p.kappa) /
           Complex(p.omega_c - p.omega_L, -pi * p.kappa);
}

ChannelCoefficients channel_coefficients(const OpticalParams& p, double delta) {
    const Complex r0 = empty_cavity_reflectivity(p);
    if (p.g == 0.0) {
        // the transition decouples: both circular components see the empty
        // cavity, so the cross channel closes identically
        return {r0, r0, r0, Complex(0.0, 0.0)};
    }
    const Complex r = reflectivity(p, delta);
    return {r, r0, 0.5 * (r + r0), 0.5 * (r - r0)};
}

double povm_weight(const OpticalParams& p, double delta, Polarisation channel) {
    const ChannelCoefficients c = channel_coefficients(p, delta);
    return channel == Polarisation::cr ? std::norm(c.r_cr) : std::norm(c.r_co);
}

double phase_shift(const OpticalParams& p, double delta) {
    const ChannelCoefficients c = channel_coefficients(p, delta);
    double theta = std::arg(c.r) - std::arg(c.r0);
    theta = std::remainder(theta, 2.0 * pi);
    if (theta <= -pi) theta += 2.0 * pi;
    return theta;
}

ValidityReport validity_report(const OpticalParams& p, double t_fluc, double threshold) {
    p.validate();
    if (!(t_fluc > 0.0)) throw ConfigError("validity_report: t_fluc must be > 0");
    if (!(p.g > 0.0))
        throw NumericError("validity_report: requires g > 0 (no phase-shift feature)");
    ValidityReport rep;
    rep.linewidth = p.g * p.g / p.kappa;
    rep.phase_slope = 2.0 * pi * p.kappa / (p.g * p.g);
    rep.t_delta_min = hbar / rep.linewidth;
    rep.t_fluc = t_fluc;
    rep.threshold = threshold;
    rep.ok = t_fluc / rep.t_delta_min > threshold;
    return rep;
}

}  // namespace zenodot::optics
