// reflectivity.hpp — cavity reflection coefficients and polarisation channels
//
// Single-sided lossless cavity with a two-level transition of energy
// omega_0 + delta, probed at omega_L. The reflected amplitude is
//   r = 1 + 2 i pi kappa (omega_0 + delta - omega_L)
//           / [(omega_c - omega_L - i pi kappa)(omega_0 + delta - omega_L) - g^2],
// unimodular for real parameters. The empty-cavity reference r0 is r at g = 0
// (independent of delta), and the co/cross polarised channel amplitudes are
// (r +/- r0)/2.

#pragma once

#include <complex>

namespace zenodot::optics {

using Complex = std::complex<double>;

struct OpticalParams {
    double omega_c = 0.0;   // cavity frequency, ueV
    double omega_0 = 0.0;   // bare transition, ueV
    double omega_L = 0.0;   // probe/laser frequency, ueV
    double kappa = 0.0;     // cavity-port coupling (enters as pi*kappa), ueV
    double g = 0.0;         // transition-cavity coupling, ueV

    void validate() const;  // throws ConfigError
};

struct ChannelCoefficients {
    Complex r;      // full cavity
    Complex r0;     // empty cavity
    Complex r_co;   // (r + r0)/2
    Complex r_cr;   // (r - r0)/2
};

enum class Polarisation { co, cr };

struct ValidityReport {
    double linewidth = 0.0;      // w_f = g^2 / kappa, ueV
    double phase_slope = 0.0;    // 2 pi kappa / g^2, 1/ueV
    double t_delta_min = 0.0;    // hbar / w_f, ns
    double t_fluc = 0.0;         // user-supplied Overhauser fluctuation time, ns
    double threshold = 100.0;
    bool ok = false;             // t_fluc / t_delta_min > threshold
};

// Reflection amplitude at Overhauser shift delta. Throws NumericError when the
// denominator vanishes (only possible for g = 0 with omega_L = omega_0 + delta).
Complex reflectivity(const OpticalParams& p, double delta);

// Empty-cavity reference (g = 0 limit); independent of delta.
Complex empty_cavity_reflectivity(const OpticalParams& p);

ChannelCoefficients channel_coefficients(const OpticalParams& p, double delta);

// |r_c|^2 for the requested channel; values in [0, 1], co + cr = 1.
double povm_weight(const OpticalParams& p, double delta, Polarisation channel);

// arg(r) - arg(r0), wrapped into (-pi, pi]
double phase_shift(const OpticalParams& p, double delta);

ValidityReport validity_report(const OpticalParams& p, double t_fluc,
                               double threshold = 100.0);

}  // namespace zenodot::optics
