// analytics.hpp — second-order perturbative machinery for the measured
// nuclear correlation function
//
// Works on a ZenoContext: the nuclear Hamiltonian expressed in the Overhauser
// eigenbasis together with the scattering measurement channel, a diagonal
// steady state rho_ss and the post-detection state varrho = Phi_V rho_ss.
// Provides the exact propagated joint probability, its second-order expansion
// in the inter-event intervals (recursion closed forms), the Zeno time, the
// slope function, and the two-level sawtooth trajectories.

#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "zenodot/measurement.hpp"
#include "zenodot/series.hpp"
#include "zenodot/spin_bath.hpp"

namespace zenodot::zeno {

using Matrix = Eigen::MatrixXcd;

struct ScatteringSchedule {
    std::vector<double> times;  // strictly ascending, inside (0, tau)
    double tau = 0.0;           // ns

    void validate() const;  // throws ConfigError
};

struct ZenoContext {
    bath::SpinBathSpec spec;
    bath::SpectralDecomposition overhauser;   // defines the basis; eigenvalues = deltas
    Matrix h_n;                               // H_N in the Overhauser basis
    bath::SpectralDecomposition h_spec;       // eigensystem of h_n
    channel::MeasurementChannel ch;
    channel::NuclearState rho_ss;             // diagonal in the Overhauser basis
    channel::NuclearState varrho;             // Phi_V rho_ss (unnormalised)
    double p_v = 0.0;                         // Tr(O_V rho_ss)
    double m0 = 0.0;                          // Tr(O_V varrho) = Tr(O_V^2 rho_ss)
};

// Builds the context from a bath and optics. rho_diag defaults to the
// maximally mixed state; it must commute with O_V (diagonal), which is checked.
ZenoContext make_zeno_context(const bath::SpinBathSpec& spec,
                              const optics::OpticalParams& p,
                              std::optional<Eigen::VectorXd> rho_diag = std::nullopt,
                              std::optional<channel::NoiseSpec> noise = std::nullopt);

// tau_z = hbar / sqrt(Tr(O_V [H_N, [H_N, varrho]])), ns.
// Throws NumericError when the trace is not positive (frozen dynamics).
double zeno_time(const ZenoContext& ctx);

// Exact low-power curve g2(tau) = Tr(O_V U varrho U^dagger) / Tr(O_V rho_ss)^2.
CorrelationSeries low_power_g2(const ZenoContext& ctx, const std::vector<double>& taus);

// Tr(O_V V_tau varrho) with exact unitaries between events and the
// non-selective channel at each event.
double exclusive_probability_exact(const ZenoContext& ctx,
                                   const ScatteringSchedule& schedule);

// Same quantity from the second-order closed forms (recursion solutions).
double exclusive_probability_perturbative(const ZenoContext& ctx,
                                          const ScatteringSchedule& schedule);

// S_n = (1/hbar^2) sum_{j<=n} Delta_j Tr(O_V [H_N, Phi^{n-j+1}[H_N, varrho]]), 1/ns
double slope_function(const ZenoContext& ctx, const ScatteringSchedule& schedule, int n);

struct SawtoothPoint {
    double t = 0.0;
    double bloch_y = 0.0;   // coherence component of the (i, j) sub-block
    double bloch_z = 0.0;   // population difference rho_ii - rho_jj
    double p_value = 0.0;   // running Tr(O_V rho(t))
};

// Perturbative evolution of the pure state |delta_i><delta_i| on a uniform
// grid of `steps` intervals up to t_max, applying the non-selective channel at
// every multiple of dt_event (no events when dt_event is empty). Rows at event
// times hold the post-event state.
std::vector<SawtoothPoint> sawtooth_trajectory(const ZenoContext& ctx, int i, int j,
                                               std::optional<double> dt_event,
                                               double t_max, int steps);

}  // namespace zenodot::zeno
