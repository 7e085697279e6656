// measurement.hpp — photon-scattering measurement channels on the nuclear bath
//
// All states and channels live in the Overhauser eigenbasis: the measurement
// operators M_V, M_H are diagonal there, M_c = sum_delta r_c(delta)|d><d|, so
// channel applications are elementwise operations. A non-selective scattering
// event rescales the (i, j) coherence by the indistinguishability factor
// r_dd' = r_co(d_i) r_co(d_j)* + r_cr(d_i) r_cr(d_j)'; the diagonal factor is
// pinned to exactly 1 (POVM completeness), which makes the map trace
// preserving to rounding over arbitrarily many events.
//
// Stochastic resonance shifts (Markovian charge noise) are carried as a Kraus
// family: one (weight, shift) node per Gauss-Hermite quadrature point of the
// Gaussian shift distribution. sigma_s = 0 degenerates to the single noiseless
// node, making every noisy construct equal to its noiseless counterpart.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

#include "zenodot/reflectivity.hpp"
#include "zenodot/spin_bath.hpp"

namespace zenodot::channel {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

struct NuclearState {
    Matrix matrix;        // density matrix, possibly unnormalised
    double trace = 0.0;   // cached Tr(matrix)
    const bath::SpectralDecomposition* basis = nullptr;  // observer, may be null

    NuclearState() = default;
    explicit NuclearState(Matrix m, const bath::SpectralDecomposition* b = nullptr)
        : matrix(std::move(m)), trace(matrix.trace().real()), basis(b) {}

    int dim() const { return static_cast<int>(matrix.rows()); }

    static NuclearState maximally_mixed(int dim,
                                        const bath::SpectralDecomposition* b = nullptr);
    static NuclearState from_diagonal(const Eigen::VectorXd& diag,
                                      const bath::SpectralDecomposition* b = nullptr);
    static NuclearState basis_state(int dim, int index,
                                    const bath::SpectralDecomposition* b = nullptr);
};

enum class NoiseMode { averaged_channel, per_event_sample };

struct NoiseSpec {
    double sigma_s = 0.0;   // std. deviation of the resonance shift, ueV
    double mean_s = 0.0;    // ueV
    int n_quad = 21;        // Gauss-Hermite nodes for the averaged channel
    NoiseMode mode = NoiseMode::per_event_sample;

    void validate() const;  // throws ConfigError
};

struct KrausNode {
    double weight = 1.0;        // p(s) quadrature weight, weights sum to 1
    double shift = 0.0;         // s, ueV
    Eigen::VectorXcd m_v, m_h;  // diagonals of M_V^s, M_H^s
};

struct MeasurementChannel {
    Eigen::VectorXcd m_v, m_h;       // unshifted diagonals of M_V, M_H
    Eigen::VectorXd o_v, o_h;        // |m_v|^2, |m_h|^2
    Eigen::VectorXd deltas;          // Overhauser eigenvalues per basis state
    std::vector<KrausNode> family;   // noise family; single node when noiseless
    Eigen::VectorXd o_v_eff, o_h_eff;  // family-averaged POVM diagonals

    int dim() const { return static_cast<int>(deltas.size()); }
    bool noisy() const {
        return family.size() > 1 || (family.size() == 1 && family[0].shift != 0.0);
    }
};

enum class Outcome { V, H };

MeasurementChannel build_channel(const optics::OpticalParams& p,
                                 const bath::SpectralDecomposition& basis);

MeasurementChannel build_noisy_channel(const optics::OpticalParams& p,
                                       const bath::SpectralDecomposition& basis,
                                       const NoiseSpec& noise);

// M_c rho M_c^dagger (unnormalised) and the outcome probability
// Tr(M_c rho M_c^dagger) / Tr(rho). Averages over the noise family when present.
std::pair<NuclearState, double> apply_selective(const MeasurementChannel& ch,
                                                const NuclearState& rho, Outcome c);

// Non-selective scattering event, M_V rho M_V^dagger + M_H rho M_H^dagger,
// using the unshifted operators.
NuclearState apply_nonselective(const MeasurementChannel& ch, const NuclearState& rho);

// Non-selective event averaged over the stochastic-shift family.
NuclearState apply_noisy_nonselective(const MeasurementChannel& ch,
                                      const NuclearState& rho);

// r_dd' for basis states (i, j); returns exactly 1 for i == j.
Complex coherence_factor(const MeasurementChannel& ch, int i, int j);

// family-averaged coherence factor sum_s p(s) r_dd'(s)
Complex averaged_coherence_factor(const MeasurementChannel& ch, int i, int j);

// Gauss-Hermite quadrature for a standard normal expectation; returns
// (abscissa, weight) pairs with weights normalised to sum to 1.
std::vector<std::pair<double, double>> gauss_hermite_normal(int n);

// E_s[|r_cr(delta + s)|^2] under s ~ N(mean, sigma), evaluated per delta.
// |r_cr|^2 is an exact Lorentzian in the shift, so each Gaussian segment is
// integrated in closed form; accurate for any linewidth-to-sigma ratio
// (Gauss-Hermite nodes cannot resolve lines much narrower than sigma).
Eigen::VectorXd gaussian_average_povm(const optics::OpticalParams& p,
                                      const Eigen::VectorXd& deltas, double mean,
                                      double sigma);

}  // namespace zenodot::channel
