// spin_bath.hpp — nuclear spin Hilbert space, Overhauser operator and propagators
//
// Basis convention: computational product basis with site-0-major ordering,
// i.e. the bit of site s in basis index i is (i >> (n_spins - 1 - s)) & 1,
// bit 0 = spin up. I^z has eigenvalues +1 (up) and -1 (down); I^+/I^- are the
// standard two-level raising/lowering operators, so [I^z, I^+] = 2 I^+.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace zenodot::bath {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

enum class SpinConvention { pauli };

enum class SiteOperator { z, plus, minus };

struct SpinBathSpec {
    int n_spins = 1;
    std::vector<double> couplings;   // A_k, ueV
    std::vector<double> zeeman;      // omega_k, ueV
    double electron_zeeman = 0.0;    // omega_e, ueV
    bool flip_flop = true;
    SpinConvention convention = SpinConvention::pauli;

    int dim() const { return 1 << n_spins; }
    // throws ConfigError on inconsistent fields
    void validate() const;
};

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    Matrix eigenvectors;           // columns

    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

// Single-site operator tensored with identity on all other sites.
Matrix embed_spin_operator(const SpinBathSpec& spec, int site, SiteOperator which);

// Overhauser shift operator: sum_j A_j I_j^z plus, when flip_flop is set,
// (1/2 omega_e) sum_{m != n} A_m A_n I_m^+ I_n^- over ordered pairs.
Matrix overhauser_operator(const SpinBathSpec& spec);

// H_N = sum_j omega_j I_j^z + Overhauser/2
Matrix nuclear_hamiltonian(const SpinBathSpec& spec);

// Eigendecomposition of a Hermitian operator (ascending eigenvalues).
// Throws NumericError if the input is not Hermitian within tolerance.
SpectralDecomposition spectral(const Matrix& op, double hermitian_tol = 1e-10);

// U = V exp(-i E dt / hbar) V^dagger, dt in ns. Throws NumericError for dt < 0.
Matrix propagator(const SpectralDecomposition& h, double dt);

}  // namespace zenodot::bath
