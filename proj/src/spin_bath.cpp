#include "zenodot/spin_bath.hpp"

#include <cmath>
#include <string>

#include "zenodot/errors.hpp"
#include "zenodot/units.hpp"

namespace zenodot::bath {

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

void SpinBathSpec::validate() const {
    if (n_spins < 1) throw ConfigError("bath: n_spins must be >= 1");
    if (n_spins > 14)
        throw ConfigError("bath: n_spins = " + std::to_string(n_spins) +
                          " exceeds the dense-matrix limit of 14");
    if (static_cast<int>(couplings.size()) != n_spins)
        throw ConfigError("bath: couplings must have n_spins entries");
    if (static_cast<int>(zeeman.size()) != n_spins)
        throw ConfigError("bath: zeeman must have n_spins entries");
    if (!all_finite(couplings) || !all_finite(zeeman) || !std::isfinite(electron_zeeman))
        throw ConfigError("bath: all energies must be finite");
    if (flip_flop && !(electron_zeeman > 0.0))
        throw ConfigError("bath: electron_zeeman must be > 0 when flip_flop is enabled");
}

Matrix embed_spin_operator(const SpinBathSpec& spec, int site, SiteOperator which) {
    spec.validate();
    if (site < 0 || site >= spec.n_spins)
        throw ConfigError("embed_spin_operator: site out of range");
    const int d = spec.dim();
    const int mask = 1 << (spec.n_spins - 1 - site);
    Matrix m = Matrix::Zero(d, d);
    switch (which) {
        case SiteOperator::z:
            for (int i = 0; i < d; ++i) m(i, i) = (i & mask) ? -1.0 : 1.0;
            break;
        case SiteOperator::plus:
            // |up><down| at the site
            for (int i = 0; i < d; ++i)
                if (i & mask) m(i & ~mask, i) = 1.0;
            break;
        case SiteOperator::minus:
            for (int i = 0; i < d; ++i)
                if (!(i & mask)) m(i | mask, i) = 1.0;
            break;
    }
    return m;
}

Matrix overhauser_operator(const SpinBathSpec& spec) {
    spec.validate();
    const int n = spec.n_spins;
    const int d = spec.dim();
    Matrix m = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        double diag = 0.0;
        for (int s = 0; s < n; ++s) {
            const int mask = 1 << (n - 1 - s);
            diag += (i & mask) ? -spec.couplings[s] : spec.couplings[s];
        }
        m(i, i) = diag;
    }
    if (spec.flip_flop) {
        const double inv2w = 1.0 / (2.0 * spec.electron_zeeman);
        // I_m^+ I_n^- |i> needs site m down and site n up in |i>
        for (int sm = 0; sm < n; ++sm) {
            for (int sn = 0; sn < n; ++sn) {
                if (sm == sn) continue;
                const int mm = 1 << (n - 1 - sm);
                const int mn = 1 << (n - 1 - sn);
                const double amp = spec.couplings[sm] * spec.couplings[sn] * inv2w;
                for (int i = 0; i < d; ++i) {
                    if ((i & mm) && !(i & mn)) m((i & ~mm) | mn, i) += amp;
                }
            }
        }
    }
    return m;
}

Matrix nuclear_hamiltonian(const SpinBathSpec& spec) {
    Matrix h = 0.5 * overhauser_operator(spec);
    const int n = spec.n_spins;
    for (int i = 0; i < spec.dim(); ++i) {
        double hz = 0.0;
        for (int s = 0; s < n; ++s) {
            const int mask = 1 << (n - 1 - s);
            hz += (i & mask) ? -spec.zeeman[s] : spec.zeeman[s];
        }
        h(i, i) += hz;
    }
    return h;
}

SpectralDecomposition spectral(const Matrix& op, double hermitian_tol) {
    if (op.rows() != op.cols() || op.rows() == 0)
        throw NumericError("spectral: operator must be square and non-empty");
    const double scale = std::max(1.0, op.cwiseAbs().maxCoeff());
    const double dev = (op - op.adjoint()).cwiseAbs().maxCoeff();
    if (dev > hermitian_tol * scale)
        throw NumericError("spectral: operator is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(op);
    if (solver.info() != Eigen::Success)
        throw NumericError("spectral: eigendecomposition failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix propagator(const SpectralDecomposition& h, double dt) {
    if (dt < 0.0) throw NumericError("propagator: dt must be >= 0");
    const int d = h.dim();
    Eigen::VectorXcd phases(d);
    for (int i = 0; i < d; ++i)
        phases(i) = std::exp(Complex(0.0, -h.eigenvalues(i) * dt / hbar));
    return h.eigenvectors * phases.asDiagonal() * h.eigenvectors.adjoint();
}

}  // namespace zenodot::bath
