#include "zenodot/measurement.hpp"

#include <cmath>
#include <string>

#include "zenodot/errors.hpp"

namespace zenodot::channel {

NuclearState NuclearState::maximally_mixed(int dim, const bath::SpectralDecomposition* b) {
    return NuclearState(Matrix::Identity(dim, dim) / static_cast<double>(dim), b);
}

NuclearState NuclearState::from_diagonal(const Eigen::VectorXd& diag,
                                         const bath::SpectralDecomposition* b) {
    Matrix m = Matrix::Zero(diag.size(), diag.size());
    m.diagonal() = diag.cast<Complex>();
    return NuclearState(std::move(m), b);
}

NuclearState NuclearState::basis_state(int dim, int index,
                                       const bath::SpectralDecomposition* b) {
    if (index < 0 || index >= dim) throw ConfigError("basis_state: index out of range");
    Matrix m = Matrix::Zero(dim, dim);
    m(index, index) = 1.0;
    return NuclearState(std::move(m), b);
}

void NoiseSpec::validate() const {
    if (sigma_s < 0.0 || !std::isfinite(sigma_s))
        throw ConfigError("noise: sigma_s must be >= 0 and finite");
    if (!std::isfinite(mean_s)) throw ConfigError("noise: mean_s must be finite");
    if (n_quad < 1) throw ConfigError("noise: n_quad must be >= 1");
}

std::vector<std::pair<double, double>> gauss_hermite_normal(int n) {
    if (n < 1) throw ConfigError("gauss_hermite_normal: n must be >= 1");
    // Golub-Welsch on the Hermite Jacobi matrix (off-diagonals sqrt(k/2)),
    // then rescale abscissae by sqrt(2) for a unit-variance normal.
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(0.5 * k);
        j(k - 1, k) = b;
        j(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(j);
    std::vector<std::pair<double, double>> nodes(n);
    double wsum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = solver.eigenvectors()(0, k) * solver.eigenvectors()(0, k);
        nodes[k] = {solver.eigenvalues()(k) * std::sqrt(2.0), w};
        wsum += w;
    }
    for (auto& [x, w] : nodes) w /= wsum;
    return nodes;
}

Eigen::VectorXd gaussian_average_povm(const optics::OpticalParams& p,
                                      const Eigen::VectorXd& deltas, double mean,
                                      double sigma) {
    p.validate();
    const int d = static_cast<int>(deltas.size());
    if (sigma == 0.0) {
        Eigen::VectorXd out(d);
        for (int i = 0; i < d; ++i)
            out(i) = optics::povm_weight(p, deltas(i) + mean, optics::Polarisation::cr);
        return out;
    }
    if (p.g == 0.0) return Eigen::VectorXd::Zero(d);
    // |r_cr(delta)|^2 = k / ((X - a)^2 + b^2) with X = omega_0 + delta - omega_L
    // and pole X_p = g^2 / C, C = (omega_c - omega_L) - i pi kappa
    const double pi = 3.14159265358979323846;
    const Complex c(p.omega_c - p.omega_L, -pi * p.kappa);
    const Complex pole = p.g * p.g / c;
    const double a = pole.real();
    const double b = pole.imag();  // > 0 since Im(1/C) > 0
    const double k = (pi * p.kappa) * (pi * p.kappa) * std::norm(pole) / std::norm(c);
    // line centre in delta + s coordinates
    const double line = a - (p.omega_0 - p.omega_L);

    const int n_seg = 4000;
    const double span = 8.5;
    const double ds = 2.0 * span * sigma / n_seg;
    const double inv_norm = 1.0 / (sigma * std::sqrt(2.0 * pi));
    std::vector<double> s_grid(n_seg + 1), n_grid(n_seg + 1);
    for (int m = 0; m <= n_seg; ++m) {
        s_grid[m] = mean - span * sigma + m * ds;
        const double t = (s_grid[m] - mean) / sigma;
        n_grid[m] = inv_norm * std::exp(-0.5 * t * t);
    }
    Eigen::VectorXd out(d);
    for (int i = 0; i < d; ++i) {
        // integrate N(s) k / ((s - y0)^2 + b^2) with N piecewise linear
        const double y0 = line - deltas(i);
        double acc = 0.0;
        for (int m = 0; m < n_seg; ++m) {
            const double s0 = s_grid[m], s1 = s_grid[m + 1];
            const double slope = (n_grid[m + 1] - n_grid[m]) / ds;
            const double alpha = n_grid[m] + slope * (y0 - s0);  // N(s) = alpha + slope (s - y0)
            const double u0 = s0 - y0, u1 = s1 - y0;
            const double atan_term = std::atan2(u1, b) - std::atan2(u0, b);
            const double log_term = std::log((u1 * u1 + b * b) / (u0 * u0 + b * b));
            acc += k * (alpha / b * atan_term + 0.5 * slope * log_term);
        }
        out(i) = acc;
    }
    return out;
}

namespace {

KrausNode make_node(const optics::OpticalParams& p, const Eigen::VectorXd& deltas,
                    double weight, double shift) {
    const int d = static_cast<int>(deltas.size());
    KrausNode node;
    node.weight = weight;
    node.shift = shift;
    node.m_v.resize(d);
    node.m_h.resize(d);
    for (int i = 0; i < d; ++i) {
        const auto c = optics::channel_coefficients(p, deltas(i) + shift);
        node.m_v(i) = c.r_cr;
        node.m_h(i) = c.r_co;
    }
    return node;
}

void check_state(const MeasurementChannel& ch, const NuclearState& rho) {
    if (rho.dim() != ch.dim())
        throw ConfigError("measurement: state dimension does not match channel");
}

}  // namespace

MeasurementChannel build_channel(const optics::OpticalParams& p,
                                 const bath::SpectralDecomposition& basis) {
    p.validate();
    MeasurementChannel ch;
    ch.deltas = basis.eigenvalues;
    ch.family.push_back(make_node(p, ch.deltas, 1.0, 0.0));
    ch.m_v = ch.family[0].m_v;
    ch.m_h = ch.family[0].m_h;
    ch.o_v = ch.m_v.cwiseAbs2();
    ch.o_h = ch.m_h.cwiseAbs2();
    ch.o_v_eff = ch.o_v;
    ch.o_h_eff = ch.o_h;
    return ch;
}

MeasurementChannel build_noisy_channel(const optics::OpticalParams& p,
                                       const bath::SpectralDecomposition& basis,
                                       const NoiseSpec& noise) {
    noise.validate();
    if (noise.sigma_s == 0.0 && noise.mean_s == 0.0) return build_channel(p, basis);
    p.validate();
    MeasurementChannel ch;
    ch.deltas = basis.eigenvalues;
    const int d = ch.dim();
    if (noise.sigma_s == 0.0) {
        ch.family.push_back(make_node(p, ch.deltas, 1.0, noise.mean_s));
    } else {
        for (const auto& [x, w] : gauss_hermite_normal(noise.n_quad))
            ch.family.push_back(make_node(p, ch.deltas, w, noise.mean_s + noise.sigma_s * x));
    }
    // unshifted reference operators alongside the family
    const KrausNode ref = make_node(p, ch.deltas, 1.0, 0.0);
    ch.m_v = ref.m_v;
    ch.m_h = ref.m_h;
    ch.o_v = ch.m_v.cwiseAbs2();
    ch.o_h = ch.m_h.cwiseAbs2();
    if (noise.mode == NoiseMode::per_event_sample && noise.sigma_s > 0.0) {
        // per-event mode represents the continuous shift distribution: use the
        // exact Gaussian average rather than the quadrature family
        ch.o_v_eff = gaussian_average_povm(p, ch.deltas, noise.mean_s, noise.sigma_s);
        ch.o_h_eff = Eigen::VectorXd::Ones(d) - ch.o_v_eff;
    } else {
        ch.o_v_eff = Eigen::VectorXd::Zero(d);
        ch.o_h_eff = Eigen::VectorXd::Zero(d);
        for (const auto& node : ch.family) {
            ch.o_v_eff += node.weight * node.m_v.cwiseAbs2();
            ch.o_h_eff += node.weight * node.m_h.cwiseAbs2();
        }
    }
    return ch;
}

std::pair<NuclearState, double> apply_selective(const MeasurementChannel& ch,
                                                const NuclearState& rho, Outcome c) {
    check_state(ch, rho);
    if (!(rho.trace > 0.0))
        throw NumericError("apply_selective: state trace must be positive");
    const int d = ch.dim();
    Matrix out = Matrix::Zero(d, d);
    for (const auto& node : ch.family) {
        const Eigen::VectorXcd& m = (c == Outcome::V) ? node.m_v : node.m_h;
        out.noalias() +=
            node.weight * (m.asDiagonal() * rho.matrix * m.asDiagonal().toDenseMatrix().adjoint());
    }
    NuclearState post(std::move(out), rho.basis);
    const double prob = post.trace / rho.trace;
    return {std::move(post), prob};
}

namespace {

NuclearState apply_factor_map(const MeasurementChannel& ch, const NuclearState& rho,
                              bool averaged) {
    check_state(ch, rho);
    const int d = ch.dim();
    Matrix out(d, d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            if (i == j) {
                out(i, j) = rho.matrix(i, j);
                continue;
            }
            Complex f;
            if (!averaged) {
                f = ch.m_v(i) * std::conj(ch.m_v(j)) + ch.m_h(i) * std::conj(ch.m_h(j));
            } else {
                f = Complex(0.0, 0.0);
                for (const auto& node : ch.family)
                    f += node.weight * (node.m_v(i) * std::conj(node.m_v(j)) +
                                        node.m_h(i) * std::conj(node.m_h(j)));
            }
            out(i, j) = f * rho.matrix(i, j);
        }
    }
    return NuclearState(std::move(out), rho.basis);
}

}  // namespace

NuclearState apply_nonselective(const MeasurementChannel& ch, const NuclearState& rho) {
    return apply_factor_map(ch, rho, false);
}

NuclearState apply_noisy_nonselective(const MeasurementChannel& ch,
                                      const NuclearState& rho) {
    return apply_factor_map(ch, rho, true);
}

Complex coherence_factor(const MeasurementChannel& ch, int i, int j) {
    if (i < 0 || j < 0 || i >= ch.dim() || j >= ch.dim())
        throw ConfigError("coherence_factor: index out of range");
    if (i == j) return Complex(1.0, 0.0);
    return ch.m_h(i) * std::conj(ch.m_h(j)) + ch.m_v(i) * std::conj(ch.m_v(j));
}

Complex averaged_coherence_factor(const MeasurementChannel& ch, int i, int j) {
    if (i < 0 || j < 0 || i >= ch.dim() || j >= ch.dim())
        throw ConfigError("averaged_coherence_factor: index out of range");
    if (i == j) return Complex(1.0, 0.0);
    Complex f(0.0, 0.0);
    for (const auto& node : ch.family)
        f += node.weight * (node.m_h(i) * std::conj(node.m_h(j)) +
                            node.m_v(i) * std::conj(node.m_v(j)));
    return f;
}

}  // namespace zenodot::channel
