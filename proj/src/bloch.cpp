#include "homsim/bloch.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace homsim {

BlochSystem bloch_system(const TlsParams& p) {
    p.validate();
    const double g2 = p.gamma2();
    const Complex i = kImag;
    BlochSystem s;
    s.A << Complex(-g2 / 2.0, p.detuning_share), 0.0, -i * std::conj(p.omega) / 2.0,
        0.0, Complex(-g2 / 2.0, -p.detuning_share), i * p.omega / 2.0,
        -i * p.omega, i * std::conj(p.omega), Complex(-p.gamma1, 0.0);
    s.b << 0.0, 0.0, Complex(-p.gamma1, 0.0);
    return s;
}

BlochVector steady_state(const TlsParams& p) {
    const BlochSystem s = bloch_system(p);
    Eigen::FullPivLU<Eigen::Matrix3cd> lu(s.A);
    if (!lu.isInvertible())
        throw DegenerateParameters("steady_state: Bloch system matrix is singular");
    const Eigen::Vector3cd v = lu.solve(-s.b);
    return BlochVector::from_vector(v);
}

BlochPropagatorFactory::BlochPropagatorFactory(const TlsParams& p) {
    const BlochSystem s = bloch_system(p);
    a_ = s.A;
    steady_ = steady_state(p);
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(s.A);
    if (solver.info() != Eigen::Success) {
        use_fallback_ = true;
        return;
    }
    eigvals_ = solver.eigenvalues();
    eigvecs_ = solver.eigenvectors();
    Eigen::FullPivLU<Eigen::Matrix3cd> lu(eigvecs_);
    if (!lu.isInvertible()) {
        use_fallback_ = true;
        return;
    }
    eigvecs_inv_ = lu.inverse();
    const double cond = eigvecs_.norm() * eigvecs_inv_.norm();
    if (!(cond < 1e8)) use_fallback_ = true;
}

BlochPropagator BlochPropagatorFactory::at(double tau) const {
    if (tau < 0.0) throw InvalidInput("propagator: tau must be >= 0");
    BlochPropagator out;
    out.tau = tau;
    out.expm_fallback = use_fallback_;
    if (use_fallback_) {
        out.c_matrix = (a_ * tau).exp();
    } else {
        const Eigen::Vector3cd phases =
            (eigvals_.array() * tau).exp().matrix();
        out.c_matrix = eigvecs_ * phases.asDiagonal() * eigvecs_inv_;
    }
    out.d_vector =
        (Eigen::Matrix3cd::Identity() - out.c_matrix) * steady_.to_vector();
    return out;
}

BlochPropagator propagator(const TlsParams& p, double tau) {
    return BlochPropagatorFactory(p).at(tau);
}

namespace {

// 4 kappa = sqrt((2 gamma1 - gamma2)^2 - 16 |Omega|^2); imaginary under
// strong driving, where cosh/sinh turn into Rabi oscillations.
Complex tls_kappa(const TlsParams& p) {
    const double d = 2.0 * p.gamma1 - p.gamma2();
    return std::sqrt(Complex(d * d - 16.0 * std::norm(p.omega), 0.0)) / 4.0;
}

// sinh(k tau)/k, finite as k -> 0.
Complex sinhc_over(Complex k, double tau) {
    const Complex kt = k * tau;
    if (std::abs(kt) < 1e-6) {
        const Complex kt2 = kt * kt;
        return tau * (1.0 + kt2 / 6.0 + kt2 * kt2 / 120.0);
    }
    return std::sinh(kt) / k;
}

void require_resonant(const TlsParams& p, const char* who) {
    if (p.detuning_share != 0.0)
        throw InvalidInput(std::string(who) + ": closed form is the resonant-drive result");
}

}  // namespace

Complex g1_tls_closed(const TlsParams& p, double tau) {
    p.validate();
    require_resonant(p, "g1_tls_closed");
    if (tau < 0.0) throw InvalidInput("g1_tls_closed: tau must be >= 0");
    const double g1 = p.gamma1;
    const double g2 = p.gamma2();
    const double W2 = std::norm(p.omega);
    const double D = g1 * g2 + 2.0 * W2;
    const Complex kappa = tls_kappa(p);
    // lambda_+ + lambda_- and (lambda_+ - lambda_-) * kappa are both finite
    // at kappa = 0; grouping this way removes the 1/kappa of the raw forms.
    const double lambda_sum = 2.0 * (2.0 * W2 - 2.0 * g1 * g1 + g1 * g2) / D;
    const double lambda_diff_kappa =
        (2.0 * W2 * (6.0 * g1 - g2) - g1 * (2.0 * g1 - g2) * (2.0 * g1 - g2)) / (2.0 * D);
    const Complex osc = lambda_sum * std::cosh(kappa * tau) +
                        lambda_diff_kappa * sinhc_over(kappa, tau);
    const Complex bracket = g1 * g1 / D + 0.5 * std::exp(-g2 * tau / 2.0) +
                            0.25 * std::exp(-(2.0 * g1 + g2) * tau / 4.0) * osc;
    return (W2 / D) * bracket;
}

TlsG2 g2_tls_closed(const TlsParams& p, double tau) {
    p.validate();
    require_resonant(p, "g2_tls_closed");
    if (tau < 0.0) throw InvalidInput("g2_tls_closed: tau must be >= 0");
    const double g1 = p.gamma1;
    const double g2 = p.gamma2();
    const double W2 = std::norm(p.omega);
    const double D = g1 * g2 + 2.0 * W2;
    const Complex kappa = tls_kappa(p);
    const Complex bracket = 1.0 - std::exp(-(2.0 * g1 + g2) * tau / 4.0) *
                                      (std::cosh(kappa * tau) +
                                       (2.0 * g1 + g2) / 4.0 * sinhc_over(kappa, tau));
    const double population = W2 / D;
    TlsG2 out;
    out.g2_normalized = bracket.real();
    out.G2 = population * population * out.g2_normalized;
    return out;
}

std::pair<std::vector<Complex>, std::vector<double>> tls_correlations_regression(
    const TlsParams& p, const std::vector<double>& taus) {
    const BlochPropagatorFactory factory(p);
    const BlochVector ss = factory.steady();
    const double population = ss.excited_population();
    // Initial operator products reduced to the {1, sigma_+, sigma_-, sigma_z}
    // basis: sigma_+ sigma_j for G1, sigma_+ sigma_j sigma_- for G2.
    const Eigen::Vector3cd init_g1{Complex(0.0, 0.0), Complex(population, 0.0), -ss.sp};
    const Eigen::Vector3cd init_g2{Complex(0.0, 0.0), Complex(0.0, 0.0),
                                   Complex(-population, 0.0)};
    std::vector<Complex> g1(taus.size());
    std::vector<double> g2(taus.size());
    for (size_t i = 0; i < taus.size(); ++i) {
        const BlochPropagator prop = factory.at(taus[i]);
        // G1(tau) = <sigma_+(t) sigma_-(t+tau)>: the sigma_- component of
        // the regressed vector, inhomogeneity weighted by <sigma_+>_ss.
        const Eigen::Vector3cd r1 = prop.c_matrix * init_g1 + prop.d_vector * ss.sp;
        g1[i] = r1[1];
        // G2(tau) = (1/2)[<sigma_+ sigma_->_ss + h_z(tau)] with
        // h(tau) regressed from <sigma_+ sigma_j sigma_->_ss.
        const Eigen::Vector3cd r2 =
            prop.c_matrix * init_g2 + prop.d_vector * Complex(population, 0.0);
        g2[i] = 0.5 * (population + r2[2].real());
    }
    return {std::move(g1), std::move(g2)};
}

namespace {

OutputCorrelation assemble_output(double G2_quarter_sum, Complex interference, double mean_a,
                                  double mean_b, double plateau_product) {
    // (1/4){G2_a + G2_b + 2 G1_a(0) G1_b(0) +- [interference + conj(interference)]}
    OutputCorrelation out;
    const double base = G2_quarter_sum + 0.5 * mean_a * mean_b;
    const double beat = 0.5 * interference.real();
    out.auto_raw = base + beat;
    out.cross_raw = base - beat;
    const double norm = mean_a * mean_b;
    out.auto_normalized = out.auto_raw / norm;
    out.cross_normalized = out.cross_raw / norm;
    out.coherent_residual = plateau_product / norm;
    return out;
}

}  // namespace

OutputCorrelation g2_continuous_output(const TlsParams& p_a, const TlsParams& p_b,
                                       double delta, double tau) {
    if (tau < 0.0) throw InvalidInput("g2_continuous_output: tau must be >= 0");
    const double G2a = g2_tls_closed(p_a, tau).G2;
    const double G2b = g2_tls_closed(p_b, tau).G2;
    const Complex G1a = g1_tls_closed(p_a, tau);
    const Complex G1b = g1_tls_closed(p_b, tau);
    const double mean_a = g1_tls_closed(p_a, 0.0).real();
    const double mean_b = g1_tls_closed(p_b, 0.0).real();
    const Complex phase = std::polar(1.0, delta * tau);
    const Complex interference = phase * G1a * std::conj(G1b);
    auto plateau = [](const TlsParams& p) {
        const double W2 = std::norm(p.omega);
        const double D = p.gamma1 * p.gamma2() + 2.0 * W2;
        return p.gamma1 * p.gamma1 * W2 / (D * D);
    };
    return assemble_output(0.25 * (G2a + G2b), interference, mean_a, mean_b,
                           plateau(p_a) * plateau(p_b));
}

OutputCorrelation g2_polarized_output(const TlsParams& p, double phi, double tau) {
    if (tau < 0.0) throw InvalidInput("g2_polarized_output: tau must be >= 0");
    const double G2 = g2_tls_closed(p, tau).G2;
    const Complex G1 = g1_tls_closed(p, tau);
    const double mean = g1_tls_closed(p, 0.0).real();
    const double c = std::cos(phi);
    const Complex interference = c * c * std::norm(G1);
    const double W2 = std::norm(p.omega);
    const double D = p.gamma1 * p.gamma2() + 2.0 * W2;
    const double plateau = p.gamma1 * p.gamma1 * W2 / (D * D);
    return assemble_output(0.5 * G2, interference, mean, mean, plateau * plateau);
}

}  // namespace homsim
