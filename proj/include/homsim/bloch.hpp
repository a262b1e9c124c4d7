#pragma once

#include <utility>
#include <vector>

#include "homsim/types.hpp"

namespace homsim {

/// Continuously driven two-level system: damping gamma1, pure dephasing
/// gamma_p (total dephasing gamma2 = gamma1 + 2 gamma_p), complex Rabi
/// frequency omega. detuning_share is this source's +-Delta/2 slot in the
/// rotating frame; the resonant closed forms require it to be zero.
struct TlsParams {
    double gamma1 = 1.0;
    double gamma_p = 0.0;
    Complex omega{1.0, 0.0};
    double detuning_share = 0.0;
    double pol_angle = 0.0;

    double gamma2() const { return gamma1 + 2.0 * gamma_p; }

    void validate() const {
        if (!(gamma1 > 0.0)) throw InvalidInput("TlsParams: gamma1 must be > 0");
        if (gamma_p < 0.0) throw InvalidInput("TlsParams: gamma_p must be >= 0");
    }
};

/// Expectations (<sigma_+>, <sigma_->, <sigma_z>) of the TLS.
struct BlochVector {
    Complex sp{};
    Complex sm{};
    double sz = 0.0;

    Eigen::Vector3cd to_vector() const { return {sp, sm, Complex(sz, 0.0)}; }
    static BlochVector from_vector(const Eigen::Vector3cd& v) {
        return {v[0], v[1], v[2].real()};
    }

    /// Hermiticity and Bloch-ball checks for a physical state.
    bool is_physical(double eps = 1e-9) const {
        if (std::abs(sm - std::conj(sp)) > eps) return false;
        if (std::abs(sz) > 1.0 + eps) return false;
        return std::norm(sp) <= 0.25 * (1.0 + sz) * (1.0 - sz) + eps;
    }

    /// Steady excited-state population <sigma_+ sigma_-> = (1 + sz)/2.
    double excited_population() const { return 0.5 * (1.0 + sz); }
};

/// Optical Bloch equations d<sigma>/dt = A <sigma> + b.
struct BlochSystem {
    Eigen::Matrix3cd A;
    Eigen::Vector3cd b;
};

BlochSystem bloch_system(const TlsParams& p);

BlochVector steady_state(const TlsParams& p);

/// Affine propagator <sigma(t+tau)> = C(tau) <sigma(t)> + d(tau).
struct BlochPropagator {
    Eigen::Matrix3cd c_matrix;
    Eigen::Vector3cd d_vector;
    double tau = 0.0;
    bool expm_fallback = false;

    Eigen::Vector3cd apply(const Eigen::Vector3cd& v) const { return c_matrix * v + d_vector; }
};

/// Shares one eigendecomposition of A across many tau evaluations. Falls
/// back to scaling-and-squaring exp(A tau) when the eigenvector matrix is
/// ill-conditioned at a parameter degeneracy.
class BlochPropagatorFactory {
  public:
    explicit BlochPropagatorFactory(const TlsParams& p);

    BlochPropagator at(double tau) const;
    const BlochVector& steady() const { return steady_; }
    bool uses_fallback() const { return use_fallback_; }

  private:
    Eigen::Matrix3cd a_;
    Eigen::Matrix3cd eigvecs_;
    Eigen::Matrix3cd eigvecs_inv_;
    Eigen::Vector3cd eigvals_;
    BlochVector steady_;
    bool use_fallback_ = false;
};

BlochPropagator propagator(const TlsParams& p, double tau);

/// Resonance-fluorescence first-order correlation G1(tau), resonant drive.
/// Complex-kappa safe: a single code path covers the underdamped and
/// overdamped regimes and the kappa -> 0 degeneracy.
Complex g1_tls_closed(const TlsParams& p, double tau);

struct TlsG2 {
    double G2 = 0.0;
    double g2_normalized = 0.0;
};

/// Resonance-fluorescence second-order correlation, resonant drive.
TlsG2 g2_tls_closed(const TlsParams& p, double tau);

/// G1/G2 via the propagator and the quantum regression theorem, with the
/// initial operator products reduced by Pauli algebra. Used to cross-check
/// the closed forms.
std::pair<std::vector<Complex>, std::vector<double>> tls_correlations_regression(
    const TlsParams& p, const std::vector<double>& taus);

/// Output correlations of the beam splitter fed by two continuously driven
/// sources, carrier difference Delta applied as explicit phase factors.
/// Normalized curves divide by the product of mean intensities.
struct OutputCorrelation {
    double auto_raw = 0.0;
    double cross_raw = 0.0;
    double auto_normalized = 0.0;
    double cross_normalized = 0.0;
    /// Residual coherent-scattering plateau: the normalized curves asymptote
    /// to 1 only up to this (small) term.
    double coherent_residual = 0.0;
};

OutputCorrelation g2_continuous_output(const TlsParams& p_a, const TlsParams& p_b,
                                       double delta, double tau);

/// Polarized variant for identical sources at equal carrier frequencies; the
/// interference term is weighted by cos^2(phi).
OutputCorrelation g2_polarized_output(const TlsParams& p, double phi, double tau);

}  // namespace homsim
