#include "homsim/beamsplitter.hpp"

#include <cmath>

namespace homsim {

Eigen::Matrix2cd beamsplitter_matrix() {
    Eigen::Matrix2cd u;
    u << 1.0, -1.0, 1.0, 1.0;
    return u / std::sqrt(2.0);
}

std::pair<Complex, Complex> beamsplitter_transform(Complex a_in, Complex b_in) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {(a_in - b_in) * inv_sqrt2, (a_in + b_in) * inv_sqrt2};
}

CorrelationSeries output_g2_from_inputs(const InputCorrelations& inputs, Port port) {
    inputs.validate();
    const double sign = port == Port::auto_corr ? +1.0 : -1.0;
    const auto& g1a = inputs.g1_a.values;
    const auto& g1b = inputs.g1_b.values;
    ArrayXcd out =
        0.25 * (inputs.g2_a.values + inputs.g2_b.values + 2.0 * inputs.g1_a0 * inputs.g1_b0 +
                sign * g1a.conjugate() * g1b + sign * g1b.conjugate() * g1a);
    return CorrelationSeries(inputs.g1_a.grid, std::move(out),
                             port == Port::auto_corr ? SeriesKind::G2_auto
                                                     : SeriesKind::G2_cross);
}

std::pair<double, double> output_mean_intensities(double g1_a0, double g1_b0) {
    const double half_sum = 0.5 * (g1_a0 + g1_b0);
    return {half_sum, half_sum};
}

namespace {

// Moments of a single-photon state in mode zeta: <c(t)> = 0, <c(t')c(t)> = 0,
// <cdag(t')c(t)> = conj(zeta(t')) zeta(t), <cdag cdag c c> = 0, and all
// photon-number-changing triple moments vanish.
struct SinglePhotonMoments {
    const ModeFunction& mode;

    Complex mean(double) const { return {0.0, 0.0}; }
    Complex pair_lowering(double, double) const { return {0.0, 0.0}; }
    Complex coherence(double t_dag, double t_low) const {
        return std::conj(mode.eval(t_dag)) * mode.eval(t_low);
    }
    double intensity(double t) const { return std::norm(mode.eval(t)); }
    Complex intra_g2(double, double) const { return {0.0, 0.0}; }
    Complex triple(double, double, double) const { return {0.0, 0.0}; }
};

}  // namespace

std::array<Complex, 8> intensity_correlation_terms(const ModeFunction& mode_a,
                                                   const ModeFunction& mode_b, double t,
                                                   double tau, Port port) {
    const double sign = port == Port::auto_corr ? +1.0 : -1.0;
    std::array<Complex, 8> terms{};
    const SinglePhotonMoments ma{mode_a};
    const SinglePhotonMoments mb{mode_b};
    const std::array<std::pair<const SinglePhotonMoments*, const SinglePhotonMoments*>, 2>
        permutations{{{&ma, &mb}, {&mb, &ma}}};
    for (const auto& [c, d] : permutations) {
        terms[0] += 0.25 * c->intra_g2(t, t + tau);
        terms[1] += 0.25 * c->intensity(t) * d->intensity(t + tau);
        terms[2] += 0.25 * sign * c->coherence(t + tau, t) * d->coherence(t, t + tau);
        terms[3] += 0.25 * sign * std::conj(c->pair_lowering(t + tau, t)) *
                    d->pair_lowering(t + tau, t);
        terms[4] += 0.25 * d->mean(t) * c->triple(t, t + tau, t + tau);
        terms[5] += 0.25 * std::conj(d->mean(t)) * c->triple(t + tau, t + tau, t);
        terms[6] += 0.25 * sign * d->mean(t + tau) * c->triple(t + tau, t, t);
        terms[7] += 0.25 * sign * std::conj(d->mean(t + tau)) * c->triple(t, t + tau, t);
    }
    return terms;
}

PortPair full_output_intensity_correlation(const ModeFunction& mode_a,
                                           const ModeFunction& mode_b, double t,
                                           double tau) {
    PortPair out;
    for (Port port : {Port::auto_corr, Port::cross_corr}) {
        Complex sum{};
        for (const Complex& term : intensity_correlation_terms(mode_a, mode_b, t, tau, port))
            sum += term;
        (port == Port::auto_corr ? out.auto_corr : out.cross_corr) = sum.real();
    }
    return out;
}

}  // namespace homsim
