#pragma once

#include <array>

#include "homsim/modes.hpp"
#include "homsim/types.hpp"

namespace homsim {

/// Balanced beam-splitter unitary acting on (a', b').
Eigen::Matrix2cd beamsplitter_matrix();

/// Heisenberg-picture output amplitudes: a = (a' - b')/sqrt(2),
/// b = (a' + b')/sqrt(2).
std::pair<Complex, Complex> beamsplitter_transform(Complex a_in, Complex b_in);

/// Input-side correlation data entering the output assembly. All four series
/// live on one shared tau grid; g1_*0 are the zero-delay mean intensities.
struct InputCorrelations {
    CorrelationSeries g1_a;
    CorrelationSeries g1_b;
    CorrelationSeries g2_a;
    CorrelationSeries g2_b;
    double g1_a0 = 0.0;
    double g1_b0 = 0.0;

    void validate() const {
        if (!(g1_a.grid == g1_b.grid && g1_a.grid == g2_a.grid && g1_a.grid == g2_b.grid))
            throw InvalidInput("InputCorrelations: series must share one tau grid");
    }
};

/// Output second-order correlation functions from input correlation
/// functions: the permutation sum over (a', b') of
/// (1/4) { G2_c(tau) + G1_c(0) G1_d(0) +- conj(G1_c(tau)) G1_d(tau) }.
CorrelationSeries output_g2_from_inputs(const InputCorrelations& inputs, Port port);

/// Mean output intensities; the beam splitter conserves photon number, so
/// each output carries half of the summed input intensity.
std::pair<double, double> output_mean_intensities(double g1_a0, double g1_b0);

/// The eight terms of the full output intensity correlation (permutation sum
/// already applied per term) for single-photon Fock inputs. Terms 1 and 4-8
/// involve odd or pair moments of a one-photon state and vanish identically;
/// they are still evaluated literally from the moment rules.
std::array<Complex, 8> intensity_correlation_terms(const ModeFunction& mode_a,
                                                   const ModeFunction& mode_b, double t,
                                                   double tau, Port port);

/// Sum of all eight terms for both ports; equals the reduced mode-function
/// expression evaluated by pair_intensity_correlation.
PortPair full_output_intensity_correlation(const ModeFunction& mode_a,
                                           const ModeFunction& mode_b, double t, double tau);

}  // namespace homsim
