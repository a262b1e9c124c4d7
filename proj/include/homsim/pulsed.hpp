#pragma once

#include <variant>
#include <vector>

#include "homsim/modes.hpp"
#include "homsim/types.hpp"

namespace homsim {

/// Correlation probabilities P_cd for one photon pair; completed by the
/// symmetries p_ba = p_ab and p_bb = p_aa of a lossless balanced splitter.
struct ProbabilityTable {
    double p_aa = 0.0;
    double p_ab = 0.0;
    double p_ba = 0.0;
    double p_bb = 0.0;

    double sum() const { return p_aa + p_ab + p_ba + p_bb; }
    double coincidence() const { return p_ab + p_ba; }

    void validate() const {
        const double eps = 1e-9;
        for (double p : {p_aa, p_ab, p_ba, p_bb})
            if (p < -eps || p > 0.5 + eps)
                throw NumericError("ProbabilityTable: entry outside [0, 1/2]");
        if (std::abs(sum() - 1.0) > eps)
            throw NumericError("ProbabilityTable: probabilities do not sum to 1");
    }
};

/// Shared parameters of a photon pair, one branch per input port.
using PulseParams = std::variant<GaussianModeParams, LorentzianModeParams>;

PulseShape shape_of(const PulseParams& p);
ModeFunction make_mode(const PulseParams& p, Branch branch);

/// Intensity correlation <:n_a(t+tau) n_{a(b)}(t):> for one photon in each
/// input mode: the cross port cancels exactly at tau = 0 for any mode pair.
PortPair pair_intensity_correlation(const ModeFunction& mode_a, const ModeFunction& mode_b,
                                    double t, double tau);

/// Closed-form second-order correlations after integrating over the first
/// detection time. Gaussian: valid for all tau. Lorentzian: derived for
/// delta_t >= 0 and tau >= 0; use g2_pulsed_even for plotting extensions.
PortPair g2_gaussian_closed(const GaussianModeParams& shared, double tau);
PortPair g2_lorentzian_closed(const LorentzianModeParams& shared, double tau);

/// Even-symmetry wrapper: G2_cd(-tau) = G2_dc(tau), which for the
/// identical-statistics pair used here makes both series even in tau;
/// negative delta_t maps to positive with the branches swapped.
PortPair g2_pulsed_even(PulseParams shared, double tau);

/// Closed-form correlation probabilities.
ProbabilityTable correlation_probabilities(const GaussianModeParams& shared);
ProbabilityTable correlation_probabilities(const LorentzianModeParams& shared);
ProbabilityTable correlation_probabilities(const PulseParams& shared);

enum class SweepParameter { temporal_offset, carrier_difference };

/// Coincidence probability P_c = 2 p_ab versus a swept source parameter:
/// the Hong-Ou-Mandel dip.
std::vector<std::pair<double, double>> hom_dip_scan(const PulseParams& base,
                                                    SweepParameter parameter,
                                                    const std::vector<double>& sweep);

}  // namespace homsim
