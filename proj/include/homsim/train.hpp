#pragma once

#include <optional>
#include <vector>

#include "homsim/filtering.hpp"
#include "homsim/modes.hpp"
#include "homsim/pulsed.hpp"
#include "homsim/types.hpp"

namespace homsim {

/// Finite train of 2 n_side + 1 single-photon pulses per source, pulse index
/// k = -n_side .. n_side, period t_p. Sources are offset by +-delta_t/2 and
/// carry +-delta/2.
struct PulseTrainConfig {
    PulseShape shape = PulseShape::Lorentzian;
    int n_side = 5;
    double t_p = 1.0;
    double gamma = 0.0;  // Lorentzian field decay rate
    double sigma = 0.0;  // Gaussian pulse width
    double delta_t = 0.0;
    double delta = 0.0;

    int n_pulses() const { return 2 * n_side + 1; }

    /// 1/gamma or sigma.
    double characteristic_time() const {
        return shape == PulseShape::Lorentzian ? 1.0 / gamma : sigma;
    }

    void validate() const {
        if (!(t_p > 0.0)) throw InvalidInput("PulseTrainConfig: t_p must be > 0");
        if (n_side < 0) throw InvalidInput("PulseTrainConfig: n_side must be >= 0");
        if (shape == PulseShape::Lorentzian && !(gamma > 0.0))
            throw InvalidInput("PulseTrainConfig: Lorentzian train needs gamma > 0");
        if (shape == PulseShape::Gaussian && !(sigma > 0.0))
            throw InvalidInput("PulseTrainConfig: Gaussian train needs sigma > 0");
    }

    /// Pulses wider than a quarter period overlap enough to spoil the
    /// single-photon-per-slot picture.
    bool pulses_overlap() const { return characteristic_time() > t_p / 4.0; }

    PulseParams base_params(Branch branch) const;
};

/// Spatio-temporal modes of both inputs, one per train member.
std::pair<std::vector<ModeFunction>, std::vector<ModeFunction>> train_modes(
    const PulseTrainConfig& config);

/// The five-sum intensity correlation of the train with one photon per
/// spatio-temporal mode (the intra-mode <cdag cdag c c> sum vanishes).
PortPair train_intensity_correlation(const PulseTrainConfig& config, double t, double tau);

struct TrainCorrelationResult {
    CorrelationSeries series_auto;
    CorrelationSeries series_cross;
    double normalization = 1.0;
    bool wrapped = true;
};

struct TrainOptions {
    bool wrapped = true;
    /// Non-identity filter switches to the sampled end-to-end pipeline.
    std::optional<FilterKernel> filter;
    int threads = 1;
    /// Reuse a known normalization (skips the delta_t = 0 reference run).
    std::optional<double> normalization;
};

/// Second-order correlation functions of the train on a tau grid, circularly
/// wrapped by default and normalized so the cross peaks at +-k t_p are unity
/// for indistinguishable photons.
TrainCorrelationResult g2_train(const PulseTrainConfig& config, const TimeGrid& tau_grid,
                                const TrainOptions& options = {});

}  // namespace homsim
