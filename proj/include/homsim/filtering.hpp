#pragma once

#include <string>
#include <vector>

#include "homsim/modes.hpp"
#include "homsim/types.hpp"

namespace homsim {

enum class FilterKind { identity, square_window, fir_coefficients, windowed_lowpass };

/// Detection-bandwidth filter specification; a single composite kernel
/// stands in for the experiment's square-window + FIR cascade.
struct FilterSpec {
    FilterKind kind = FilterKind::identity;
    double cutoff = 0.0;                // rad/s, windowed_lowpass only
    int taps = 1;
    std::vector<double> coefficients;   // fir_coefficients only
    double sample_dt = 0.0;
};

/// Discrete kernel applied by plain convolution. center is the tap index of
/// zero delay: symmetric kernels are zero-phase (delay compensated), FIR
/// coefficient files are causal with center 0.
struct FilterKernel {
    ArrayXd taps;
    double sample_dt = 0.0;
    int center = 0;
    double dc_gain = 0.0;

    bool is_identity() const { return taps.size() == 1 && taps[0] == 1.0 && center == 0; }
};

FilterKernel make_filter(const FilterSpec& spec);

/// Discrete-time frequency response H(omega) of a kernel.
Complex filter_response(const FilterKernel& kernel, double omega);

/// Convolve sampled mode with kernel. The output grid is extended by the
/// kernel support and shifted so the kernel's zero-delay tap stays aligned;
/// the identity kernel returns the input samples unchanged.
SampledMode filter_mode(const SampledMode& mode, const FilterKernel& kernel);

/// FIR coefficient file: header line "# dt=<seconds>", one coefficient per
/// line after it.
FilterSpec load_fir_file(const std::string& path);
void save_fir_file(const std::string& path, const FilterKernel& kernel);

}  // namespace homsim
