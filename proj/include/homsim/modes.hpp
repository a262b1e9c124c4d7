#pragma once

#include <variant>
#include <vector>

#include "homsim/quadrature.hpp"
#include "homsim/types.hpp"

namespace homsim {

enum class Branch { a, b };
enum class PulseShape { Gaussian, Lorentzian };

inline double branch_sign(Branch b) { return b == Branch::a ? +1.0 : -1.0; }

/// Gaussian single-photon mode: common width sigma, relative temporal offset
/// delta_tau centred on t = 0, carriers omega0 +- delta/2.
struct GaussianModeParams {
    double sigma = 1.0;
    double delta_tau = 0.0;
    double omega0 = 0.0;
    double delta = 0.0;
    Branch branch = Branch::a;

    void validate() const {
        if (!(sigma > 0.0)) throw InvalidInput("GaussianModeParams: sigma must be > 0");
    }
    double center() const { return -branch_sign(branch) * delta_tau / 2.0; }
    double carrier() const { return omega0 + branch_sign(branch) * delta / 2.0; }
};

/// Truncated-exponential (Lorentzian) single-photon mode with field decay
/// rate gamma; branch a is released at -delta_t/2, branch b at +delta_t/2.
struct LorentzianModeParams {
    double gamma = 1.0;
    double delta_t = 0.0;
    double omega0 = 0.0;
    double delta = 0.0;
    Branch branch = Branch::a;

    void validate() const {
        if (!(gamma > 0.0)) throw InvalidInput("LorentzianModeParams: gamma must be > 0");
    }
    double release_time() const { return -branch_sign(branch) * delta_t / 2.0; }
    double carrier() const { return omega0 + branch_sign(branch) * delta / 2.0; }
};

Complex eval_gaussian_mode(const GaussianModeParams& p, double t);
Complex eval_lorentzian_mode(const LorentzianModeParams& p, double t);

/// Spectral density Phi(omega) of a Lorentzian mode; |Phi|^2 is the
/// Lorentzian line shape around the branch carrier.
Complex lorentzian_spectral_density(const LorentzianModeParams& p, double omega);

/// Member of a pulse train: the base envelope shifted by k*t_p, carrier
/// unshifted.
struct TrainMemberParams {
    std::variant<GaussianModeParams, LorentzianModeParams> base;
    double shift = 0.0;
};

/// Complex samples of a mode on a uniform grid; evaluation interpolates
/// linearly and is zero outside the sampled window.
struct SampledMode {
    TimeGrid grid;
    ArrayXcd samples;

    SampledMode() = default;
    SampledMode(TimeGrid g, ArrayXcd s) : grid(g), samples(std::move(s)) {
        if (samples.size() != grid.n)
            throw InvalidInput("SampledMode: sample count must equal grid.n");
    }
    Complex eval(double t) const;
};

/// A spatio-temporal mode function zeta(t): analytic descriptor or samples.
class ModeFunction {
  public:
    using Shape =
        std::variant<GaussianModeParams, LorentzianModeParams, TrainMemberParams, SampledMode>;

    ModeFunction(GaussianModeParams p) : shape_(p) { p.validate(); }
    ModeFunction(LorentzianModeParams p) : shape_(p) { p.validate(); }
    ModeFunction(TrainMemberParams p) : shape_(std::move(p)) {}
    ModeFunction(SampledMode m) : shape_(std::move(m)) {}

    Complex eval(double t) const;
    Complex operator()(double t) const { return eval(t); }

    /// Interval outside which |zeta| is negligible for quadrature purposes.
    std::pair<double, double> support() const;

    /// Points where the envelope is non-smooth (Lorentzian release times).
    std::vector<double> breakpoints() const;

    const Shape& shape() const { return shape_; }

  private:
    Shape shape_;
};

/// Numeric check of the normalization integral of |zeta|^2 over the support.
double mode_norm(const ModeFunction& mode, const QuadratureOptions& opt = {});
double mode_norm(const SampledMode& mode);

/// Sample a mode on a grid.
SampledMode sample_mode(const ModeFunction& mode, const TimeGrid& grid);

}  // namespace homsim
