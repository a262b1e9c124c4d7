#include "homsim/modes.hpp"

#include <cmath>

namespace homsim {

namespace {

// Unit step with u(0) = 1: the photon amplitude is present exactly at the
// release time, which keeps the tau = delta_t junction of the closed forms
// well defined.
inline double unit_step(double x) { return x >= 0.0 ? 1.0 : 0.0; }

}  // namespace

Complex eval_gaussian_mode(const GaussianModeParams& p, double t) {
    const double s = branch_sign(p.branch);
    const double arg = t + s * p.delta_tau / 2.0;
    const double env = std::pow(1.0 / (M_PI * p.sigma * p.sigma), 0.25) *
                       std::exp(-arg * arg / (2.0 * p.sigma * p.sigma));
    const double phase = -(p.omega0 + s * p.delta / 2.0) * t;
    return env * std::polar(1.0, phase);
}

Complex eval_lorentzian_mode(const LorentzianModeParams& p, double t) {
    const double s = branch_sign(p.branch);
    const double arg = t + s * p.delta_t / 2.0;
    if (arg < 0.0) return {0.0, 0.0};
    const double env = std::sqrt(2.0 * p.gamma) * std::exp(-p.gamma * arg) * unit_step(arg);
    const double phase = -(p.omega0 + s * p.delta / 2.0) * t;
    return env * std::polar(1.0, phase);
}

Complex lorentzian_spectral_density(const LorentzianModeParams& p, double omega) {
    const double s = branch_sign(p.branch);
    const double detune = omega - (p.omega0 + s * p.delta / 2.0);
    const Complex denom{p.gamma, -detune};
    return std::sqrt(p.gamma / M_PI) / denom *
           std::exp(Complex{0.0, -detune * p.delta_t / 2.0});
}

Complex SampledMode::eval(double t) const {
    const double x = (t - grid.t0) / grid.dt;
    if (x < 0.0 || x > grid.n - 1) return {0.0, 0.0};
    const int i = std::min(static_cast<int>(x), grid.n - 2);
    const double w = x - i;
    return (1.0 - w) * samples[i] + w * samples[i + 1];
}

Complex ModeFunction::eval(double t) const {
    return std::visit(
        [t](const auto& s) -> Complex {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GaussianModeParams>) {
                return eval_gaussian_mode(s, t);
            } else if constexpr (std::is_same_v<T, LorentzianModeParams>) {
                return eval_lorentzian_mode(s, t);
            } else if constexpr (std::is_same_v<T, TrainMemberParams>) {
                // Envelope shifted by k*t_p, carrier evaluated at t itself.
                return std::visit(
                    [&](const auto& base) -> Complex {
                        using B = std::decay_t<decltype(base)>;
                        const double w = base.carrier();
                        auto unrotated = base;
                        unrotated.omega0 = 0.0;
                        unrotated.delta = 0.0;
                        Complex env;
                        if constexpr (std::is_same_v<B, GaussianModeParams>)
                            env = eval_gaussian_mode(unrotated, t - s.shift);
                        else
                            env = eval_lorentzian_mode(unrotated, t - s.shift);
                        return env * std::polar(1.0, -w * t);
                    },
                    s.base);
            } else {
                return s.eval(t);
            }
        },
        shape_);
}

namespace {

std::pair<double, double> base_support(const GaussianModeParams& p) {
    return {p.center() - 10.0 * p.sigma, p.center() + 10.0 * p.sigma};
}

std::pair<double, double> base_support(const LorentzianModeParams& p) {
    return {p.release_time(), p.release_time() + 30.0 / p.gamma};
}

}  // namespace

std::pair<double, double> ModeFunction::support() const {
    return std::visit(
        [](const auto& s) -> std::pair<double, double> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GaussianModeParams> ||
                          std::is_same_v<T, LorentzianModeParams>) {
                return base_support(s);
            } else if constexpr (std::is_same_v<T, TrainMemberParams>) {
                auto sup = std::visit([](const auto& b) { return base_support(b); }, s.base);
                return {sup.first + s.shift, sup.second + s.shift};
            } else {
                return {s.grid.t0, s.grid.back()};
            }
        },
        shape_);
}

std::vector<double> ModeFunction::breakpoints() const {
    return std::visit(
        [](const auto& s) -> std::vector<double> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LorentzianModeParams>) {
                return {s.release_time()};
            } else if constexpr (std::is_same_v<T, TrainMemberParams>) {
                if (const auto* lor = std::get_if<LorentzianModeParams>(&s.base))
                    return {lor->release_time() + s.shift};
                return {};
            } else {
                return {};
            }
        },
        shape_);
}

double mode_norm(const ModeFunction& mode, const QuadratureOptions& opt) {
    const auto [lo, hi] = mode.support();
    return integrate_or_throw<double>(
        [&](double t) { return std::norm(mode.eval(t)); }, lo, hi, mode.breakpoints(), opt);
}

double mode_norm(const SampledMode& mode) {
    return mode.samples.abs2().sum() * mode.grid.dt;
}

SampledMode sample_mode(const ModeFunction& mode, const TimeGrid& grid) {
    ArrayXcd samples(grid.n);
    for (int k = 0; k < grid.n; ++k) samples[k] = mode.eval(grid.point(k));
    return SampledMode(grid, std::move(samples));
}

}  // namespace homsim
