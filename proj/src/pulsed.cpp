#include "homsim/pulsed.hpp"

#include <cmath>

namespace homsim {

PulseShape shape_of(const PulseParams& p) {
    return std::holds_alternative<GaussianModeParams>(p) ? PulseShape::Gaussian
                                                         : PulseShape::Lorentzian;
}

ModeFunction make_mode(const PulseParams& p, Branch branch) {
    return std::visit(
        [branch](auto params) -> ModeFunction {
            params.branch = branch;
            return ModeFunction(params);
        },
        p);
}

PortPair pair_intensity_correlation(const ModeFunction& mode_a, const ModeFunction& mode_b,
                                    double t, double tau) {
    const Complex direct = mode_a.eval(t + tau) * mode_b.eval(t);
    const Complex exchanged = mode_b.eval(t + tau) * mode_a.eval(t);
    return {0.25 * std::norm(direct + exchanged), 0.25 * std::norm(direct - exchanged)};
}

PortPair g2_gaussian_closed(const GaussianModeParams& p, double tau) {
    p.validate();
    const double s2 = p.sigma * p.sigma;
    const double env = std::exp(-(p.delta_tau * p.delta_tau + tau * tau) / (2.0 * s2)) /
                       (2.0 * std::sqrt(2.0 * M_PI * s2));
    const double ch = std::cosh(tau * p.delta_tau / s2);
    const double cs = std::cos(tau * p.delta);
    return {(ch + cs) * env, (ch - cs) * env};
}

PortPair g2_lorentzian_closed(const LorentzianModeParams& p, double tau) {
    p.validate();
    if (p.delta_t < 0.0 || tau < 0.0)
        throw InvalidInput("g2_lorentzian_closed: requires delta_t >= 0 and tau >= 0");
    const double g = p.gamma;
    const double half = p.delta * tau / 2.0;
    const double cos2 = std::cos(half) * std::cos(half);
    const double sin2 = std::sin(half) * std::sin(half);
    // Both unit-step branches meet continuously at tau = delta_t; evaluate as
    // a plain piecewise split so the junction is counted once.
    if (tau < p.delta_t) {
        const double pref = 0.5 * g * std::exp(-2.0 * g * p.delta_t);
        const double common = std::sinh(2.0 * g * tau);
        const double osc = 2.0 * std::exp(-2.0 * g * tau);
        return {pref * (common + osc * cos2), pref * (common + osc * sin2)};
    }
    const double pref = 0.5 * g * std::exp(-2.0 * g * tau);
    const double common = std::sinh(2.0 * g * p.delta_t);
    const double osc = 2.0 * std::exp(-2.0 * g * p.delta_t);
    return {pref * (common + osc * cos2), pref * (common + osc * sin2)};
}

PortPair g2_pulsed_even(PulseParams shared, double tau) {
    return std::visit(
        [tau](auto p) -> PortPair {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GaussianModeParams>) {
                return g2_gaussian_closed(p, tau);
            } else {
                p.delta_t = std::abs(p.delta_t);  // branch swap for delta_t < 0
                return g2_lorentzian_closed(p, std::abs(tau));
            }
        },
        shared);
}

namespace {

ProbabilityTable table_from_interference(double interference) {
    ProbabilityTable t;
    t.p_aa = 0.25 * (1.0 + interference);
    t.p_ab = 0.25 * (1.0 - interference);
    t.p_ba = t.p_ab;
    t.p_bb = t.p_aa;
    return t;
}

}  // namespace

ProbabilityTable correlation_probabilities(const GaussianModeParams& p) {
    p.validate();
    const double s2 = p.sigma * p.sigma;
    const double overlap =
        std::exp(-p.delta * p.delta * s2 / 2.0 - p.delta_tau * p.delta_tau / (2.0 * s2));
    return table_from_interference(overlap);
}

ProbabilityTable correlation_probabilities(const LorentzianModeParams& p) {
    p.validate();
    const double g2 = 4.0 * p.gamma * p.gamma;
    const double overlap =
        g2 / (g2 + p.delta * p.delta) * std::exp(-2.0 * p.gamma * std::abs(p.delta_t));
    return table_from_interference(overlap);
}

ProbabilityTable correlation_probabilities(const PulseParams& p) {
    return std::visit([](const auto& q) { return correlation_probabilities(q); }, p);
}

std::vector<std::pair<double, double>> hom_dip_scan(const PulseParams& base,
                                                    SweepParameter parameter,
                                                    const std::vector<double>& sweep) {
    if (sweep.empty()) throw InvalidInput("hom_dip_scan: sweep must be nonempty");
    std::vector<std::pair<double, double>> out;
    out.reserve(sweep.size());
    for (double value : sweep) {
        PulseParams p = base;
        std::visit(
            [&](auto& q) {
                using T = std::decay_t<decltype(q)>;
                if (parameter == SweepParameter::carrier_difference) {
                    q.delta = value;
                } else if constexpr (std::is_same_v<T, GaussianModeParams>) {
                    q.delta_tau = value;
                } else {
                    q.delta_t = value;
                }
            },
            p);
        out.emplace_back(value, correlation_probabilities(p).coincidence());
    }
    return out;
}

}  // namespace homsim
