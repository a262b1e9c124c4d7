#include "homsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "json.hpp"

namespace homsim::oracle {

void OracleReport::finalize() {
    max_rel_err = 0.0;
    for (size_t i = 0; i < closed_form.size(); ++i) {
        const double denom = std::max(std::abs(oracle_values[i]), abs_floor);
        max_rel_err = std::max(max_rel_err,
                               std::abs(closed_form[i] - oracle_values[i]) / denom);
    }
    passed = max_rel_err <= tolerance;
}

std::string OracleReport::to_json() const {
    nlohmann::ordered_json j;
    j["quantity"] = quantity;
    j["closed_form"] = closed_form;
    j["oracle"] = oracle_values;
    j["max_rel_err"] = max_rel_err;
    j["tolerance"] = tolerance;
    j["abs_floor"] = abs_floor;
    j["passed"] = passed;
    return j.dump();
}

std::string reports_to_json(const std::vector<OracleReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(nlohmann::ordered_json::parse(r.to_json()));
    nlohmann::ordered_json j;
    j["reports"] = arr;
    j["all_passed"] = all_passed(reports);
    return j.dump(2);
}

bool all_passed(const std::vector<OracleReport>& reports) {
    return std::all_of(reports.begin(), reports.end(),
                       [](const OracleReport& r) { return r.passed; });
}

namespace {

std::pair<double, double> joint_window(const ModeFunction& a, const ModeFunction& b,
                                       double tau) {
    const auto sa = a.support();
    const auto sb = b.support();
    const double lo = std::min(std::min(sa.first, sb.first),
                               std::min(sa.first, sb.first) - tau);
    const double hi = std::max(std::max(sa.second, sb.second),
                               std::max(sa.second, sb.second) - tau);
    return {lo, hi};
}

std::vector<double> joint_breakpoints(const ModeFunction& a, const ModeFunction& b,
                                      double tau) {
    std::vector<double> pts;
    for (const ModeFunction* m : {&a, &b}) {
        for (double r : m->breakpoints()) {
            pts.push_back(r);
            pts.push_back(r - tau);
        }
    }
    return pts;
}

}  // namespace

PortPair g2_numeric_pulsed(const ModeFunction& mode_a, const ModeFunction& mode_b,
                           double tau, const QuadratureOptions& opt) {
    const auto [lo, hi] = joint_window(mode_a, mode_b, tau);
    const auto pts = joint_breakpoints(mode_a, mode_b, tau);
    const double auto_val = integrate_or_throw<double>(
        [&](double t) {
            return pair_intensity_correlation(mode_a, mode_b, t, tau).auto_corr;
        },
        lo, hi, pts, opt);
    const double cross_val = integrate_or_throw<double>(
        [&](double t) {
            return pair_intensity_correlation(mode_a, mode_b, t, tau).cross_corr;
        },
        lo, hi, pts, opt);
    return {auto_val, cross_val};
}

PortPair train_intensity_naive(const PulseTrainConfig& config, double t, double tau) {
    const auto [modes_a, modes_b] = train_modes(config);
    const int n = static_cast<int>(modes_a.size());
    PortPair out;
    const std::vector<ModeFunction>* sources[2][2] = {{&modes_a, &modes_b},
                                                      {&modes_b, &modes_a}};
    for (auto& perm : sources) {
        const auto& c = *perm[0];
        const auto& d = *perm[1];
        Complex row2{};
        double row3 = 0.0;
        for (int m = 0; m < n; ++m) {
            for (int nn = 0; nn < n; ++nn) {
                if (m == nn) continue;
                row2 += std::conj(c[m].eval(t)) * c[m].eval(t + tau) *
                        std::conj(c[nn].eval(t + tau)) * c[nn].eval(t);
                row3 += std::norm(c[nn].eval(t)) * std::norm(c[m].eval(t + tau));
            }
        }
        double row4 = 0.0;
        Complex row5{};
        for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
                row4 += std::norm(c[k].eval(t)) * std::norm(d[l].eval(t + tau));
                row5 += std::conj(c[k].eval(t + tau)) * c[k].eval(t) *
                        std::conj(d[l].eval(t)) * d[l].eval(t + tau);
            }
        }
        out.auto_corr += 0.25 * (row2.real() + row3 + row4 + row5.real());
        out.cross_corr += 0.25 * (row2.real() + row3 + row4 - row5.real());
    }
    return out;
}

PortPair g2_numeric_train(const PulseTrainConfig& config, double tau,
                          const QuadratureOptions& opt) {
    const auto [modes_a, modes_b] = train_modes(config);
    double lo = 0.0, hi = 0.0;
    std::vector<double> pts;
    bool first = true;
    for (const auto* list : {&modes_a, &modes_b}) {
        for (const auto& m : *list) {
            const auto s = m.support();
            lo = first ? std::min(s.first, s.first - tau)
                       : std::min({lo, s.first, s.first - tau});
            hi = first ? std::max(s.second, s.second - tau)
                       : std::max({hi, s.second, s.second - tau});
            first = false;
            for (double r : m.breakpoints()) {
                pts.push_back(r);
                pts.push_back(r - tau);
            }
        }
    }
    const double auto_val = integrate_or_throw<double>(
        [&](double t) { return train_intensity_naive(config, t, tau).auto_corr; }, lo, hi,
        pts, opt);
    const double cross_val = integrate_or_throw<double>(
        [&](double t) { return train_intensity_naive(config, t, tau).cross_corr; }, lo, hi,
        pts, opt);
    return {auto_val, cross_val};
}

namespace {

// Dormand-Prince RK45 with adaptive step for the linear system y' = A y + c.
Eigen::Vector3cd rk45_linear(const Eigen::Matrix3cd& A, const Eigen::Vector3cd& c,
                             Eigen::Vector3cd y, double t0, double t1, double tol) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto f = [&](const Eigen::Vector3cd& v) -> Eigen::Vector3cd { return A * v + c; };
    double t = t0;
    double h = (t1 - t0) / 64.0;
    const double h_min = (t1 - t0) * 1e-14;
    int rejected_in_a_row = 0;
    while (t < t1) {
        h = std::min(h, t1 - t);
        const Eigen::Vector3cd k1 = f(y);
        const Eigen::Vector3cd k2 = f(y + h * a21 * k1);
        const Eigen::Vector3cd k3 = f(y + h * (a31 * k1 + a32 * k2));
        const Eigen::Vector3cd k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::Vector3cd k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::Vector3cd k6 =
            f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::Vector3cd y5 =
            y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::Vector3cd k7 = f(y5);
        const Eigen::Vector3cd err_v =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = std::max(1.0, y.norm());
        const double err = err_v.norm() / scale;
        if (err <= tol || h <= h_min) {
            t += h;
            y = y5;
            rejected_in_a_row = 0;
        } else if (++rejected_in_a_row > 60) {
            throw NumericError("tls_correlation_numeric: stiff integration failure");
        }
        const double factor =
            err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
        h *= std::clamp(factor, 0.2, 4.0);
        if (!(h > 0.0)) throw NumericError("tls_correlation_numeric: step underflow");
    }
    return y;
}

}  // namespace

TlsNumericSeries tls_correlation_numeric(const TlsParams& p,
                                         const std::vector<double>& taus) {
    if (taus.empty() || taus.front() < 0.0 ||
        !std::is_sorted(taus.begin(), taus.end()))
        throw InvalidInput("tls_correlation_numeric: tau grid must increase from 0");
    const BlochSystem sys = bloch_system(p);
    const double tol = 1e-12;

    // relax the ground state until the iterate reaches the steady solution
    const Eigen::Vector3cd v_ss = sys.A.fullPivLu().solve(-sys.b);
    Eigen::Vector3cd v{Complex(0, 0), Complex(0, 0), Complex(-1, 0)};
    const double chunk = 10.0 / std::min(p.gamma1, p.gamma2());
    double waited = 0.0;
    while ((v - v_ss).norm() > 1e-10) {
        v = rk45_linear(sys.A, sys.b, v, 0.0, chunk, tol);
        waited += chunk;
        if (waited > 1e3 * chunk)
            throw NumericError("tls_correlation_numeric: no steady state reached");
    }
    const Complex sp_ss = v[0];
    const double population = 0.5 * (1.0 + v[2].real());

    // quantum regression: both two-time vectors obey the Bloch ODE in tau
    // with the inhomogeneity weighted by the trailing scalar moment;
    // initial products reduced via sigma_+ sigma_- = (1+sigma_z)/2,
    // sigma_+ sigma_z = -sigma_+, sigma_z sigma_- = -sigma_-.
    Eigen::Vector3cd g{Complex(0, 0), Complex(population, 0), -sp_ss};
    Eigen::Vector3cd h{Complex(0, 0), Complex(0, 0), Complex(-population, 0)};
    const Eigen::Vector3cd bg = sys.b * sp_ss;
    const Eigen::Vector3cd bh = sys.b * Complex(population, 0.0);
    const double tau_tol = 1e-10;

    TlsNumericSeries out;
    out.g1.resize(taus.size());
    out.g2.resize(taus.size());
    double tau_prev = 0.0;
    for (size_t i = 0; i < taus.size(); ++i) {
        if (taus[i] > tau_prev) {
            g = rk45_linear(sys.A, bg, g, tau_prev, taus[i], tau_tol);
            h = rk45_linear(sys.A, bh, h, tau_prev, taus[i], tau_tol);
            tau_prev = taus[i];
        }
        out.g1[i] = g[1];
        out.g2[i] = 0.5 * (population + h[2].real());
    }
    return out;
}

ProbabilityTable probabilities_numeric(const PulseParams& params) {
    // P_cd = (1/2) int_{-inf}^{inf} G2(tau) dtau; the series are even, so
    // integrate the positive half line with an analytically bounded tail.
    double half_range = 0.0;
    double tail_bound = 0.0;
    std::vector<double> pts;
    if (const auto* lor = std::get_if<LorentzianModeParams>(&params)) {
        const double g = lor->gamma;
        const double dt = std::abs(lor->delta_t);
        half_range = dt + 30.0 / g;
        pts.push_back(dt);
        // beyond T both branches are bounded by (g/2) e^{-2gT}(sinh 2g dt + 2 e^{-2g dt})
        tail_bound = 0.25 * std::exp(-2.0 * g * half_range) *
                     (std::sinh(2.0 * g * dt) + 2.0 * std::exp(-2.0 * g * dt));
    } else {
        const auto& g = std::get<GaussianModeParams>(params);
        const double dtau = std::abs(g.delta_tau);
        half_range = dtau + 12.0 * g.sigma;
        // cosh x <= e^|x| gives G2 <= e^{-(tau-dtau)^2/2s^2}/sqrt(2 pi s^2)
        tail_bound =
            0.5 * std::exp(-(half_range - dtau) * (half_range - dtau) /
                           (2.0 * g.sigma * g.sigma));
    }
    if (tail_bound > 1e-10)
        throw NumericError("probabilities_numeric: truncation-error bound " +
                           std::to_string(tail_bound) + " too large");
    QuadratureOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-10;
    const double p_aa = integrate_or_throw<double>(
        [&](double tau) { return g2_pulsed_even(params, tau).auto_corr; }, 0.0, half_range,
        pts, opt);
    const double p_ab = integrate_or_throw<double>(
        [&](double tau) { return g2_pulsed_even(params, tau).cross_corr; }, 0.0, half_range,
        pts, opt);
    ProbabilityTable t;
    t.p_aa = p_aa;
    t.p_ab = p_ab;
    t.p_ba = p_ab;
    t.p_bb = p_aa;
    return t;
}

namespace {

void compare_point(OracleReport& r, double closed, double oracle) {
    r.closed_form.push_back(closed);
    r.oracle_values.push_back(oracle);
}

}  // namespace

std::vector<OracleReport> run_verification() {
    std::vector<OracleReport> reports;
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    {
        OracleReport r;
        r.quantity = "gaussian_g2_closed_vs_quadrature";
        r.tolerance = 1e-6;
        for (int i = 0; i < 25; ++i) {
            GaussianModeParams p;
            p.sigma = 0.3 + 2.0 * uni(rng);
            p.delta_tau = 5.0 * p.sigma * uni(rng);
            p.delta = 10.0 / p.sigma * uni(rng);
            const double tau = (uni(rng) * 6.0 - 3.0) * p.sigma;
            const auto closed = g2_pulsed_even(p, tau);
            auto pa = p, pb = p;
            pa.branch = Branch::a;
            pb.branch = Branch::b;
            const auto numeric = g2_numeric_pulsed(ModeFunction(pa), ModeFunction(pb), tau);
            compare_point(r, closed.auto_corr, numeric.auto_corr);
            compare_point(r, closed.cross_corr, numeric.cross_corr);
        }
        r.finalize();
        reports.push_back(std::move(r));
    }

    {
        OracleReport r;
        r.quantity = "lorentzian_g2_closed_vs_quadrature";
        r.tolerance = 1e-6;
        for (int i = 0; i < 25; ++i) {
            LorentzianModeParams p;
            p.gamma = 0.3 + 3.0 * uni(rng);
            p.delta_t = 5.0 / p.gamma * uni(rng);
            p.delta = 10.0 * p.gamma * uni(rng);
            const double tau = uni(rng) * 4.0 / p.gamma;
            const auto closed = g2_pulsed_even(p, tau);
            auto pa = p, pb = p;
            pa.branch = Branch::a;
            pb.branch = Branch::b;
            const auto numeric = g2_numeric_pulsed(ModeFunction(pa), ModeFunction(pb), tau);
            compare_point(r, closed.auto_corr, numeric.auto_corr);
            compare_point(r, closed.cross_corr, numeric.cross_corr);
        }
        r.finalize();
        reports.push_back(std::move(r));
    }

    {
        OracleReport r;
        r.quantity = "probabilities_closed_vs_numeric";
        r.tolerance = 1e-6;
        for (int i = 0; i < 10; ++i) {
            GaussianModeParams g;
            g.sigma = 0.3 + 2.0 * uni(rng);
            g.delta_tau = 4.0 * g.sigma * uni(rng);
            g.delta = 6.0 / g.sigma * uni(rng);
            LorentzianModeParams l;
            l.gamma = 0.3 + 3.0 * uni(rng);
            l.delta_t = 4.0 / l.gamma * uni(rng);
            l.delta = 8.0 * l.gamma * uni(rng);
            for (const PulseParams p : {PulseParams(g), PulseParams(l)}) {
                const auto closed = correlation_probabilities(p);
                const auto numeric = probabilities_numeric(p);
                compare_point(r, closed.p_aa, numeric.p_aa);
                compare_point(r, closed.p_ab, numeric.p_ab);
            }
        }
        r.finalize();
        reports.push_back(std::move(r));
    }

    {
        OracleReport r_g1;
        r_g1.quantity = "tls_g1_closed_vs_regression_ode";
        r_g1.tolerance = 1e-4;
        r_g1.abs_floor = 1e-10;
        OracleReport r_g2 = r_g1;
        r_g2.quantity = "tls_g2_closed_vs_regression_ode";
        std::vector<double> taus;
        for (int i = 0; i <= 40; ++i) taus.push_back(10.0 * i / 40.0);
        for (double gp : {0.0, 0.5, 2.0}) {
            for (double om : {0.1, 0.45, 2.0, 20.0}) {
                TlsParams p;
                p.gamma1 = 1.0;
                p.gamma_p = gp;
                p.omega = om;
                const auto numeric = tls_correlation_numeric(p, taus);
                for (size_t i = 0; i < taus.size(); ++i) {
                    compare_point(r_g1, g1_tls_closed(p, taus[i]).real(),
                                  numeric.g1[i].real());
                    compare_point(r_g2, g2_tls_closed(p, taus[i]).G2, numeric.g2[i]);
                }
            }
        }
        r_g1.finalize();
        r_g2.finalize();
        reports.push_back(std::move(r_g1));
        reports.push_back(std::move(r_g2));
    }

    {
        OracleReport r;
        r.quantity = "train_analytic_vs_quadrature";
        r.tolerance = 1e-8;
        PulseTrainConfig cfg;
        cfg.shape = PulseShape::Lorentzian;
        cfg.n_side = 1;
        cfg.t_p = 3.0;
        cfg.gamma = 1.0;
        cfg.delta_t = 0.4;
        cfg.delta = 1.3;
        const TimeGrid grid(-4.4, 0.05, 177);
        TrainOptions options;
        options.wrapped = false;
        options.normalization = 1.0;
        const auto analytic = g2_train(cfg, grid, options);
        for (double tau : {0.0, 0.2, 1.0, 2.9, 3.1, 4.4}) {
            const int idx = static_cast<int>(std::llround((tau - grid.t0) / grid.dt));
            const auto numeric = g2_numeric_train(cfg, tau);
            compare_point(r, analytic.series_auto.values[idx].real(), numeric.auto_corr);
            compare_point(r, analytic.series_cross.values[idx].real(), numeric.cross_corr);
        }
        r.finalize();
        reports.push_back(std::move(r));
    }

    return reports;
}

}  // namespace homsim::oracle
