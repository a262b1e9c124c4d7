#include "homsim/train.hpp"

#include <cmath>

#include "homsim/parallel.hpp"

namespace homsim {

PulseParams PulseTrainConfig::base_params(Branch branch) const {
    validate();
    if (shape == PulseShape::Lorentzian) {
        LorentzianModeParams p;
        p.gamma = gamma;
        p.delta_t = delta_t;
        p.delta = delta;
        p.branch = branch;
        return p;
    }
    GaussianModeParams p;
    p.sigma = sigma;
    p.delta_tau = delta_t;
    p.delta = delta;
    p.branch = branch;
    return p;
}

std::pair<std::vector<ModeFunction>, std::vector<ModeFunction>> train_modes(
    const PulseTrainConfig& config) {
    config.validate();
    std::vector<ModeFunction> a;
    std::vector<ModeFunction> b;
    a.reserve(config.n_pulses());
    b.reserve(config.n_pulses());
    for (int k = -config.n_side; k <= config.n_side; ++k) {
        a.emplace_back(TrainMemberParams{config.base_params(Branch::a), k * config.t_p});
        b.emplace_back(TrainMemberParams{config.base_params(Branch::b), k * config.t_p});
    }
    return {std::move(a), std::move(b)};
}

PortPair train_intensity_correlation(const PulseTrainConfig& config, double t, double tau) {
    const auto [modes_a, modes_b] = train_modes(config);
    const int n = static_cast<int>(modes_a.size());
    ArrayXcd at(n), att(n), bt(n), btt(n);
    for (int k = 0; k < n; ++k) {
        at[k] = modes_a[k].eval(t);
        att[k] = modes_a[k].eval(t + tau);
        bt[k] = modes_b[k].eval(t);
        btt[k] = modes_b[k].eval(t + tau);
    }
    PortPair out;
    for (const auto& [ct, ctt, dt_, dtt] :
         {std::tie(at, att, bt, btt), std::tie(bt, btt, at, att)}) {
        // one photon per mode: <cdag_m cdag_m c_m c_m> = 0, <cdag_m c_m> = 1
        const Complex s_fwd = (ct.conjugate() * ctt).sum();
        const double diag_coh = (ct.conjugate() * ctt).abs2().sum();
        const double row2 = std::norm(s_fwd) - diag_coh;
        const double ic_t = ct.abs2().sum();
        const double ic_tt = ctt.abs2().sum();
        const double row3 = ic_t * ic_tt - (ct.abs2() * ctt.abs2()).sum();
        const double row4 = ic_t * dtt.abs2().sum();
        const Complex s_rev = (ctt.conjugate() * ct).sum();
        const Complex s_d = (dt_.conjugate() * dtt).sum();
        const double row5 = (s_rev * s_d).real();
        out.auto_corr += 0.25 * (row2 + row3 + row4 + row5);
        out.cross_corr += 0.25 * (row2 + row3 + row4 - row5);
    }
    return out;
}

namespace {

// Elementary full-line t-integrals of mode-pair products; each train term is
// one of these evaluated at a pulse-index displacement.
struct PairKernels {
    // int |e(t)|^2 |e(t + x)|^2 dt for base envelopes displaced by x
    virtual double direct(double x) const = 0;
    // int e1(t) e1(t+tau) e2(t) e2(t+tau) dt for envelopes released d apart
    virtual double coherence(double d, double tau) const = 0;
    virtual ~PairKernels() = default;
};

struct LorentzianKernels final : PairKernels {
    double gamma;
    explicit LorentzianKernels(double g) : gamma(g) {}
    double direct(double x) const override { return gamma * std::exp(-2.0 * gamma * std::abs(x)); }
    double coherence(double d, double tau) const override {
        return gamma * std::exp(-2.0 * gamma * (std::abs(d) + std::abs(tau)));
    }
};

struct GaussianKernels final : PairKernels {
    double sigma;
    explicit GaussianKernels(double s) : sigma(s) {}
    double norm() const { return 1.0 / std::sqrt(2.0 * M_PI * sigma * sigma); }
    double direct(double x) const override {
        return norm() * std::exp(-x * x / (2.0 * sigma * sigma));
    }
    double coherence(double d, double tau) const override {
        return norm() * std::exp(-(d * d + tau * tau) / (2.0 * sigma * sigma));
    }
};

// Ordered-pair multiplicity per pulse-index difference. Circular wrapping
// reduces every difference modulo the train length, which gives all
// differences in [-N, N] the full multiplicity 2N+1 and equalizes the peak
// heights across periods.
struct PairCounts {
    int n_side;
    bool wrapped;

    int max_diff() const { return wrapped ? n_side : 2 * n_side; }
    double multiplicity(int s) const {
        const int m = 2 * n_side + 1;
        if (wrapped) return static_cast<double>(m);
        return static_cast<double>(m - std::abs(s));
    }
};

void analytic_series(const PulseTrainConfig& config, const TimeGrid& grid, bool wrapped,
                     int threads, ArrayXd& auto_out, ArrayXd& cross_out) {
    const LorentzianKernels lor{config.gamma > 0 ? config.gamma : 1.0};
    const GaussianKernels gau{config.sigma > 0 ? config.sigma : 1.0};
    const PairKernels& kern = config.shape == PulseShape::Lorentzian
                                  ? static_cast<const PairKernels&>(lor)
                                  : static_cast<const PairKernels&>(gau);
    const PairCounts counts{config.n_side, wrapped};
    const double dt_off = config.delta_t;
    auto_out.resize(grid.n);
    cross_out.resize(grid.n);
    parallel_for(grid.n, threads, [&](int i) {
        const double tau = grid.point(i);
        double common = 0.0;
        double beat = 0.0;
        for (int s = -counts.max_diff(); s <= counts.max_diff(); ++s) {
            const double mult = counts.multiplicity(s);
            if (mult <= 0.0) continue;
            const double d = s * config.t_p;
            if (s != 0) {
                // intra-source coherence-exchange and direct sums, both sources
                common += 2.0 * mult * (kern.coherence(d, tau) + kern.direct(tau - d));
            }
            // inter-source intensity products, both permutations
            common += mult * (kern.direct(tau - (d + dt_off)) + kern.direct(tau - (d - dt_off)));
            // inter-source interference product; carriers contribute cos(Delta tau)
            beat += mult * (kern.coherence(d - dt_off, tau) + kern.coherence(d + dt_off, tau));
        }
        beat *= std::cos(config.delta * tau);
        auto_out[i] = 0.25 * (common + beat);
        cross_out[i] = 0.25 * (common - beat);
    });
}

// Sampled pipeline: base modes of both sources on one grid, optionally
// filtered, then the same pair assembly with kernels read from discrete
// correlation tables.
struct LagTable {
    ArrayXcd values;  // lag index l in [-(n-1), n-1] stored at l + n - 1
    int n = 0;
    double dt = 0.0;

    Complex at(double x) const {
        const double l = x / dt + (n - 1);
        if (l < 0.0 || l > 2 * (n - 1)) return {};
        const int i = std::min(static_cast<int>(l), 2 * (n - 1) - 1);
        const double w = l - i;
        return (1.0 - w) * values[i] + w * values[i + 1];
    }
};

LagTable correlate(const ArrayXcd& f, const ArrayXcd& g, double dt) {
    // table[l] = dt * sum_k f[k] conj(g[k + l])
    const int n = static_cast<int>(f.size());
    LagTable t;
    t.n = n;
    t.dt = dt;
    t.values = ArrayXcd::Zero(2 * n - 1);
    for (int l = -(n - 1); l <= n - 1; ++l) {
        const int k0 = std::max(0, -l);
        const int k1 = std::min(n, n - l);
        Complex acc{};
        for (int k = k0; k < k1; ++k) acc += f[k] * std::conj(g[k + l]);
        t.values[l + n - 1] = acc * dt;
    }
    return t;
}

void sampled_series(const PulseTrainConfig& config, const TimeGrid& grid,
                    const FilterKernel& kernel, bool wrapped, int threads,
                    ArrayXd& auto_out, ArrayXd& cross_out) {
    const double dt = grid.dt;
    if (config.delta != 0.0 && std::abs(config.delta) * dt > 0.3)
        throw InvalidInput("g2_train: grid too coarse to sample the carrier difference");
    // common sampling window for both base (k = 0) modes
    const ModeFunction base_a = make_mode(config.base_params(Branch::a), Branch::a);
    const ModeFunction base_b = make_mode(config.base_params(Branch::b), Branch::b);
    const auto sup_a = base_a.support();
    const auto sup_b = base_b.support();
    const double pad = kernel.taps.size() * dt;
    const double lo = std::min(sup_a.first, sup_b.first) - pad - dt;
    const double hi = std::max(sup_a.second, sup_b.second) + pad + dt;
    const int n0 = static_cast<int>(std::ceil((hi - lo) / dt)) + 1;
    const TimeGrid sample_grid(lo, dt, n0);
    SampledMode ma = sample_mode(base_a, sample_grid);
    SampledMode mb = sample_mode(base_b, sample_grid);
    if (!kernel.is_identity()) {
        ma = filter_mode(ma, kernel);
        mb = filter_mode(mb, kernel);
    }
    // both modes were sampled (and filtered) on one grid, so index
    // arithmetic below is shared
    const ArrayXcd& fa = ma.samples;
    const ArrayXcd& fb = mb.samples;
    const int n = static_cast<int>(fa.size());

    const PairCounts counts{config.n_side, wrapped};
    const int smax = counts.max_diff();
    const int period_lags = static_cast<int>(std::llround(config.t_p / dt));
    if (std::abs(period_lags * dt - config.t_p) > 1e-9 * config.t_p)
        throw InvalidInput("g2_train: sampled pipeline needs the tau step to divide t_p");

    const ArrayXcd ia = fa.abs2().cast<Complex>();
    const ArrayXcd ib = fb.abs2().cast<Complex>();
    const LagTable f_aa = correlate(ia, ia, dt);
    const LagTable f_bb = correlate(ib, ib, dt);
    const LagTable f_ab = correlate(ia, ib, dt);  // row4 (a,b): |a(t)|^2 |b(t+x)|^2
    const LagTable f_ba = correlate(ib, ia, dt);

    auto shifted = [n](const ArrayXcd& f, int lags) {
        // f(t + lags*dt) on the same index range, zero outside
        ArrayXcd out = ArrayXcd::Zero(n);
        const int k0 = std::max(0, -lags);
        const int k1 = std::min(n, n - lags);
        for (int k = k0; k < k1; ++k) out[k] = f[k + lags];
        return out;
    };

    // row2 tables per source and index difference s: autocorrelation of
    // G_s(t) = m(t) conj(m(t - s t_p))
    std::vector<LagTable> r2_a(2 * smax + 1), r2_b(2 * smax + 1), r5(2 * smax + 1);
    for (int s = -smax; s <= smax; ++s) {
        const int shift = s * period_lags;
        if (s != 0) {
            const ArrayXcd ga = fa * shifted(fa, -shift).conjugate();
            const ArrayXcd gb = fb * shifted(fb, -shift).conjugate();
            r2_a[s + smax] = correlate(ga, ga, dt);
            r2_b[s + smax] = correlate(gb, gb, dt);
        }
        // row5 (a,b): autocorrelation of H_s(t) = m_a(t) conj(m_b(t + s t_p))
        const ArrayXcd hs = fa * shifted(fb, shift).conjugate();
        r5[s + smax] = correlate(hs, hs, dt);
    }

    auto_out.resize(grid.n);
    cross_out.resize(grid.n);
    parallel_for(grid.n, threads, [&](int i) {
        const double tau = grid.point(i);
        double common = 0.0;
        Complex beat{};
        for (int s = -smax; s <= smax; ++s) {
            const double mult = counts.multiplicity(s);
            if (mult <= 0.0) continue;
            const double d = s * config.t_p;
            if (s != 0) {
                common += mult * (r2_a[s + smax].at(tau).real() + r2_b[s + smax].at(tau).real());
                common += mult * (f_aa.at(tau - d).real() + f_bb.at(tau - d).real());
            }
            common += mult * (f_ab.at(tau - d).real() + f_ba.at(tau - d).real());
            const Complex r5s = r5[s + smax].at(tau);
            const Complex r5neg = r5[-s + smax].at(tau);
            beat += mult * (r5s + std::conj(r5neg));
        }
        auto_out[i] = 0.25 * (common + beat.real());
        cross_out[i] = 0.25 * (common - beat.real());
    });
}

}  // namespace

TrainCorrelationResult g2_train(const PulseTrainConfig& config, const TimeGrid& tau_grid,
                                const TrainOptions& options) {
    config.validate();
    const double resolution_limit = config.characteristic_time() / 10.0;
    if (tau_grid.dt > resolution_limit)
        throw InvalidInput("g2_train: tau grid coarser than a tenth of the pulse time scale");
    if (options.wrapped) {
        const double span_limit = (config.n_side + 0.5) * config.t_p + 1e-9 * config.t_p;
        if (tau_grid.t0 < -span_limit || tau_grid.back() > span_limit)
            throw InvalidInput("g2_train: tau grid exceeds the wrapped train span");
    }

    const bool use_sampling = options.filter && !options.filter->is_identity();
    ArrayXd auto_vals, cross_vals;
    if (use_sampling) {
        sampled_series(config, tau_grid, *options.filter, options.wrapped, options.threads,
                       auto_vals, cross_vals);
    } else {
        analytic_series(config, tau_grid, options.wrapped, options.threads, auto_vals,
                        cross_vals);
    }

    double norm;
    if (options.normalization) {
        norm = *options.normalization;
    } else if (config.delta_t == 0.0 && config.delta == 0.0) {
        norm = cross_vals.maxCoeff();
    } else {
        PulseTrainConfig reference = config;
        reference.delta_t = 0.0;
        reference.delta = 0.0;
        ArrayXd ref_auto, ref_cross;
        if (use_sampling) {
            sampled_series(reference, tau_grid, *options.filter, options.wrapped,
                           options.threads, ref_auto, ref_cross);
        } else {
            analytic_series(reference, tau_grid, options.wrapped, options.threads, ref_auto,
                            ref_cross);
        }
        norm = ref_cross.maxCoeff();
    }
    if (!(norm > 0.0)) throw NumericError("g2_train: normalization peak is not positive");

    TrainCorrelationResult out;
    out.normalization = norm;
    out.wrapped = options.wrapped;
    out.series_auto = CorrelationSeries(tau_grid, (auto_vals / norm).cast<Complex>(),
                                        SeriesKind::G2_auto, norm);
    out.series_cross = CorrelationSeries(tau_grid, (cross_vals / norm).cast<Complex>(),
                                         SeriesKind::G2_cross, norm);
    return out;
}

}  // namespace homsim
