#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "homsim/filtering.hpp"
#include "homsim/train.hpp"
#include "test_support.hpp"

using namespace homsim;

namespace {

SampledMode sample_lorentzian(double gamma, double dt) {
    LorentzianModeParams p;
    p.gamma = gamma;
    const ModeFunction m{p};
    const int n = static_cast<int>(std::ceil(25.0 / gamma / dt));
    return sample_mode(m, TimeGrid(-2.0 / gamma, dt, n));
}

}  // namespace

TEST_CASE("make_filter") {
    SUBCASE("identity is a single unit tap") {
        const FilterKernel k = make_filter({});
        REQUIRE(k.taps.size() == 1);
        CHECK(k.taps[0] == 1.0);
        CHECK(k.is_identity());
        CHECK(k.dc_gain == 1.0);
    }

    SUBCASE("square window is a normalized boxcar") {
        FilterSpec spec;
        spec.kind = FilterKind::square_window;
        spec.taps = 8;
        const FilterKernel k = make_filter(spec);
        CHECK(k.taps.size() == 8);
        CHECK(k.dc_gain == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(k.taps.minCoeff() == k.taps.maxCoeff());
    }

    SUBCASE("windowed lowpass: unit DC gain and stopband attenuation") {
        FilterSpec spec;
        spec.kind = FilterKind::windowed_lowpass;
        spec.sample_dt = 0.01;
        spec.cutoff = 2.0 * M_PI * 5.0;  // rad/s
        spec.taps = 201;
        const FilterKernel k = make_filter(spec);
        CHECK(std::abs(k.dc_gain - 1.0) <= 1e-12);
        CHECK(std::abs(filter_response(k, 0.0) - Complex(1.0, 0.0)) <= 1e-12);
        // >= 20 dB down at five times the cutoff
        const double h5 = std::abs(filter_response(k, 5.0 * spec.cutoff));
        CHECK(h5 <= 0.1);
    }

    SUBCASE("lowpass rejects a non-positive cutoff") {
        FilterSpec spec;
        spec.kind = FilterKind::windowed_lowpass;
        spec.sample_dt = 0.01;
        spec.cutoff = 0.0;
        CHECK_THROWS_AS(make_filter(spec), InvalidInput);
    }
}

TEST_CASE("filter_mode") {
    const double dt = 0.01;
    const SampledMode mode = sample_lorentzian(1.0, dt);

    SUBCASE("identity kernel returns the input bit-for-bit") {
        const SampledMode out = filter_mode(mode, make_filter({}));
        REQUIRE(out.samples.size() == mode.samples.size());
        for (int i = 0; i < out.samples.size(); ++i)
            CHECK(out.samples[i] == mode.samples[i]);
        CHECK(out.grid.t0 == mode.grid.t0);
    }

    SUBCASE("linearity") {
        FilterSpec spec;
        spec.kind = FilterKind::windowed_lowpass;
        spec.sample_dt = dt;
        spec.cutoff = 10.0;
        spec.taps = 41;
        const FilterKernel k = make_filter(spec);
        const SampledMode other = sample_lorentzian(2.0, dt);
        const int n = std::min(mode.grid.n, other.grid.n);
        const TimeGrid grid(mode.grid.t0, dt, n);
        const Complex alpha{0.7, -0.3}, beta{-1.2, 0.4};
        SampledMode m1(grid, mode.samples.head(n));
        SampledMode m2(grid, other.samples.head(n));
        SampledMode combo(grid, alpha * m1.samples + beta * m2.samples);
        const SampledMode lhs = filter_mode(combo, k);
        const SampledMode f1 = filter_mode(m1, k);
        const SampledMode f2 = filter_mode(m2, k);
        for (int i = 0; i < lhs.samples.size(); ++i)
            CHECK(std::abs(lhs.samples[i] - (alpha * f1.samples[i] + beta * f2.samples[i])) <=
                  1e-12);
    }

    SUBCASE("smooths the release-step discontinuity") {
        FilterSpec spec;
        spec.kind = FilterKind::windowed_lowpass;
        spec.sample_dt = dt;
        spec.cutoff = 20.0;
        spec.taps = 81;
        const FilterKernel k = make_filter(spec);
        const SampledMode out = filter_mode(mode, k);
        double max_step_raw = 0.0, max_step_filtered = 0.0;
        for (int i = 1; i < mode.samples.size(); ++i)
            max_step_raw = std::max(max_step_raw,
                                    std::abs(mode.samples[i] - mode.samples[i - 1]));
        for (int i = 1; i < out.samples.size(); ++i)
            max_step_filtered =
                std::max(max_step_filtered, std::abs(out.samples[i] - out.samples[i - 1]));
        const double jump = std::sqrt(2.0);  // mode amplitude at release, gamma = 1
        CHECK(max_step_raw >= 0.9 * jump);
        // kernel-dependent bound: max tap weight times the jump, plus the
        // smooth-decay contribution
        const double bound = jump * k.taps.abs().maxCoeff() + 3.0 * dt;
        CHECK(max_step_filtered <= bound);
        CHECK(max_step_filtered < 0.2 * jump);
    }

    SUBCASE("sample spacing must match the kernel") {
        FilterSpec spec;
        spec.kind = FilterKind::windowed_lowpass;
        spec.sample_dt = 2.0 * dt;
        spec.cutoff = 10.0;
        spec.taps = 21;
        CHECK_THROWS_AS(filter_mode(mode, make_filter(spec)), InvalidInput);
    }

    SUBCASE("filtered norm is recorded, not enforced") {
        FilterSpec spec;
        spec.kind = FilterKind::square_window;
        spec.taps = 51;
        spec.sample_dt = dt;
        const SampledMode out = filter_mode(mode, make_filter(spec));
        const double norm = mode_norm(out);
        CHECK(norm < 1.0);  // averaging spreads the step and loses norm
        CHECK(norm > 0.5);
    }
}

TEST_CASE("fir coefficient files") {
    const std::string path = "test_fir_coeffs.txt";

    SUBCASE("round trip") {
        FilterSpec spec;
        spec.kind = FilterKind::windowed_lowpass;
        spec.sample_dt = 0.02;
        spec.cutoff = 7.0;
        spec.taps = 11;
        const FilterKernel k = make_filter(spec);
        save_fir_file(path, k);
        const FilterSpec loaded = load_fir_file(path);
        CHECK(loaded.sample_dt == doctest::Approx(k.sample_dt).epsilon(1e-15));
        REQUIRE(static_cast<int>(loaded.coefficients.size()) == k.taps.size());
        for (int i = 0; i < k.taps.size(); ++i)
            CHECK(loaded.coefficients[i] == doctest::Approx(k.taps[i]).epsilon(1e-15));
        std::remove(path.c_str());
    }

    SUBCASE("missing header rejected") {
        std::FILE* f = std::fopen(path.c_str(), "w");
        std::fputs("0.5\n0.5\n", f);
        std::fclose(f);
        CHECK_THROWS_AS(load_fir_file(path), InvalidInput);
        std::remove(path.c_str());
    }
}

TEST_CASE("filtering preserves the interference dip of the train") {
    PulseTrainConfig c;
    c.shape = PulseShape::Lorentzian;
    c.n_side = 2;
    c.gamma = 1.0;
    c.t_p = 25.0;
    const TimeGrid grid = TimeGrid::symmetric(62.0, 0.02);

    FilterSpec spec;
    spec.kind = FilterKind::windowed_lowpass;
    spec.sample_dt = grid.dt;
    spec.cutoff = 10.0;  // kernel width ~ 0.1 / gamma
    spec.taps = 81;

    TrainOptions options;
    options.filter = make_filter(spec);
    const auto result = g2_train(c, grid, options);
    const ArrayXd cross = result.series_cross.real_values();

    // cross(0)/peak stays suppressed: the cancellation survives any common
    // mode distortion
    const int mid = (grid.n - 1) / 2;
    CHECK(std::abs(cross[mid]) <= 1e-6);
    // peaks still normalized to one
    const int peak = static_cast<int>(std::llround((c.t_p - grid.t0) / grid.dt));
    CHECK(cross[peak] == doctest::Approx(1.0).epsilon(1e-3));
}
