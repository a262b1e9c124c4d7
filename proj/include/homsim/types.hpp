#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace homsim {

using Complex = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;

inline constexpr Complex kImag{0.0, 1.0};

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Contract violation on an input (grid mismatch, bad parameter, ...).
struct InvalidInput : Error {
    using Error::Error;
};

/// A numerical routine failed to reach its requested accuracy.
struct NumericError : Error {
    using Error::Error;
};

/// Bloch system matrix is singular at a parameter degeneracy.
struct DegenerateParameters : Error {
    using Error::Error;
};

/// Uniform time grid with points t0 + k*dt, k = 0..n-1.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    int n = 0;

    TimeGrid() = default;
    TimeGrid(double t0_, double dt_, int n_) : t0(t0_), dt(dt_), n(n_) { validate(); }

    void validate() const {
        if (!(dt > 0.0)) throw InvalidInput("TimeGrid: dt must be > 0");
        if (n < 2) throw InvalidInput("TimeGrid: need at least 2 points");
    }

    double point(int k) const { return t0 + k * dt; }
    double back() const { return point(n - 1); }

    bool operator==(const TimeGrid& o) const { return t0 == o.t0 && dt == o.dt && n == o.n; }

    /// Symmetric grid covering [-half_span, +half_span] with an odd point count.
    static TimeGrid symmetric(double half_span, double step) {
        if (!(step > 0.0)) throw InvalidInput("TimeGrid: step must be > 0");
        const int half = static_cast<int>(std::ceil(half_span / step - 1e-12));
        return TimeGrid(-half * step, step, 2 * half + 1);
    }
};

enum class SeriesKind { G1, G2_auto, G2_cross, intensity };

/// Tolerance below which a second-order correlation value may dip negative
/// from rounding before it is an error.
inline constexpr double kG2NegativeTolerance = 1e-9;

/// Correlation values on a shared tau grid. G2-kind series are real-valued
/// up to numerical noise; they are stored complex so G1 fits the same type.
struct CorrelationSeries {
    TimeGrid grid;
    ArrayXcd values;
    SeriesKind kind = SeriesKind::intensity;
    double normalization = 1.0;  // scale factor already divided out

    CorrelationSeries() = default;
    CorrelationSeries(TimeGrid g, ArrayXcd v, SeriesKind k, double norm = 1.0)
        : grid(g), values(std::move(v)), kind(k), normalization(norm) {
        if (values.size() != grid.n)
            throw InvalidInput("CorrelationSeries: values length must equal grid.n");
    }

    /// Real part, after checking a G2 series is real and not significantly negative.
    ArrayXd real_values() const {
        if (kind == SeriesKind::G2_auto || kind == SeriesKind::G2_cross) {
            const double scale = values.abs().maxCoeff() + 1e-300;
            if ((values.imag().abs() > 1e-9 * scale).any())
                throw NumericError("CorrelationSeries: G2 values have non-negligible imaginary part");
            if ((values.real() < -kG2NegativeTolerance * normalization).any())
                throw NumericError("CorrelationSeries: G2 values negative beyond tolerance");
        }
        return values.real();
    }
};

/// One photon at each output port of the beam splitter vs both at the same
/// port: every second-order quantity comes in this pair.
struct PortPair {
    double auto_corr = 0.0;
    double cross_corr = 0.0;
};

enum class Port { auto_corr, cross_corr };

}  // namespace homsim
