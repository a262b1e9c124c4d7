#pragma once

#include <string>
#include <vector>

#include "homsim/bloch.hpp"
#include "homsim/pulsed.hpp"
#include "homsim/quadrature.hpp"
#include "homsim/train.hpp"
#include "homsim/types.hpp"

namespace homsim::oracle {

/// Outcome of one closed-form-versus-brute-force comparison.
struct OracleReport {
    std::string quantity;
    std::vector<double> closed_form;
    std::vector<double> oracle_values;
    double max_rel_err = 0.0;
    double tolerance = 0.0;
    double abs_floor = 1e-12;
    bool passed = false;

    void finalize();
    std::string to_json() const;
};

/// Direct numeric t-integration of the pair intensity correlation; the
/// ground truth for the pulsed closed forms.
PortPair g2_numeric_pulsed(const ModeFunction& mode_a, const ModeFunction& mode_b,
                           double tau, const QuadratureOptions& opt = {});

/// Literal nested-loop evaluation of the five train sums; deliberately
/// re-derived rather than reusing the optimized train path.
PortPair train_intensity_naive(const PulseTrainConfig& config, double t, double tau);

/// t-integration of the naive train correlation (unwrapped finite train).
PortPair g2_numeric_train(const PulseTrainConfig& config, double tau,
                          const QuadratureOptions& opt = {});

struct TlsNumericSeries {
    std::vector<Complex> g1;
    std::vector<double> g2;
};

/// Adaptive ODE integration of the Bloch equations plus the quantum
/// regression theorem, with operator products reduced by Pauli algebra.
/// Independent of the eigendecomposition propagator.
TlsNumericSeries tls_correlation_numeric(const TlsParams& p,
                                         const std::vector<double>& taus);

/// Probability table from numeric tau-integration of the closed-form G2.
ProbabilityTable probabilities_numeric(const PulseParams& params);

/// The deterministic verification suite behind the `verify` CLI command.
std::vector<OracleReport> run_verification();

bool all_passed(const std::vector<OracleReport>& reports);

std::string reports_to_json(const std::vector<OracleReport>& reports);

}  // namespace homsim::oracle
