#pragma once

#include <optional>
#include <string>
#include <vector>

#include "homsim/filtering.hpp"
#include "homsim/pulsed.hpp"
#include "homsim/train.hpp"
#include "homsim/types.hpp"

namespace homsim {

/// Config file or CLI problem; carries the offending line/field when known.
struct ConfigError : Error {
    ConfigError(const std::string& msg, int line = 0, const std::string& field = "")
        : Error(format(msg, line, field)), line_no(line), field_name(field) {}
    int line_no;
    std::string field_name;

  private:
    static std::string format(const std::string& msg, int line, const std::string& field) {
        std::string out = "config error";
        if (line > 0) out += " (line " + std::to_string(line) + ")";
        if (!field.empty()) out += " [" + field + "]";
        return out + ": " + msg;
    }
};

/// The oracle suite found a disagreement.
struct VerificationFailure : Error {
    using Error::Error;
};

enum class RunMode { pulsed_pair, train, dip, continuous, polarized, verify };
enum class TimeUnit { ns, us, s };
enum class RateUnit { MHz, GHz, rad_per_s };
enum class OutputFormat { csv, json };

/// Exact conversion factors. Rates are angular frequencies throughout:
/// MHz here denotes 1e6 rad/s (and GHz 1e9 rad/s), so every conversion is
/// an exact power of ten.
double time_factor(TimeUnit u);
double rate_factor(RateUnit u);

std::string to_string(RunMode m);
std::string to_string(TimeUnit u);
std::string to_string(RateUnit u);
std::string to_string(OutputFormat f);

/// Parsed experiment description. Values are stored in the declared config
/// units; conversion to SI happens at run time so a config round-trips
/// byte-exactly through the JSON sidecar.
struct ExperimentConfig {
    RunMode mode = RunMode::verify;
    bool mode_declared = false;  // set when a config file names the mode
    TimeUnit time_unit = TimeUnit::ns;
    RateUnit rate_unit = RateUnit::MHz;

    // pulsed source ([source]); times in time_unit, rates in rate_unit
    PulseShape shape = PulseShape::Lorentzian;
    double gamma = 0.0;
    double sigma = 0.0;
    double delta_t = 0.0;
    double delta = 0.0;
    double t_p = 0.0;
    int n_side = 5;

    // driven TLS ([tls]); rates in rate_unit, phi in radians
    double gamma1 = 0.0;
    double gamma_p = 0.0;
    double omega_re = 0.0;
    double omega_im = 0.0;
    double tls_delta = 0.0;
    double phi = 0.0;

    // tau grid ([tau]) in time_unit
    double tau_min = 0.0;
    double tau_max = 0.0;
    double tau_step = 0.0;

    // dip sweep ([sweep]); offsets in time_unit, carrier deltas in rate_unit
    SweepParameter sweep_parameter = SweepParameter::temporal_offset;
    std::vector<double> sweep_values;

    // [filter]
    bool has_filter = false;
    FilterKind filter_kind = FilterKind::identity;
    double filter_cutoff = 0.0;  // rate_unit
    int filter_taps = 1;
    std::string filter_file;

    // [output]
    std::string out_path;
    OutputFormat format = OutputFormat::csv;

    int threads = 1;

    // resolved accessors (SI)
    double time_si(double v) const { return v * time_factor(time_unit); }
    double rate_si(double v) const { return v * rate_factor(rate_unit); }
    PulseParams pulse_params() const;
    PulseTrainConfig train_config() const;
    TimeGrid tau_grid() const;
    FilterSpec filter_spec(double sample_dt_si) const;

    /// Mode-dependent completeness and consistency checks.
    void validate() const;
};

/// Parse the sectioned key-value config format. Unknown sections or keys are
/// rejected with their line number.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Re-ingest a JSON sidecar produced by a previous run.
ExperimentConfig config_from_json_text(const std::string& text);

/// Reads either format, dispatching on the leading non-space character.
ExperimentConfig load_config(const std::string& path);

/// Sidecar document: the config, resolved SI parameters, run results
/// (normalization), and the library version.
std::string config_to_json(const ExperimentConfig& config,
                           std::optional<double> normalization = std::nullopt);

/// Execute the configured run, writing the curve file and its sidecar.
/// Throws ConfigError / NumericError / VerificationFailure.
void run_experiment(const ExperimentConfig& config);

/// Map an exception from run_experiment to the documented exit code.
int run_experiment_cli(const ExperimentConfig& config, std::string& error_out);

}  // namespace homsim
