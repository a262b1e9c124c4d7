#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "homsim/experiment.hpp"
#include "homsim/version.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::string format;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
    auto* opt = cmd->add_option("--config", flags.config_path, "config file (sections or JSON sidecar)");
    if (config_required) opt->required();
    cmd->add_option("--out", flags.out_path, "output file path");
    cmd->add_option("--format", flags.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", flags.threads, "worker threads for tau grids")
        ->check(CLI::PositiveNumber);
}

int execute(homsim::RunMode mode, const CommonFlags& flags) {
    homsim::ExperimentConfig cfg;
    try {
        if (!flags.config_path.empty()) cfg = homsim::load_config(flags.config_path);
        if (cfg.mode_declared && cfg.mode != mode)
            throw homsim::ConfigError("config mode '" + homsim::to_string(cfg.mode) +
                                      "' conflicts with subcommand '" +
                                      homsim::to_string(mode) + "'");
        cfg.mode = mode;
        if (!flags.out_path.empty()) cfg.out_path = flags.out_path;
        if (!flags.format.empty())
            cfg.format = flags.format == "csv" ? homsim::OutputFormat::csv
                                               : homsim::OutputFormat::json;
        if (flags.threads > 0) cfg.threads = flags.threads;
    } catch (const homsim::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    std::string error;
    const int code = homsim::run_experiment_cli(cfg, error);
    if (code != 0) std::cerr << error << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"beam-splitter correlation functions for pulsed and continuously driven "
                 "microwave photon sources"};
    app.set_version_flag("--version", homsim::kVersion);
    app.require_subcommand(1);

    CommonFlags pulsed, train, dip, continuous, polarized, verify;
    auto* c_pulsed = app.add_subcommand("pulsed-pair", "second-order correlations of one photon pair");
    add_common(c_pulsed, pulsed, true);
    auto* c_train = app.add_subcommand("train", "circular correlations of a pulse train");
    add_common(c_train, train, true);
    auto* c_dip = app.add_subcommand("dip", "Hong-Ou-Mandel coincidence dip scan");
    add_common(c_dip, dip, true);
    auto* c_cont = app.add_subcommand("continuous", "resonance-fluorescence output correlations");
    add_common(c_cont, continuous, true);
    auto* c_pol = app.add_subcommand("polarized", "polarization-resolved output correlations");
    add_common(c_pol, polarized, true);
    auto* c_verify = app.add_subcommand("verify", "run the oracle verification suite");
    add_common(c_verify, verify, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (c_pulsed->parsed()) return execute(homsim::RunMode::pulsed_pair, pulsed);
    if (c_train->parsed()) return execute(homsim::RunMode::train, train);
    if (c_dip->parsed()) return execute(homsim::RunMode::dip, dip);
    if (c_cont->parsed()) return execute(homsim::RunMode::continuous, continuous);
    if (c_pol->parsed()) return execute(homsim::RunMode::polarized, polarized);
    if (c_verify->parsed()) return execute(homsim::RunMode::verify, verify);
    return 2;
}
