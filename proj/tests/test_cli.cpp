#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "homsim/experiment.hpp"
#include "test_support.hpp"

using namespace homsim;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kTrainConfig = R"(
[experiment]
mode = train

[units]
time = ns
rate = MHz

[source]
shape = lorentzian
gamma = 40
delta_t = 0
delta = 0
t_p = 500
n_side = 3

[tau]
min = -1750
max = 1750
step = 2.5

[output]
path = OUTPATH
format = csv
)";

std::string with_output(const char* text, const std::string& path) {
    std::string s = text;
    const auto pos = s.find("OUTPATH");
    s.replace(pos, 7, path);
    return s;
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("full train config") {
        const ExperimentConfig cfg = parse_config_text(with_output(kTrainConfig, "x.csv"));
        CHECK(cfg.mode == RunMode::train);
        CHECK(cfg.mode_declared);
        CHECK(cfg.time_unit == TimeUnit::ns);
        CHECK(cfg.rate_unit == RateUnit::MHz);
        CHECK(cfg.gamma == 40.0);
        CHECK(cfg.t_p == 500.0);
        CHECK(cfg.n_side == 3);
        CHECK(cfg.out_path == "x.csv");
        cfg.validate();
        const PulseTrainConfig t = cfg.train_config();
        CHECK(t.gamma == doctest::Approx(4e7));      // 40 MHz -> rad/s
        CHECK(t.t_p == doctest::Approx(5e-7));       // 500 ns -> s
        const TimeGrid grid = cfg.tau_grid();
        CHECK(grid.n == 1401);
        CHECK(grid.dt == doctest::Approx(2.5e-9));
    }

    SUBCASE("unknown key is rejected with its line") {
        try {
            parse_config_text("[source]\nshape = lorentzian\ngamm = 40\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.line_no == 3);
            CHECK(e.field_name == "source.gamm");
        }
    }

    SUBCASE("unknown section, duplicate key, malformed number") {
        CHECK_THROWS_AS(parse_config_text("[sources]\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[source]\ngamma = 1\ngamma = 2\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[source]\ngamma = fast\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("gamma = 1\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("[units]\ntime = weeks\n"), ConfigError);
    }

    SUBCASE("mode requirements enforced") {
        ExperimentConfig cfg;
        cfg.mode = RunMode::dip;
        cfg.shape = PulseShape::Gaussian;
        cfg.out_path = "x.csv";
        CHECK_THROWS_AS(cfg.validate(), ConfigError);  // no sigma, no sweep
        cfg.sigma = 1.0;
        cfg.sweep_values = {0.0, 1.0};
        cfg.validate();
    }
}

TEST_CASE("json sidecar round trip") {
    ExperimentConfig cfg = parse_config_text(with_output(kTrainConfig, "x.csv"));
    cfg.delta_t = 100.0;
    const std::string json = config_to_json(cfg, 42.5);
    const ExperimentConfig back = config_from_json_text(json);
    CHECK(back.mode == cfg.mode);
    CHECK(back.time_unit == cfg.time_unit);
    CHECK(back.rate_unit == cfg.rate_unit);
    CHECK(back.shape == cfg.shape);
    CHECK(back.gamma == cfg.gamma);
    CHECK(back.delta_t == cfg.delta_t);
    CHECK(back.t_p == cfg.t_p);
    CHECK(back.n_side == cfg.n_side);
    CHECK(back.tau_min == cfg.tau_min);
    CHECK(back.tau_max == cfg.tau_max);
    CHECK(back.tau_step == cfg.tau_step);
    CHECK(back.out_path == cfg.out_path);
    CHECK(back.format == cfg.format);

    SUBCASE("unknown top-level key rejected") {
        CHECK_THROWS_AS(config_from_json_text("{\"surprise\": 1}"), ConfigError);
        CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
    }
}

TEST_CASE("experiment runs write deterministic output") {
    SUBCASE("pulsed pair csv") {
        ExperimentConfig cfg;
        cfg.mode = RunMode::pulsed_pair;
        cfg.time_unit = TimeUnit::s;
        cfg.rate_unit = RateUnit::rad_per_s;
        cfg.shape = PulseShape::Lorentzian;
        cfg.gamma = 1.0;
        cfg.delta_t = 0.7;
        cfg.delta = 3.0;
        cfg.tau_min = -2.0;
        cfg.tau_max = 2.0;
        cfg.tau_step = 0.25;
        cfg.out_path = "pp_test.csv";
        run_experiment(cfg);
        const std::string first = read_file(cfg.out_path);
        CHECK(first.rfind("tau_s,g2_cross,g2_auto\n", 0) == 0);
        run_experiment(cfg);
        CHECK(read_file(cfg.out_path) == first);  // byte-identical reruns

        // sidecar re-ingestion reproduces the same bytes
        const ExperimentConfig back = load_config(cfg.out_path + ".meta.json");
        ExperimentConfig rerun = back;
        rerun.out_path = "pp_test2.csv";
        run_experiment(rerun);
        const std::string second = read_file(rerun.out_path);
        CHECK(second == first);
        std::remove("pp_test.csv");
        std::remove("pp_test.csv.meta.json");
        std::remove("pp_test2.csv");
        std::remove("pp_test2.csv.meta.json");
    }

    SUBCASE("dip csv starts at zero coincidence") {
        ExperimentConfig cfg;
        cfg.mode = RunMode::dip;
        cfg.time_unit = TimeUnit::s;
        cfg.rate_unit = RateUnit::rad_per_s;
        cfg.shape = PulseShape::Gaussian;
        cfg.sigma = 1.0;
        cfg.sweep_parameter = SweepParameter::temporal_offset;
        cfg.sweep_values = {0.0, 1.0, 2.0, 6.0};
        cfg.out_path = "dip_test.csv";
        run_experiment(cfg);
        const std::string text = read_file(cfg.out_path);
        CHECK(text.rfind("offset_s,P_c\n", 0) == 0);
        std::istringstream lines(text);
        std::string header, row0;
        std::getline(lines, header);
        std::getline(lines, row0);
        CHECK(row0 == "0,0");
        std::remove("dip_test.csv");
        std::remove("dip_test.csv.meta.json");
    }

    SUBCASE("train run equals itself with threads") {
        ExperimentConfig cfg = parse_config_text(with_output(kTrainConfig, "tr1.csv"));
        cfg.n_side = 2;
        cfg.tau_min = -1200.0;
        cfg.tau_max = 1200.0;
        run_experiment(cfg);
        ExperimentConfig cfg2 = cfg;
        cfg2.out_path = "tr2.csv";
        cfg2.threads = 2;
        run_experiment(cfg2);
        const std::string a = read_file("tr1.csv");
        std::string b = read_file("tr2.csv");
        CHECK(a == b);
        CHECK(a.rfind("tau_ns,g2_cross,g2_auto,g2_cross_norm,g2_auto_norm\n", 0) == 0);
        std::remove("tr1.csv");
        std::remove("tr1.csv.meta.json");
        std::remove("tr2.csv");
        std::remove("tr2.csv.meta.json");
    }

    SUBCASE("train with coefficients loaded from an FIR file") {
        // write a small normalized kernel at the tau grid spacing
        FilterSpec gen;
        gen.kind = FilterKind::windowed_lowpass;
        gen.sample_dt = 0.02;
        gen.cutoff = 10.0;
        gen.taps = 41;
        save_fir_file("cli_fir.txt", make_filter(gen));
        ExperimentConfig cfg;
        cfg.mode = RunMode::train;
        cfg.time_unit = TimeUnit::s;
        cfg.rate_unit = RateUnit::rad_per_s;
        cfg.shape = PulseShape::Lorentzian;
        cfg.gamma = 1.0;
        cfg.t_p = 25.0;
        cfg.n_side = 1;
        cfg.tau_min = -37.0;
        cfg.tau_max = 37.0;
        cfg.tau_step = 0.02;
        cfg.has_filter = true;
        cfg.filter_kind = FilterKind::fir_coefficients;
        cfg.filter_file = "cli_fir.txt";
        cfg.out_path = "fir_train.csv";
        run_experiment(cfg);
        const std::string text = read_file(cfg.out_path);
        CHECK(text.rfind("tau_s,", 0) == 0);
        std::remove("cli_fir.txt");
        std::remove("fir_train.csv");
        std::remove("fir_train.csv.meta.json");
    }

    SUBCASE("json output format") {
        ExperimentConfig cfg;
        cfg.mode = RunMode::continuous;
        cfg.rate_unit = RateUnit::rad_per_s;
        cfg.time_unit = TimeUnit::s;
        cfg.gamma1 = 1.0;
        cfg.omega_re = 0.5;
        cfg.tls_delta = 10.0;
        cfg.tau_min = 0.0;
        cfg.tau_max = 2.0;
        cfg.tau_step = 0.1;
        cfg.format = OutputFormat::json;
        cfg.out_path = "cont_test.json";
        run_experiment(cfg);
        const std::string text = read_file(cfg.out_path);
        CHECK(text.find("\"g2_cross_norm\"") != std::string::npos);
        std::remove("cont_test.json");
        std::remove("cont_test.json.meta.json");
    }
}

TEST_CASE("exit code mapping") {
    std::string err;

    SUBCASE("config error is 2") {
        ExperimentConfig cfg;  // verify default but missing everything for train
        cfg.mode = RunMode::train;
        CHECK(run_experiment_cli(cfg, err) == 2);
        CHECK(!err.empty());
    }

    SUBCASE("undersampled train grid is a rejected input") {
        ExperimentConfig cfg = parse_config_text(with_output(kTrainConfig, "zz.csv"));
        cfg.tau_step = 100.0;  // far coarser than 1/(10 gamma)
        CHECK(run_experiment_cli(cfg, err) == 2);
    }
}

#ifdef HOMSIM_CLI_PATH
TEST_CASE("command line binary") {
    const std::string exe = HOMSIM_CLI_PATH;

    SUBCASE("bad arguments exit with the config code") {
        const int rc = std::system((exe + " frobnicate >/dev/null 2>&1").c_str());
        CHECK(WEXITSTATUS(rc) == 2);
        const int rc2 = std::system((exe + " train >/dev/null 2>&1").c_str());
        CHECK(WEXITSTATUS(rc2) == 2);  // --config is required
    }

    SUBCASE("dip run through the real CLI") {
        {
            std::ofstream cfg("cli_dip.ini");
            cfg << "[experiment]\nmode = dip\n[units]\ntime = s\nrate = rad_per_s\n"
                   "[source]\nshape = gaussian\nsigma = 1\n"
                   "[sweep]\nparameter = offset\nvalues = 0, 1, 2\n"
                   "[output]\npath = cli_dip.csv\n";
        }
        const int rc = std::system((exe + " dip --config cli_dip.ini >/dev/null 2>&1").c_str());
        CHECK(WEXITSTATUS(rc) == 0);
        CHECK(read_file("cli_dip.csv").rfind("offset_s,P_c\n", 0) == 0);
        std::remove("cli_dip.ini");
        std::remove("cli_dip.csv");
        std::remove("cli_dip.csv.meta.json");
    }

    SUBCASE("conflicting mode between config and subcommand") {
        {
            std::ofstream cfg("cli_conflict.ini");
            cfg << "[experiment]\nmode = dip\n[source]\nshape = gaussian\nsigma = 1\n"
                   "[sweep]\nparameter = offset\nvalues = 0\n[output]\npath = x.csv\n";
        }
        const int rc =
            std::system((exe + " train --config cli_conflict.ini >/dev/null 2>&1").c_str());
        CHECK(WEXITSTATUS(rc) == 2);
        std::remove("cli_conflict.ini");
    }
}
#endif
