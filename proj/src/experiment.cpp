#include "homsim/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "homsim/bloch.hpp"
#include "homsim/oracle.hpp"
#include "homsim/parallel.hpp"
#include "homsim/version.hpp"

namespace homsim {

using nlohmann::ordered_json;

double time_factor(TimeUnit u) {
    switch (u) {
        case TimeUnit::ns: return 1e-9;
        case TimeUnit::us: return 1e-6;
        case TimeUnit::s: return 1.0;
    }
    return 1.0;
}

double rate_factor(RateUnit u) {
    // Angular-frequency units: MHz is 1e6 rad/s, so the factors stay exact.
    switch (u) {
        case RateUnit::MHz: return 1e6;
        case RateUnit::GHz: return 1e9;
        case RateUnit::rad_per_s: return 1.0;
    }
    return 1.0;
}

std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::pulsed_pair: return "pulsed_pair";
        case RunMode::train: return "train";
        case RunMode::dip: return "dip";
        case RunMode::continuous: return "continuous";
        case RunMode::polarized: return "polarized";
        case RunMode::verify: return "verify";
    }
    return "?";
}

std::string to_string(TimeUnit u) {
    switch (u) {
        case TimeUnit::ns: return "ns";
        case TimeUnit::us: return "us";
        case TimeUnit::s: return "s";
    }
    return "?";
}

std::string to_string(RateUnit u) {
    switch (u) {
        case RateUnit::MHz: return "MHz";
        case RateUnit::GHz: return "GHz";
        case RateUnit::rad_per_s: return "rad_per_s";
    }
    return "?";
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

namespace {

template <typename Enum>
Enum parse_enum(const std::string& value, const std::map<std::string, Enum>& table,
                const std::string& field, int line) {
    auto it = table.find(value);
    if (it == table.end()) throw ConfigError("unknown value '" + value + "'", line, field);
    return it->second;
}

const std::map<std::string, RunMode> kModes = {
    {"pulsed_pair", RunMode::pulsed_pair}, {"pulsed-pair", RunMode::pulsed_pair},
    {"train", RunMode::train},             {"dip", RunMode::dip},
    {"continuous", RunMode::continuous},   {"polarized", RunMode::polarized},
    {"verify", RunMode::verify}};
const std::map<std::string, TimeUnit> kTimeUnits = {
    {"ns", TimeUnit::ns}, {"us", TimeUnit::us}, {"s", TimeUnit::s}};
const std::map<std::string, RateUnit> kRateUnits = {
    {"MHz", RateUnit::MHz}, {"GHz", RateUnit::GHz}, {"rad_per_s", RateUnit::rad_per_s}};
const std::map<std::string, PulseShape> kShapes = {{"gaussian", PulseShape::Gaussian},
                                                   {"lorentzian", PulseShape::Lorentzian}};
const std::map<std::string, OutputFormat> kFormats = {{"csv", OutputFormat::csv},
                                                      {"json", OutputFormat::json}};
const std::map<std::string, SweepParameter> kSweepParams = {
    {"offset", SweepParameter::temporal_offset},
    {"delta", SweepParameter::carrier_difference}};
const std::map<std::string, FilterKind> kFilterKinds = {
    {"identity", FilterKind::identity},
    {"square_window", FilterKind::square_window},
    {"windowed_lowpass", FilterKind::windowed_lowpass},
    {"fir_file", FilterKind::fir_coefficients}};

double parse_double(const std::string& value, const std::string& field, int line) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used])))
            ++used;
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + value + "'", line, field);
    }
}

int parse_int(const std::string& value, const std::string& field, int line) {
    const double v = parse_double(value, field, line);
    if (v != std::floor(v)) throw ConfigError("expected an integer", line, field);
    return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& value, const std::string& field, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(parse_double(item.substr(b, e - b + 1), field, line));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

PulseParams ExperimentConfig::pulse_params() const {
    if (shape == PulseShape::Gaussian) {
        GaussianModeParams p;
        p.sigma = time_si(sigma);
        p.delta_tau = time_si(delta_t);
        p.delta = rate_si(delta);
        return p;
    }
    LorentzianModeParams p;
    p.gamma = rate_si(gamma);
    p.delta_t = time_si(delta_t);
    p.delta = rate_si(delta);
    return p;
}

PulseTrainConfig ExperimentConfig::train_config() const {
    PulseTrainConfig c;
    c.shape = shape;
    c.n_side = n_side;
    c.t_p = time_si(t_p);
    c.gamma = rate_si(gamma);
    c.sigma = time_si(sigma);
    c.delta_t = time_si(delta_t);
    c.delta = rate_si(delta);
    return c;
}

TimeGrid ExperimentConfig::tau_grid() const {
    if (!(tau_step > 0.0)) throw ConfigError("tau step must be > 0", 0, "tau.step");
    if (!(tau_max > tau_min)) throw ConfigError("tau max must exceed min", 0, "tau.max");
    const int n = static_cast<int>(std::llround((tau_max - tau_min) / tau_step)) + 1;
    return TimeGrid(time_si(tau_min), time_si(tau_step), n);
}

FilterSpec ExperimentConfig::filter_spec(double sample_dt_si) const {
    FilterSpec spec;
    if (!has_filter) return spec;
    spec.kind = filter_kind;
    spec.taps = filter_taps;
    spec.cutoff = rate_si(filter_cutoff);
    spec.sample_dt = sample_dt_si;
    if (filter_kind == FilterKind::fir_coefficients) {
        const FilterSpec loaded = load_fir_file(filter_file);
        spec.coefficients = loaded.coefficients;
        spec.taps = loaded.taps;
        spec.sample_dt = loaded.sample_dt;
    }
    return spec;
}

void ExperimentConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    const bool pulsed_modes = mode == RunMode::pulsed_pair || mode == RunMode::train ||
                              mode == RunMode::dip;
    if (pulsed_modes) {
        if (shape == PulseShape::Gaussian)
            require(sigma > 0.0, "gaussian source needs sigma > 0");
        else
            require(gamma > 0.0, "lorentzian source needs gamma > 0");
    }
    if (mode == RunMode::train) {
        require(t_p > 0.0, "train needs t_p > 0");
        require(n_side >= 0, "train needs n_side >= 0");
    }
    if (mode == RunMode::pulsed_pair || mode == RunMode::train ||
        mode == RunMode::continuous || mode == RunMode::polarized) {
        require(tau_step > 0.0, "tau grid needs step > 0");
        require(tau_max > tau_min, "tau grid needs max > min");
    }
    if (mode == RunMode::dip) require(!sweep_values.empty(), "dip needs sweep values");
    if (mode == RunMode::continuous || mode == RunMode::polarized) {
        require(gamma1 > 0.0, "tls needs gamma1 > 0");
        require(gamma_p >= 0.0, "tls needs gamma_p >= 0");
        require(omega_re != 0.0 || omega_im != 0.0, "tls needs a nonzero omega");
    }
    if (has_filter && filter_kind == FilterKind::windowed_lowpass)
        require(filter_cutoff > 0.0, "windowed_lowpass needs cutoff > 0");
    if (has_filter && filter_kind == FilterKind::fir_coefficients)
        require(!filter_file.empty(), "fir_file filter needs file");
    if (mode != RunMode::verify) require(!out_path.empty(), "output path is required");
    require(threads >= 1, "threads must be >= 1");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    std::set<std::string> seen;

    const std::set<std::string> known_keys = {
        "experiment.mode",  "units.time",      "units.rate",      "source.shape",
        "source.gamma",     "source.sigma",    "source.delta_t",  "source.delta",
        "source.t_p",       "source.n_side",   "tls.gamma1",      "tls.gamma_p",
        "tls.omega_re",     "tls.omega_im",    "tls.delta",       "tls.phi",
        "tau.min",          "tau.max",         "tau.step",        "sweep.parameter",
        "sweep.values",     "filter.kind",     "filter.cutoff",   "filter.taps",
        "filter.file",      "output.path",     "output.format",   "output.threads"};

    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("malformed section header", line_no);
            section = s.substr(1, s.size() - 2);
            static const std::set<std::string> known_sections = {
                "experiment", "units", "source", "tls", "tau", "sweep", "filter", "output"};
            if (!known_sections.count(section))
                throw ConfigError("unknown section [" + section + "]", line_no);
            if (section == "filter") cfg.has_filter = true;
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (section.empty()) throw ConfigError("key outside any section", line_no, key);
        const std::string full = section + "." + key;
        if (!known_keys.count(full)) throw ConfigError("unknown key", line_no, full);
        if (!seen.insert(full).second) throw ConfigError("duplicate key", line_no, full);

        if (full == "experiment.mode") {
            cfg.mode = parse_enum(value, kModes, full, line_no);
            cfg.mode_declared = true;
        }
        else if (full == "units.time") cfg.time_unit = parse_enum(value, kTimeUnits, full, line_no);
        else if (full == "units.rate") cfg.rate_unit = parse_enum(value, kRateUnits, full, line_no);
        else if (full == "source.shape") cfg.shape = parse_enum(value, kShapes, full, line_no);
        else if (full == "source.gamma") cfg.gamma = parse_double(value, full, line_no);
        else if (full == "source.sigma") cfg.sigma = parse_double(value, full, line_no);
        else if (full == "source.delta_t") cfg.delta_t = parse_double(value, full, line_no);
        else if (full == "source.delta") cfg.delta = parse_double(value, full, line_no);
        else if (full == "source.t_p") cfg.t_p = parse_double(value, full, line_no);
        else if (full == "source.n_side") cfg.n_side = parse_int(value, full, line_no);
        else if (full == "tls.gamma1") cfg.gamma1 = parse_double(value, full, line_no);
        else if (full == "tls.gamma_p") cfg.gamma_p = parse_double(value, full, line_no);
        else if (full == "tls.omega_re") cfg.omega_re = parse_double(value, full, line_no);
        else if (full == "tls.omega_im") cfg.omega_im = parse_double(value, full, line_no);
        else if (full == "tls.delta") cfg.tls_delta = parse_double(value, full, line_no);
        else if (full == "tls.phi") cfg.phi = parse_double(value, full, line_no);
        else if (full == "tau.min") cfg.tau_min = parse_double(value, full, line_no);
        else if (full == "tau.max") cfg.tau_max = parse_double(value, full, line_no);
        else if (full == "tau.step") cfg.tau_step = parse_double(value, full, line_no);
        else if (full == "sweep.parameter")
            cfg.sweep_parameter = parse_enum(value, kSweepParams, full, line_no);
        else if (full == "sweep.values") cfg.sweep_values = parse_list(value, full, line_no);
        else if (full == "filter.kind")
            cfg.filter_kind = parse_enum(value, kFilterKinds, full, line_no);
        else if (full == "filter.cutoff") cfg.filter_cutoff = parse_double(value, full, line_no);
        else if (full == "filter.taps") cfg.filter_taps = parse_int(value, full, line_no);
        else if (full == "filter.file") cfg.filter_file = value;
        else if (full == "output.path") cfg.out_path = value;
        else if (full == "output.format") cfg.format = parse_enum(value, kFormats, full, line_no);
        else if (full == "output.threads") cfg.threads = parse_int(value, full, line_no);
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

double get_num(const ordered_json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    static const std::set<std::string> known = {
        "homsim_version", "mode",   "units", "source",  "tls",    "tau",
        "sweep",          "filter", "output", "threads", "resolved_si", "results"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown key", 0, key);

    ExperimentConfig cfg;
    if (j.contains("mode")) {
        cfg.mode = parse_enum(j["mode"].get<std::string>(), kModes, "mode", 0);
        cfg.mode_declared = true;
    }
    if (j.contains("units")) {
        cfg.time_unit =
            parse_enum(j["units"].at("time").get<std::string>(), kTimeUnits, "units.time", 0);
        cfg.rate_unit =
            parse_enum(j["units"].at("rate").get<std::string>(), kRateUnits, "units.rate", 0);
    }
    if (j.contains("source")) {
        const auto& s = j["source"];
        cfg.shape = parse_enum(s.at("shape").get<std::string>(), kShapes, "source.shape", 0);
        cfg.gamma = get_num(s, "gamma", 0.0);
        cfg.sigma = get_num(s, "sigma", 0.0);
        cfg.delta_t = get_num(s, "delta_t", 0.0);
        cfg.delta = get_num(s, "delta", 0.0);
        cfg.t_p = get_num(s, "t_p", 0.0);
        cfg.n_side = static_cast<int>(get_num(s, "n_side", 5));
    }
    if (j.contains("tls")) {
        const auto& s = j["tls"];
        cfg.gamma1 = get_num(s, "gamma1", 0.0);
        cfg.gamma_p = get_num(s, "gamma_p", 0.0);
        cfg.omega_re = get_num(s, "omega_re", 0.0);
        cfg.omega_im = get_num(s, "omega_im", 0.0);
        cfg.tls_delta = get_num(s, "delta", 0.0);
        cfg.phi = get_num(s, "phi", 0.0);
    }
    if (j.contains("tau")) {
        const auto& s = j["tau"];
        cfg.tau_min = get_num(s, "min", 0.0);
        cfg.tau_max = get_num(s, "max", 0.0);
        cfg.tau_step = get_num(s, "step", 0.0);
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        cfg.sweep_parameter = parse_enum(s.at("parameter").get<std::string>(), kSweepParams,
                                         "sweep.parameter", 0);
        cfg.sweep_values = s.at("values").get<std::vector<double>>();
    }
    if (j.contains("filter") && !j["filter"].is_null()) {
        const auto& s = j["filter"];
        cfg.has_filter = true;
        cfg.filter_kind =
            parse_enum(s.at("kind").get<std::string>(), kFilterKinds, "filter.kind", 0);
        cfg.filter_cutoff = get_num(s, "cutoff", 0.0);
        cfg.filter_taps = static_cast<int>(get_num(s, "taps", 1));
        if (s.contains("file")) cfg.filter_file = s["file"].get<std::string>();
    }
    if (j.contains("output")) {
        const auto& s = j["output"];
        if (s.contains("path")) cfg.out_path = s["path"].get<std::string>();
        if (s.contains("format"))
            cfg.format = parse_enum(s["format"].get<std::string>(), kFormats, "output.format", 0);
    }
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return config_from_json_text(text);
    return parse_config_text(text);
}

std::string config_to_json(const ExperimentConfig& cfg, std::optional<double> normalization) {
    ordered_json j;
    j["homsim_version"] = kVersion;
    j["mode"] = to_string(cfg.mode);
    j["units"] = {{"time", to_string(cfg.time_unit)}, {"rate", to_string(cfg.rate_unit)}};
    j["source"] = {{"shape", cfg.shape == PulseShape::Gaussian ? "gaussian" : "lorentzian"},
                   {"gamma", cfg.gamma},
                   {"sigma", cfg.sigma},
                   {"delta_t", cfg.delta_t},
                   {"delta", cfg.delta},
                   {"t_p", cfg.t_p},
                   {"n_side", cfg.n_side}};
    j["tls"] = {{"gamma1", cfg.gamma1},   {"gamma_p", cfg.gamma_p}, {"omega_re", cfg.omega_re},
                {"omega_im", cfg.omega_im}, {"delta", cfg.tls_delta}, {"phi", cfg.phi}};
    j["tau"] = {{"min", cfg.tau_min}, {"max", cfg.tau_max}, {"step", cfg.tau_step}};
    j["sweep"] = {{"parameter", cfg.sweep_parameter == SweepParameter::temporal_offset
                                    ? "offset"
                                    : "delta"},
                  {"values", cfg.sweep_values}};
    if (cfg.has_filter) {
        std::string kind;
        for (const auto& [name, k] : kFilterKinds)
            if (k == cfg.filter_kind) kind = name;
        j["filter"] = {{"kind", kind},
                       {"cutoff", cfg.filter_cutoff},
                       {"taps", cfg.filter_taps},
                       {"file", cfg.filter_file}};
    } else {
        j["filter"] = nullptr;
    }
    j["output"] = {{"path", cfg.out_path}, {"format", to_string(cfg.format)}};
    j["threads"] = cfg.threads;

    ordered_json si;
    const double tf = time_factor(cfg.time_unit);
    const double rf = rate_factor(cfg.rate_unit);
    si["gamma_rad_per_s"] = cfg.gamma * rf;
    si["sigma_s"] = cfg.sigma * tf;
    si["delta_t_s"] = cfg.delta_t * tf;
    si["delta_rad_per_s"] = cfg.delta * rf;
    si["t_p_s"] = cfg.t_p * tf;
    si["gamma1_rad_per_s"] = cfg.gamma1 * rf;
    si["gamma_p_rad_per_s"] = cfg.gamma_p * rf;
    si["omega_rad_per_s"] = {cfg.omega_re * rf, cfg.omega_im * rf};
    si["tls_delta_rad_per_s"] = cfg.tls_delta * rf;
    si["phi_rad"] = cfg.phi;
    si["tau_s"] = {cfg.tau_min * tf, cfg.tau_max * tf, cfg.tau_step * tf};
    si["filter_cutoff_rad_per_s"] = cfg.filter_cutoff * rf;
    j["resolved_si"] = si;
    if (normalization) j["results"] = {{"normalization", *normalization}};
    return j.dump(2) + "\n";
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // column-major
};

void write_table(const std::string& path, OutputFormat format, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    if (format == OutputFormat::csv) {
        for (size_t c = 0; c < table.columns.size(); ++c)
            out << (c ? "," : "") << table.columns[c];
        out << "\n";
        const size_t rows = table.data.empty() ? 0 : table.data[0].size();
        for (size_t r = 0; r < rows; ++r) {
            for (size_t c = 0; c < table.data.size(); ++c)
                out << (c ? "," : "") << fmt(table.data[c][r]);
            out << "\n";
        }
    } else {
        ordered_json j;
        for (size_t c = 0; c < table.columns.size(); ++c) j[table.columns[c]] = table.data[c];
        out << j.dump(2) << "\n";
    }
}

void write_sidecar(const ExperimentConfig& cfg, std::optional<double> normalization) {
    const std::string path = cfg.out_path + ".meta.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open sidecar file " + path);
    out << config_to_json(cfg, normalization);
}

std::vector<double> raw_tau_values(const ExperimentConfig& cfg, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = cfg.tau_min + i * cfg.tau_step;
    return out;
}

void run_pulsed_pair(const ExperimentConfig& cfg) {
    const PulseParams params = cfg.pulse_params();
    const TimeGrid grid = cfg.tau_grid();
    Table table;
    table.columns = {"tau_" + to_string(cfg.time_unit), "g2_cross", "g2_auto"};
    table.data.assign(3, std::vector<double>(grid.n));
    table.data[0] = raw_tau_values(cfg, grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const PortPair v = g2_pulsed_even(params, grid.point(i));
        table.data[1][i] = v.cross_corr;
        table.data[2][i] = v.auto_corr;
    }
    write_table(cfg.out_path, cfg.format, table);
    write_sidecar(cfg, std::nullopt);
}

void run_train(const ExperimentConfig& cfg) {
    const PulseTrainConfig train_cfg = cfg.train_config();
    const TimeGrid grid = cfg.tau_grid();
    TrainOptions options;
    options.threads = cfg.threads;
    if (cfg.has_filter) options.filter = make_filter(cfg.filter_spec(grid.dt));
    const TrainCorrelationResult result = g2_train(train_cfg, grid, options);
    Table table;
    table.columns = {"tau_" + to_string(cfg.time_unit), "g2_cross", "g2_auto",
                     "g2_cross_norm", "g2_auto_norm"};
    table.data.assign(5, std::vector<double>(grid.n));
    table.data[0] = raw_tau_values(cfg, grid.n);
    const ArrayXd cross = result.series_cross.real_values();
    const ArrayXd auto_v = result.series_auto.real_values();
    for (int i = 0; i < grid.n; ++i) {
        table.data[1][i] = cross[i] * result.normalization;
        table.data[2][i] = auto_v[i] * result.normalization;
        table.data[3][i] = cross[i];
        table.data[4][i] = auto_v[i];
    }
    write_table(cfg.out_path, cfg.format, table);
    write_sidecar(cfg, result.normalization);
}

void run_dip(const ExperimentConfig& cfg) {
    const PulseParams base = cfg.pulse_params();
    const bool temporal = cfg.sweep_parameter == SweepParameter::temporal_offset;
    std::vector<double> si_values(cfg.sweep_values.size());
    for (size_t i = 0; i < cfg.sweep_values.size(); ++i)
        si_values[i] = temporal ? cfg.time_si(cfg.sweep_values[i])
                                : cfg.rate_si(cfg.sweep_values[i]);
    const auto scan = hom_dip_scan(base, cfg.sweep_parameter, si_values);
    Table table;
    const std::string unit =
        temporal ? to_string(cfg.time_unit) : to_string(cfg.rate_unit);
    table.columns = {(temporal ? "offset_" : "delta_") + unit, "P_c"};
    table.data.assign(2, std::vector<double>(scan.size()));
    for (size_t i = 0; i < scan.size(); ++i) {
        table.data[0][i] = cfg.sweep_values[i];
        table.data[1][i] = scan[i].second;
    }
    write_table(cfg.out_path, cfg.format, table);
    write_sidecar(cfg, std::nullopt);
}

void run_continuous(const ExperimentConfig& cfg, bool polarized) {
    TlsParams p;
    p.gamma1 = cfg.rate_si(cfg.gamma1);
    p.gamma_p = cfg.rate_si(cfg.gamma_p);
    p.omega = Complex(cfg.rate_si(cfg.omega_re), cfg.rate_si(cfg.omega_im));
    p.pol_angle = cfg.phi;
    const double delta = cfg.rate_si(cfg.tls_delta);
    const TimeGrid grid = cfg.tau_grid();
    Table table;
    table.columns = {"tau_" + to_string(cfg.time_unit), "g2_cross", "g2_auto",
                     "g2_cross_norm", "g2_auto_norm"};
    table.data.assign(5, std::vector<double>(grid.n));
    table.data[0] = raw_tau_values(cfg, grid.n);
    std::vector<OutputCorrelation> values(grid.n);
    parallel_for(grid.n, cfg.threads, [&](int i) {
        const double tau = std::abs(grid.point(i));  // curves are even in tau
        values[i] = polarized ? g2_polarized_output(p, cfg.phi, tau)
                              : g2_continuous_output(p, p, delta, tau);
    });
    for (int i = 0; i < grid.n; ++i) {
        table.data[1][i] = values[i].cross_raw;
        table.data[2][i] = values[i].auto_raw;
        table.data[3][i] = values[i].cross_normalized;
        table.data[4][i] = values[i].auto_normalized;
    }
    write_table(cfg.out_path, cfg.format, table);
    write_sidecar(cfg, std::nullopt);
}

void run_verify(const ExperimentConfig& cfg) {
    const auto reports = oracle::run_verification();
    const std::string json = oracle::reports_to_json(reports);
    if (cfg.out_path.empty()) {
        std::cout << json << "\n";
    } else {
        std::ofstream out(cfg.out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot open output file " + cfg.out_path);
        out << json << "\n";
    }
    if (!oracle::all_passed(reports))
        throw VerificationFailure("oracle verification failed");
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.mode) {
        case RunMode::pulsed_pair: return run_pulsed_pair(cfg);
        case RunMode::train: return run_train(cfg);
        case RunMode::dip: return run_dip(cfg);
        case RunMode::continuous: return run_continuous(cfg, false);
        case RunMode::polarized: return run_continuous(cfg, true);
        case RunMode::verify: return run_verify(cfg);
    }
}

int run_experiment_cli(const ExperimentConfig& cfg, std::string& error_out) {
    try {
        run_experiment(cfg);
        return 0;
    } catch (const ConfigError& e) {
        error_out = e.what();
        return 2;
    } catch (const InvalidInput& e) {
        error_out = e.what();
        return 2;
    } catch (const VerificationFailure& e) {
        error_out = e.what();
        return 4;
    } catch (const NumericError& e) {
        error_out = e.what();
        return 3;
    } catch (const std::exception& e) {
        error_out = e.what();
        return 3;
    }
}

}  // namespace homsim
