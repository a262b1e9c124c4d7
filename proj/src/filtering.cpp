#include "homsim/filtering.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace homsim {

FilterKernel make_filter(const FilterSpec& spec) {
    FilterKernel k;
    k.sample_dt = spec.sample_dt;
    switch (spec.kind) {
        case FilterKind::identity: {
            k.taps = ArrayXd::Ones(1);
            k.center = 0;
            break;
        }
        case FilterKind::square_window: {
            if (spec.taps < 1) throw InvalidInput("make_filter: taps must be >= 1");
            k.taps = ArrayXd::Constant(spec.taps, 1.0 / spec.taps);
            k.center = (spec.taps - 1) / 2;
            break;
        }
        case FilterKind::windowed_lowpass: {
            if (!(spec.cutoff > 0.0))
                throw InvalidInput("make_filter: lowpass cutoff must be > 0");
            if (!(spec.sample_dt > 0.0))
                throw InvalidInput("make_filter: lowpass needs sample_dt > 0");
            const int taps = spec.taps | 1;  // force odd for a symmetric kernel
            const int c = (taps - 1) / 2;
            ArrayXd h(taps);
            for (int j = 0; j < taps; ++j) {
                const int x = j - c;
                // windowed-sinc low-pass, Hamming window
                const double ideal =
                    x == 0 ? spec.cutoff * spec.sample_dt / M_PI
                           : std::sin(spec.cutoff * x * spec.sample_dt) / (M_PI * x);
                const double window =
                    taps == 1 ? 1.0
                              : 0.54 - 0.46 * std::cos(2.0 * M_PI * j / (taps - 1));
                h[j] = ideal * window;
            }
            h /= h.sum();  // unit DC gain
            k.taps = std::move(h);
            k.center = c;
            break;
        }
        case FilterKind::fir_coefficients: {
            if (spec.coefficients.empty())
                throw InvalidInput("make_filter: fir_coefficients needs coefficients");
            k.taps = Eigen::Map<const ArrayXd>(spec.coefficients.data(),
                                               static_cast<int>(spec.coefficients.size()));
            if (!k.taps.isFinite().all())
                throw InvalidInput("make_filter: coefficients must be finite");
            k.center = 0;  // causal as loaded
            break;
        }
    }
    k.dc_gain = k.taps.sum();
    return k;
}

Complex filter_response(const FilterKernel& kernel, double omega) {
    Complex h{};
    for (int j = 0; j < kernel.taps.size(); ++j)
        h += kernel.taps[j] * std::polar(1.0, -omega * (j - kernel.center) * kernel.sample_dt);
    return h;
}

SampledMode filter_mode(const SampledMode& mode, const FilterKernel& kernel) {
    if (kernel.sample_dt > 0.0 &&
        std::abs(kernel.sample_dt - mode.grid.dt) > 1e-12 * mode.grid.dt)
        throw InvalidInput("filter_mode: kernel sample_dt does not match mode grid dt");
    const int nt = static_cast<int>(kernel.taps.size());
    if (nt == 1 && kernel.taps[0] == 1.0 && kernel.center == 0) return mode;
    const int n_out = mode.grid.n + nt - 1;
    ArrayXcd out = ArrayXcd::Zero(n_out);
    for (int j = 0; j < nt; ++j)
        out.segment(j, mode.grid.n) += kernel.taps[j] * mode.samples;
    TimeGrid grid(mode.grid.t0 - kernel.center * mode.grid.dt, mode.grid.dt, n_out);
    return SampledMode(grid, std::move(out));
}

FilterSpec load_fir_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("load_fir_file: cannot open " + path);
    FilterSpec spec;
    spec.kind = FilterKind::fir_coefficients;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# dt=", 0) != 0)
        throw InvalidInput("load_fir_file: first line must be '# dt=<seconds>'");
    spec.sample_dt = std::stod(line.substr(5));
    if (!(spec.sample_dt > 0.0)) throw InvalidInput("load_fir_file: dt must be > 0");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        try {
            size_t used = 0;
            const double c = std::stod(line, &used);
            spec.coefficients.push_back(c);
        } catch (const std::exception&) {
            throw InvalidInput("load_fir_file: bad coefficient at line " +
                               std::to_string(line_no));
        }
    }
    if (spec.coefficients.empty()) throw InvalidInput("load_fir_file: no coefficients");
    spec.taps = static_cast<int>(spec.coefficients.size());
    return spec;
}

void save_fir_file(const std::string& path, const FilterKernel& kernel) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("save_fir_file: cannot open " + path);
    out.precision(17);
    out << "# dt=" << kernel.sample_dt << "\n";
    for (int j = 0; j < kernel.taps.size(); ++j) out << kernel.taps[j] << "\n";
}

}  // namespace homsim
