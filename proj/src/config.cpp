#include "xdiff/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "xdiff/io.hpp"
#include "xdiff/rng.hpp"
#include "xdiff/steady.hpp"

namespace xdiff {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
    std::size_t used = 0;
    double x;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + v + "'", line);
    }
    if (used != v.size()) throw ConfigError("trailing junk after number '" + v + "'", line);
    return x;
}

int parse_int(const std::string& v, int line) {
    const double x = parse_double(v, line);
    if (x != std::floor(x)) throw ConfigError("expected an integer, got '" + v + "'", line);
    return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const std::uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("expected an unsigned integer, got '" + v + "'", line);
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("expected true or false, got '" + v + "'", line);
}

void validate(const RunConfig& c, int line = 0) {
    auto fail = [line](const std::string& msg) { throw ConfigError(msg, line); };
    if (c.dim != 1 && c.dim != 2) fail("dim must be 1 or 2");
    if (c.nx < 3) fail("nx must be >= 3");
    if (c.dim == 2 && c.ny < 3) fail("ny must be >= 3 in 2D");
    if (!(c.lx > 0)) fail("lx must be > 0");
    if (!(c.epsilon > 0)) fail("epsilon must be > 0");
    if (c.motility != "prototype" && c.motility != "power" && c.motility != "exponential")
        fail("motility must be prototype, power or exponential");
    if (c.motility != "exponential" && !(c.k > 0)) fail("k must be > 0");
    if (c.mollify_eta < 0 || c.mollify_eta >= 1) fail("mollify_eta must lie in [0,1)");
    if (c.growth != "none" && c.growth != "logistic") fail("growth must be none or logistic");
    if (c.growth == "logistic") {
        if (!(c.h0 > 0)) fail("h0 must be > 0");
        if (!(c.l >= 1)) fail("l must be >= 1");
    }
    if (c.source_eta < 0) fail("source_eta must be >= 0");
    if (!(c.cfl_safety > 0 && c.cfl_safety <= 1)) fail("cfl_safety must lie in (0,1]");
    if (!(c.dt_min > 0)) fail("dt_min must be > 0");
    if (c.fixed_dt < 0) fail("fixed_dt must be >= 0");
    if (c.initial != "perturbed_constant" && c.initial != "file" && c.initial != "steady_pattern")
        fail("initial must be perturbed_constant, file or steady_pattern");
    if (c.initial == "perturbed_constant") {
        if (!(c.mean_u > 0)) fail("mean_u must be > 0");
        if (!(c.mean_v > 0)) fail("mean_v must be > 0");
    }
    if (c.amplitude < 0 || c.amplitude >= 1) fail("amplitude must lie in [0,1)");
    if (c.initial == "steady_pattern") {
        if (!(c.pattern_d > 0)) fail("pattern_d must be > 0");
        if (!(c.pattern_k > 1)) fail("pattern_k must be > 1");
    }
    if (c.t_end < 0) fail("t_end must be >= 0");
    if (c.observer_stride < 1) fail("observer_stride must be >= 1");
    if (c.snapshot_count < 0) fail("snapshot_count must be >= 0");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string raw, section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "domain" && section != "model" && section != "initial" &&
                section != "time" && section != "output")
                throw ConfigError("unknown section [" + section + "]", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError("key outside any [section]", line_no);

        auto unknown = [&]() { throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no); };
        if (section == "domain") {
            if (key == "dim") c.dim = parse_int(val, line_no);
            else if (key == "lx") c.lx = parse_double(val, line_no);
            else if (key == "nx") c.nx = parse_int(val, line_no);
            else if (key == "ny") c.ny = parse_int(val, line_no);
            else unknown();
        } else if (section == "model") {
            if (key == "epsilon") c.epsilon = parse_double(val, line_no);
            else if (key == "motility") c.motility = val;
            else if (key == "k") c.k = parse_double(val, line_no);
            else if (key == "mollify_eta") c.mollify_eta = parse_double(val, line_no);
            else if (key == "growth") c.growth = val;
            else if (key == "h0") c.h0 = parse_double(val, line_no);
            else if (key == "l") c.l = parse_double(val, line_no);
            else if (key == "source_eta") c.source_eta = parse_double(val, line_no);
            else if (key == "cfl_safety") c.cfl_safety = parse_double(val, line_no);
            else if (key == "dt_min") c.dt_min = parse_double(val, line_no);
            else if (key == "fixed_dt") c.fixed_dt = parse_double(val, line_no);
            else unknown();
        } else if (section == "initial") {
            if (key == "kind") c.initial = val;
            else if (key == "mean_u") c.mean_u = parse_double(val, line_no);
            else if (key == "mean_v") c.mean_v = parse_double(val, line_no);
            else if (key == "amplitude") c.amplitude = parse_double(val, line_no);
            else if (key == "file_u") c.file_u = val;
            else if (key == "file_v") c.file_v = val;
            else if (key == "pattern_d") c.pattern_d = parse_double(val, line_no);
            else if (key == "pattern_k") c.pattern_k = parse_double(val, line_no);
            else if (key == "seed") c.seed = parse_u64(val, line_no);
            else unknown();
        } else if (section == "time") {
            if (key == "t_end") c.t_end = parse_double(val, line_no);
            else if (key == "observer_stride") c.observer_stride = parse_int(val, line_no);
            else if (key == "snapshot_count") c.snapshot_count = parse_int(val, line_no);
            else unknown();
        } else {  // output
            if (key == "dir") c.out_dir = val;
            else if (key == "csv") c.write_csv = parse_bool(val, line_no);
            else if (key == "snapshots") c.write_snapshots = parse_bool(val, line_no);
            else if (key == "heatmaps") c.write_heatmaps = parse_bool(val, line_no);
            else unknown();
        }
        validate(c, line_no);
    }
    validate(c);
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render_config(const RunConfig& c) {
    std::ostringstream o;
    auto d = [](double x) { return format_double(x); };
    o << "[domain]\n";
    o << "dim = " << c.dim << "\n";
    o << "lx = " << d(c.lx) << "\n";
    o << "nx = " << c.nx << "\n";
    if (c.dim == 2) o << "ny = " << c.ny << "\n";
    o << "\n[model]\n";
    o << "epsilon = " << d(c.epsilon) << "\n";
    o << "motility = " << c.motility << "\n";
    o << "k = " << d(c.k) << "\n";
    o << "mollify_eta = " << d(c.mollify_eta) << "\n";
    o << "growth = " << c.growth << "\n";
    if (c.growth == "logistic") {
        o << "h0 = " << d(c.h0) << "\n";
        o << "l = " << d(c.l) << "\n";
    }
    o << "source_eta = " << d(c.source_eta) << "\n";
    o << "cfl_safety = " << d(c.cfl_safety) << "\n";
    o << "dt_min = " << d(c.dt_min) << "\n";
    o << "fixed_dt = " << d(c.fixed_dt) << "\n";
    o << "\n[initial]\n";
    o << "kind = " << c.initial << "\n";
    o << "mean_u = " << d(c.mean_u) << "\n";
    o << "mean_v = " << d(c.mean_v) << "\n";
    o << "amplitude = " << d(c.amplitude) << "\n";
    if (!c.file_u.empty()) o << "file_u = " << c.file_u << "\n";
    if (!c.file_v.empty()) o << "file_v = " << c.file_v << "\n";
    o << "pattern_d = " << d(c.pattern_d) << "\n";
    o << "pattern_k = " << d(c.pattern_k) << "\n";
    o << "seed = " << c.seed << "\n";
    o << "\n[time]\n";
    o << "t_end = " << d(c.t_end) << "\n";
    o << "observer_stride = " << c.observer_stride << "\n";
    o << "snapshot_count = " << c.snapshot_count << "\n";
    o << "\n[output]\n";
    o << "dir = " << c.out_dir << "\n";
    o << "csv = " << (c.write_csv ? "true" : "false") << "\n";
    o << "snapshots = " << (c.write_snapshots ? "true" : "false") << "\n";
    o << "heatmaps = " << (c.write_heatmaps ? "true" : "false") << "\n";
    return o.str();
}

RunSetup build_setup(const RunConfig& c) {
    validate(c);
    RunSetup s;

    MotilitySpec base = c.motility == "prototype" ? MotilitySpec::prototype(c.k)
                        : c.motility == "power"   ? MotilitySpec::power(c.k)
                                                  : MotilitySpec::exponential();
    s.params.motility = c.mollify_eta > 0 ? Motility(mollify(base, c.mollify_eta))
                                          : Motility(base);
    s.params.epsilon = c.epsilon;
    s.params.growth = c.growth == "logistic" ? GrowthSpec::logistic_power(c.h0, c.l)
                                             : GrowthSpec::none();
    s.params.source_eta = c.source_eta;
    s.params.cfl_safety = c.cfl_safety;
    s.params.dt_min = c.dt_min;
    if (c.fixed_dt > 0) s.params.fixed_dt = c.fixed_dt;

    const CounterRng rng{c.seed};
    const CounterRng rng_u = rng.split(0), rng_v = rng.split(1);

    if (c.initial == "steady_pattern") {
        // Reference profile on (0,lx), then the scaled domain replaces the
        // configured extent.
        const Grid ref = c.dim == 1 ? Grid::line(c.lx, c.nx) : Grid::rect(c.lx, c.nx, c.ny);
        Field w;
        bool found = false;
        for (bool center : {false, true}) {
            SteadyOptions opts;
            opts.spike_at_center = center;
            try {
                w = solve_scalar_steady(ref, c.pattern_d, c.pattern_k, SteadyInit::SpikeAnsatz,
                                        nullptr, opts);
                if (oscillation(w) > 1e-2) {
                    found = true;
                    break;
                }
            } catch (const IterationError&) {
            }
        }
        if (!found)
            throw Error("steady_pattern initial data: no nonconstant profile at d=" +
                        std::to_string(c.pattern_d));
        const SteadyProfile prof = scale_to_pattern(w, c.pattern_d, c.pattern_k);
        s.grid = prof.scaled_grid;
        s.initial.t = 0.0;
        s.initial.u = prof.u;
        s.initial.v = prof.v;
        for (int i = 0; i < s.initial.u.size(); ++i) {
            s.initial.u.v[i] += c.amplitude * (2.0 * rng_u.uniform(i) - 1.0);
            s.initial.v.v[i] += c.amplitude * (2.0 * rng_v.uniform(i) - 1.0);
        }
    } else if (c.initial == "file") {
        auto [u, tu] = read_snapshot(c.file_u);
        auto [v, tv] = read_snapshot(c.file_v);
        if (!(u.grid == v.grid)) throw StructuralError("initial snapshots disagree on the grid");
        s.grid = u.grid;
        s.initial = State{tu, std::move(u), std::move(v)};
        (void)tv;
    } else {
        s.grid = c.dim == 1 ? Grid::line(c.lx, c.nx) : Grid::rect(c.lx, c.nx, c.ny);
        s.initial.t = 0.0;
        s.initial.u = Field(s.grid);
        s.initial.v = Field(s.grid);
        for (int i = 0; i < s.grid.cells(); ++i) {
            s.initial.u.v[i] = c.mean_u * (1.0 + c.amplitude * (2.0 * rng_u.uniform(i) - 1.0));
            s.initial.v.v[i] = c.mean_v * (1.0 + c.amplitude * (2.0 * rng_v.uniform(i) - 1.0));
        }
    }

    s.opts.t_end = s.initial.t + c.t_end;
    s.opts.observer_stride = c.observer_stride;
    s.opts.snapshot_count = c.snapshot_count;
    return s;
}

}  // namespace xdiff
