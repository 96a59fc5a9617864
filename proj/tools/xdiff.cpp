#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "xdiff/experiments.hpp"
#include "xdiff/io.hpp"
#include "xdiff/steady.hpp"

using namespace xdiff;

namespace {

std::vector<RefinementLevel> parse_levels(const std::string& arg) {
    // "nx:dt,nx:dt,..."
    std::vector<RefinementLevel> levels;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--levels", "expected nx:dt pairs separated by commas");
        RefinementLevel lvl;
        lvl.nx = std::stoi(item.substr(0, colon));
        lvl.dt = std::stod(item.substr(colon + 1));
        levels.push_back(lvl);
    }
    return levels;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xdiff: cross-diffusion chemotaxis laboratory"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, levels_arg;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto* run_cmd = app.add_subcommand("run", "run a config, optionally through a preset");
    run_cmd->add_option("config", config_path, "run configuration file")->required();
    run_cmd->add_option("--preset", preset, "lyapunov | mass-mean | pattern | logistic");
    run_cmd->add_option("--out", out_dir, "output directory override");
    run_cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* refine_cmd = app.add_subcommand("refine", "refinement study over (h, dt) levels");
    refine_cmd->add_option("config", config_path, "run configuration file")->required();
    refine_cmd->add_option("--levels", levels_arg, "comma-separated nx:dt pairs (>= 3)")
        ->required();
    refine_cmd->add_option("--out", out_dir, "output directory override");

    double d = 0.05, k = 2.0, lx = 1.0;
    int nx = 256;
    bool find_d0 = false;
    std::string strategy = "spike";
    auto* steady_cmd = app.add_subcommand("steady", "construct a nonconstant steady pair");
    steady_cmd->add_option("--d", d, "diffusion parameter of the scalar profile")->required();
    steady_cmd->add_option("--k", k, "exponent (> 1)")->required();
    steady_cmd->add_option("--nx", nx, "cells on the reference interval");
    steady_cmd->add_option("--lx", lx, "reference interval length");
    steady_cmd->add_option("--out", out_dir, "output directory");
    steady_cmd->add_option("--strategy", strategy, "spike | relax");
    steady_cmd->add_flag("--find-d0", find_d0, "bisect the existence threshold d0");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            RunConfig cfg = parse_config_file(config_path);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (seed_set) cfg.seed = seed;
            const ExperimentReport rep =
                preset.empty() ? run_plain(cfg) : run_experiment(preset, cfg);
            std::cout << rep.to_text();
            return rep.all_pass() ? 0 : 1;
        }
        if (refine_cmd->parsed()) {
            RunConfig cfg = parse_config_file(config_path);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            const RefinementTable table = refinement_study(cfg, parse_levels(levels_arg));
            std::cout << table.to_text();
            std::filesystem::create_directories(cfg.out_dir);
            std::ofstream(std::filesystem::path(cfg.out_dir) / "refinement.txt")
                << table.to_text();
            return 0;
        }
        // steady
        const Grid grid = Grid::line(lx, nx);
        SteadyOptions opts;
        const SteadyInit init =
            strategy == "relax" ? SteadyInit::ParabolicRelax : SteadyInit::SpikeAnsatz;
        Field w = solve_scalar_steady(grid, d, k, init, nullptr, opts);
        if (oscillation(w) <= 1e-2) {
            opts.spike_at_center = true;
            w = solve_scalar_steady(grid, d, k, init, nullptr, opts);
        }
        const SteadyProfile prof = scale_to_pattern(w, d, k);
        const auto [r1, r2] = verify_steady(prof, MotilitySpec::power(k));
        std::cout << "oscillation(w) = " << format_double(oscillation(w)) << "\n"
                  << "scaled domain  = (0, " << format_double(prof.scaled_grid.lx) << ")\n"
                  << "r1 = " << format_double(r1) << "  r2 = " << format_double(r2) << "\n";
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            const std::filesystem::path dir(out_dir);
            write_snapshot(prof.w, 0.0, (dir / "w.snap").string());
            write_snapshot(prof.u, 0.0, (dir / "u.snap").string());
            write_snapshot(prof.v, 0.0, (dir / "v.snap").string());
            write_pgm(prof.v, (dir / "v.pgm").string());
        }
        if (find_d0) {
            const PatternThreshold th = find_pattern_threshold(grid, k, d, 1.0);
            std::cout << "d0 = " << format_double(th.d0) << " (" << th.bisections
                      << " bisections)\n";
        }
        if (oscillation(w) <= 1e-2) {
            std::cout << "profile is constant; retry with smaller d or a stronger spike\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
