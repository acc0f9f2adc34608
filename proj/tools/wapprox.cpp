// wapprox: batch front-end for weighted polynomial approximation experiments.
// Subcommands: check-weight, approx, modulus, verify. Exit codes: 0 pass,
// 1 suite failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wapprox/config.hpp"
#include "wapprox/run.hpp"

namespace {

wapprox::ExperimentConfig load_config(const std::string& path, int grid_scale,
                                      const std::string& out_override, std::uint64_t seed,
                                      bool seed_set) {
    std::ifstream in(path);
    if (!in) throw wapprox::ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw wapprox::ConfigError(std::string("config parse error: ") + e.what());
    }
    auto cfg = wapprox::ExperimentConfig::from_json(j);
    if (grid_scale > 1) cfg.apply_grid_scale(grid_scale);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (seed_set) cfg.seed = seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted uniform polynomial approximation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int grid_scale = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> only_suites;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--grid-scale", grid_scale, "multiply all grid sizes")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) { seed_set = true; });
    };

    CLI::App* check = app.add_subcommand("check-weight", "doubling/A*/W* classification");
    add_common(check);
    CLI::App* approx = app.add_subcommand("approx", "weighted minimax ladder");
    add_common(approx);
    CLI::App* modulus = app.add_subcommand("modulus", "moduli of smoothness ladder");
    add_common(modulus);
    CLI::App* verify = app.add_subcommand("verify", "run verification suites");
    add_common(verify);
    verify->add_option("--suite", only_suites, "restrict to named suites (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = load_config(config_path, grid_scale, out_dir, seed, seed_set);
        wapprox::RunResult res;
        if (check->parsed()) res = wapprox::run_check_weight(cfg);
        if (approx->parsed()) res = wapprox::run_approx(cfg);
        if (modulus->parsed()) res = wapprox::run_modulus(cfg);
        if (verify->parsed()) res = wapprox::run_verify(cfg, only_suites);
        return res.exit_code;
    } catch (const wapprox::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
