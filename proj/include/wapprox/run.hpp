#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <string>
#include <vector>

#include "wapprox/config.hpp"
#include "wapprox/verify.hpp"
#include "wapprox/weight_class.hpp"

namespace wapprox {

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << text;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

}  // namespace detail

struct RunResult {
    int exit_code = 0;
    std::map<std::string, bool> suite_pass;
};

/// Runs the configured verification suites, one VerdictReport per suite,
/// written as <suite>.json and <suite>.csv under output_dir. Suites execute
/// concurrently (they are pure up to the shared memoized solver); writes
/// happen serially afterwards in name order.
inline RunResult run_verify(const ExperimentConfig& cfg,
                            const std::vector<std::string>& only = {}) {
    cfg.validate(true);
    std::vector<std::string> selected;
    for (const auto& s : cfg.suites) {
        if (only.empty() || std::find(only.begin(), only.end(), s) != only.end())
            selected.push_back(s);
    }
    if (!only.empty())
        for (const auto& s : only)
            if (std::find(cfg.suites.begin(), cfg.suites.end(), s) == cfg.suites.end())
                throw ConfigError("suite '" + s + "' not in config suites");
    if (selected.empty()) throw ConfigError("no suites selected");

    const Weight w = cfg.make_weight();
    const ZSet Z = cfg.make_zset();
    const TargetFunction f = cfg.make_target();

    VerifyContext ctx;
    ctx.grids.h_grid = cfg.h_grid;
    ctx.grids.x_grid = cfg.x_grid;
    ctx.grids.approx_mult = cfg.approx_grid;
    ctx.threshold = cfg.threshold;
    ctx.seed = cfg.seed;

    const auto dispatch = [&](const std::string& name) -> VerdictReport {
        if (name == "jackson") return verify_jackson(f, w, Z, cfg.r, cfg.B, cfg.n_ladder, ctx);
        if (name == "inverse")
            return verify_inverse(f, w, Z, cfg.r, cfg.A, cfg.B, cfg.n_ladder, ctx);
        if (name == "realization")
            return verify_realization(f, w, Z, cfg.r, cfg.A, cfg.B, cfg.c1, cfg.c2, cfg.n_ladder,
                                      ctx);
        if (name == "polynomial_inequalities")
            return verify_polynomial_inequalities(w, Z, cfg.n_ladder, cfg.trials, cfg.seed, ctx);
        if (name == "modulus_properties")
            return verify_modulus_properties(f, w, Z, cfg.r, ctx, cfg.A, cfg.B);
        if (name == "near_best_extension") {
            std::vector<std::pair<Interval, Interval>> pairs;
            for (double z : Z.points()) {
                const auto around = make_shrinking_pairs(z, 6);
                pairs.insert(pairs.end(), around.begin(), around.end());
            }
            return verify_near_best_extension(f, w, cfg.r, pairs, ctx);
        }
        if (name == "mt_sandwich") {
            std::vector<double> ts;
            for (int n : cfg.n_ladder)
                if (n >= 1) ts.push_back(1.0 / n);
            return verify_mt_sandwich(f, w, Z, cfg.r, ts, ctx);
        }
        throw ConfigError("unknown suite '" + name + "'");
    };

    std::vector<std::future<VerdictReport>> futures;
    futures.reserve(selected.size());
    for (const auto& name : selected)
        futures.push_back(std::async(std::launch::async, dispatch, name));

    std::filesystem::create_directories(cfg.output_dir);
    RunResult res;
    nlohmann::json summary;
    summary["config"] = {{"function", f.description},
                         {"weight", w.to_json()},
                         {"r", cfg.r},
                         {"seed", cfg.seed}};
    for (std::size_t i = 0; i < selected.size(); ++i) {
        VerdictReport rep = futures[i].get();
        const std::filesystem::path base = std::filesystem::path(cfg.output_dir) / selected[i];
        detail::write_json_file(base.string() + ".json", rep.to_json());
        detail::write_text(base.string() + ".csv", rep.to_csv());
        res.suite_pass[selected[i]] = rep.pass;
        summary["suites"][selected[i]] = rep.pass;
        std::printf("%-26s %s  (rows=%zu, max_ratio=%.4g, median_ratio=%.4g)\n",
                    selected[i].c_str(), rep.pass ? "PASS" : "FAIL", rep.rows.size(),
                    rep.max_ratio, rep.median_ratio);
        if (!rep.pass) res.exit_code = 1;
    }
    summary["all_pass"] = res.exit_code == 0;
    detail::write_json_file(std::filesystem::path(cfg.output_dir) / "summary.json", summary);
    return res;
}

/// Doubling/A* ladder plus the W* sweep; writes weight_class.{json,csv} and
/// wstar.csv.
inline RunResult run_check_weight(const ExperimentConfig& cfg) {
    cfg.validate(false);
    const Weight w = cfg.make_weight();
    const ZSet Z = cfg.make_zset();
    const WeightClassReport rep = classify_weight(w, cfg.resolutions);

    std::string csv = "resolution,doubling,kappa,astar,flag\n";
    for (std::size_t i = 0; i < rep.resolutions.size(); ++i) {
        csv += std::to_string(rep.resolutions[i]) + "," + format_double(rep.doubling[i]) + "," +
               format_double(rep.kappa[i]) + "," + format_double(rep.astar[i]) + "," +
               (rep.diverging() ? "diverging" : "") + "\n";
    }

    nlohmann::json j = rep.to_json();
    j["weight"] = w.to_json();
    std::string wstar_csv = "n,c_star,flag\n";
    nlohmann::json sweep = nlohmann::json::array();
    double cmin = 1.0, cmax = 0.0;
    for (int n : cfg.n_ladder) {
        const auto ws = check_wstar_condition(w, Z, n, cfg.A, cfg.B, 256);
        wstar_csv += std::to_string(n) + "," + format_double(ws.c_star) + "," +
                     (ws.vacuous ? "vacuous" : "") + "\n";
        sweep.push_back({{"n", n}, {"c_star", ws.c_star}, {"vacuous", ws.vacuous}});
        if (!ws.vacuous) {
            cmin = std::min(cmin, ws.c_star);
            cmax = std::max(cmax, ws.c_star);
        }
    }
    const bool wstar_pass = cmax > 0.0 && cmin >= 1e-6 && cmin >= 0.5 * cmax;
    j["wstar"] = {{"sweep", sweep}, {"pass", wstar_pass}};

    std::filesystem::create_directories(cfg.output_dir);
    detail::write_json_file(std::filesystem::path(cfg.output_dir) / "weight_class.json", j);
    detail::write_text(std::filesystem::path(cfg.output_dir) / "weight_class.csv", csv);
    detail::write_text(std::filesystem::path(cfg.output_dir) / "wstar.csv", wstar_csv);
    std::printf("doubling=%.6g kappa=%.6g astar=%.6g diverging=%s wstar=%s\n",
                rep.doubling_estimate(), rep.kappa.back(), rep.astar_estimate(),
                rep.diverging() ? "yes" : "no", wstar_pass ? "stable" : "collapsing");
    return {};
}

/// Minimax ladder for the configured function/weight; writes approx.{json,csv}.
inline RunResult run_approx(const ExperimentConfig& cfg) {
    cfg.validate(false);
    const Weight w = cfg.make_weight();
    const TargetFunction f = cfg.make_target();
    std::string csv = "n,error,iterations,alternations,used_lp\n";
    nlohmann::json rows = nlohmann::json::array();
    for (int n : cfg.n_ladder) {
        const auto mm = best_weighted_approx(f, w, {kDomainLo, kDomainHi}, n, cfg.approx_grid * n);
        csv += std::to_string(n) + "," + format_double(mm.error) + "," +
               std::to_string(mm.iterations) + "," + std::to_string(mm.alternations) + "," +
               (mm.used_lp ? "1" : "0") + "\n";
        nlohmann::json extrema = nlohmann::json::array();
        for (const auto& [x, rv] : mm.residual_extrema) extrema.push_back({{"x", x}, {"residual", rv}});
        rows.push_back({{"n", n},
                        {"error", mm.error},
                        {"iterations", mm.iterations},
                        {"alternations", mm.alternations},
                        {"grid_size", mm.grid_size},
                        {"used_lp", mm.used_lp},
                        {"poly", mm.poly.to_json()},
                        {"residual_extrema", extrema}});
        std::printf("n=%3d  E=%.10g  alternations=%d%s\n", n, mm.error, mm.alternations,
                    mm.used_lp ? " (lp)" : "");
    }
    std::filesystem::create_directories(cfg.output_dir);
    detail::write_json_file(std::filesystem::path(cfg.output_dir) / "approx.json",
                            nlohmann::json{{"function", f.description},
                                           {"weight", w.to_json()},
                                           {"rows", rows}});
    detail::write_text(std::filesystem::path(cfg.output_dir) / "approx.csv", csv);
    return {};
}

/// Modulus ladder at t = 1/n; writes modulus.{json,csv}. The composite
/// (per-gap) modulus column is filled when the zset has its layout.
inline RunResult run_modulus(const ExperimentConfig& cfg) {
    cfg.validate(false);
    const Weight w = cfg.make_weight();
    const ZSet Z = cfg.make_zset();
    const TargetFunction f = cfg.make_target();
    const bool star_ok = Z.size() >= 3 && std::abs(Z[0] + 1.0) <= 1e-14 &&
                         std::abs(Z[Z.size() - 1] - 1.0) <= 1e-14;

    const auto xg = cheb_x_grid(cfg.x_grid);
    std::string csv = "t,main_part,complete,dt,mt_star,excluded\n";
    nlohmann::json rows = nlohmann::json::array();
    for (int n : cfg.n_ladder) {
        const double t = 1.0 / n;
        const auto h = geometric_h_grid(t, cfg.h_grid);
        const auto main = main_part_modulus(f, w, Z, cfg.r, cfg.A, h, xg);
        const auto comp =
            complete_modulus(f, w, Z, cfg.r, cfg.A, cfg.B, t, h, xg, cfg.approx_grid);
        const auto dt = dt_modulus(f, w, cfg.r, t, cfg.h_grid, cfg.x_grid);
        double star = 0.0;
        if (star_ok) star = mt_modulus(f, w, Z, cfg.r, t, h, xg, cfg.approx_grid).value;
        csv += format_double(t) + "," + format_double(main.value) + "," +
               format_double(comp.value) + "," + format_double(dt.value) + "," +
               (star_ok ? format_double(star) : std::string{}) + "," +
               std::to_string(main.excluded_stencils) + "\n";
        rows.push_back({{"t", t},
                        {"main_part", main.to_json()},
                        {"complete", comp.to_json()},
                        {"dt", dt.to_json()},
                        {"mt_star", star_ok ? nlohmann::json(star) : nlohmann::json()}});
        std::printf("t=%-10.6g main=%.8g complete=%.8g dt=%.8g\n", t, main.value, comp.value,
                    dt.value);
    }
    std::filesystem::create_directories(cfg.output_dir);
    detail::write_json_file(std::filesystem::path(cfg.output_dir) / "modulus.json",
                            nlohmann::json{{"function", f.description},
                                           {"weight", w.to_json()},
                                           {"zset", Z.points()},
                                           {"rows", rows}});
    detail::write_text(std::filesystem::path(cfg.output_dir) / "modulus.csv", csv);
    return {};
}

}  // namespace wapprox
