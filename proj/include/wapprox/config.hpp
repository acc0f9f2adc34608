#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wapprox/geometry.hpp"
#include "wapprox/target.hpp"
#include "wapprox/weight.hpp"

namespace wapprox {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::set<std::string>& known_suites() {
    static const std::set<std::string> s{"jackson",
                                         "inverse",
                                         "realization",
                                         "polynomial_inequalities",
                                         "modulus_properties",
                                         "near_best_extension",
                                         "mt_sandwich"};
    return s;
}

struct ExperimentConfig {
    nlohmann::json weight_spec;
    std::string function_name;
    nlohmann::json function_params;
    std::vector<double> zset;
    int r = 2;
    double A = 1.0;
    double B = 1.0;
    double c1 = 1.0;
    double c2 = 2.0;
    std::vector<int> n_ladder{4, 8, 16, 32, 64};
    int h_grid = 16;
    int x_grid = 257;
    int approx_grid = 8;
    std::vector<int> resolutions{128, 256, 512};
    int trials = 20;
    std::vector<std::string> suites;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    double threshold = 10.0;

    [[nodiscard]] Weight make_weight() const { return Weight::from_json(weight_spec); }
    [[nodiscard]] ZSet make_zset() const { return ZSet(zset); }
    [[nodiscard]] TargetFunction make_target() const {
        return make_function(function_name, function_params);
    }

    void apply_grid_scale(int k) {
        if (k < 1) throw ConfigError("grid scale must be >= 1");
        h_grid *= k;
        x_grid = k * (x_grid - 1) + 1;
        approx_grid *= k;
    }

    static ExperimentConfig from_json(const nlohmann::json& j) {
        ExperimentConfig c;
        try {
            if (!j.contains("weight")) throw ConfigError("config: missing 'weight'");
            c.weight_spec = j.at("weight");
            if (j.contains("function")) {
                const auto& fj = j.at("function");
                c.function_name = fj.at("name").get<std::string>();
                c.function_params = fj;
            } else {
                throw ConfigError("config: missing 'function'");
            }
            c.zset = j.value("zset", std::vector<double>{-1.0, 1.0});
            c.r = j.value("r", 2);
            c.A = j.value("A", 1.0);
            c.B = j.value("B", 1.0);
            c.c1 = j.value("c1", 1.0);
            c.c2 = j.value("c2", 2.0);
            c.n_ladder = j.value("n_ladder", std::vector<int>{4, 8, 16, 32, 64});
            if (j.contains("grids")) {
                const auto& g = j.at("grids");
                c.h_grid = g.value("h_grid", c.h_grid);
                c.x_grid = g.value("x_grid", c.x_grid);
                c.approx_grid = g.value("approx_grid", c.approx_grid);
            }
            c.resolutions = j.value("resolutions", c.resolutions);
            c.trials = j.value("trials", 20);
            c.suites = j.value("suites", std::vector<std::string>{});
            c.seed = j.value("seed", std::uint64_t{1});
            c.output_dir = j.value("output_dir", std::string{"out"});
            c.threshold = j.value("threshold", 10.0);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        return c;
    }

    /// Throws ConfigError on any structural problem; also exercises the
    /// weight/function/zset constructors so registry names are resolved now.
    void validate(bool needs_suites) const {
        if (needs_suites && suites.empty())
            throw ConfigError("config: 'suites' must be a nonempty list");
        for (const auto& s : suites) {
            if (!known_suites().count(s)) {
                std::string msg = "config: unknown suite '" + s + "' (known:";
                for (const auto& k : known_suites()) msg += " " + k;
                throw ConfigError(msg + ")");
            }
        }
        if (n_ladder.empty()) throw ConfigError("config: 'n_ladder' must be nonempty");
        for (std::size_t i = 0; i < n_ladder.size(); ++i) {
            if (n_ladder[i] < 1) throw ConfigError("config: n_ladder entries must be >= 1");
            if (i > 0 && n_ladder[i] <= n_ladder[i - 1])
                throw ConfigError("config: n_ladder must be strictly increasing");
        }
        if (r < 1 || r > 8) throw ConfigError("config: r must be in 1..8");
        if (A <= 0.0 || B <= 0.0) throw ConfigError("config: A and B must be positive");
        if (!(c2 >= c1 && c1 > 0.0)) throw ConfigError("config: need c2 >= c1 > 0");
        if (h_grid < 2 || x_grid < 17 || approx_grid < 1)
            throw ConfigError("config: grids too small");
        if (trials < 1) throw ConfigError("config: trials >= 1");
        if (resolutions.size() < 3) throw ConfigError("config: need >= 3 resolutions");
        try {
            (void)make_weight();
            (void)make_zset();
            (void)make_target();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        if (suites.end() != std::find(suites.begin(), suites.end(), "mt_sandwich")) {
            if (zset.size() < 3 || std::abs(zset.front() + 1.0) > 1e-14 ||
                std::abs(zset.back() - 1.0) > 1e-14)
                throw ConfigError(
                    "config: mt_sandwich needs zset with M >= 3, z_1 = -1 and z_M = 1");
        }
    }
};

}  // namespace wapprox
