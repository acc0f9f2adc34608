#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wapprox/chebyshev.hpp"
#include "wapprox/geometry.hpp"
#include "wapprox/weight.hpp"

namespace wapprox {

/// Pointwise-evaluable target on [-1,1]. singular_points are excluded from
/// every grid (f may be unbounded or undefined there); feature_points mark
/// kinks and breaks that grids must include to resolve best-approximation
/// extrema.
struct TargetFunction {
    std::function<double(double)> eval;
    std::vector<double> singular_points;
    std::vector<double> feature_points;
    std::string description;

    double operator()(double x) const { return eval(x); }
};

inline TargetFunction make_function(const std::string& name, const nlohmann::json& params) {
    const auto get = [&params](const char* key, double dflt) { return params.value(key, dflt); };
    TargetFunction f;
    f.description = name;
    if (name == "power_abs") {
        const double z = get("z", 0.0);
        const double alpha = get("alpha", 1.0);
        if (alpha <= 0.0) throw std::invalid_argument("power_abs: alpha > 0 (use neg_power)");
        f.eval = [z, alpha](double x) { return std::pow(std::abs(x - z), alpha); };
        f.feature_points = {z};
        f.description += "(z=" + std::to_string(z) + ",a=" + std::to_string(alpha) + ")";
        return f;
    }
    if (name == "neg_power") {
        const double z = get("z", 0.0);
        const double alpha = get("alpha", -0.2);
        if (alpha >= 0.0) throw std::invalid_argument("neg_power: alpha < 0");
        f.eval = [z, alpha](double x) { return std::pow(std::abs(x - z), alpha); };
        f.singular_points = {z};
        f.description += "(z=" + std::to_string(z) + ",a=" + std::to_string(alpha) + ")";
        return f;
    }
    if (name == "log_power") {
        const double z = get("z", 0.0);
        const double alpha = get("alpha", 1.0);
        const double beta = get("beta", 1.0);
        f.eval = [z, alpha, beta](double x) {
            const double d = std::abs(x - z);
            if (d == 0.0) return alpha > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
            return std::pow(d, alpha) * std::pow(std::log(std::numbers::e / d), beta);
        };
        if (alpha > 0.0)
            f.feature_points = {z};
        else
            f.singular_points = {z};
        f.description += "(z=" + std::to_string(z) + ")";
        return f;
    }
    if (name == "truncated_power") {
        const double z = get("z", 0.0);
        const double alpha = get("alpha", 1.0);
        if (alpha <= 0.0) throw std::invalid_argument("truncated_power: alpha > 0");
        f.eval = [z, alpha](double x) { return x > z ? std::pow(x - z, alpha) : 0.0; };
        f.feature_points = {z};
        f.description += "(z=" + std::to_string(z) + ",a=" + std::to_string(alpha) + ")";
        return f;
    }
    if (name == "exp") {
        const double k = get("k", 1.0);
        f.eval = [k](double x) { return std::exp(k * x); };
        f.description += "(k=" + std::to_string(k) + ")";
        return f;
    }
    if (name == "sin") {
        const double k = get("k", 1.0);
        f.eval = [k](double x) { return std::sin(k * x); };
        f.description += "(k=" + std::to_string(k) + ")";
        return f;
    }
    if (name == "cheb") {
        const int k = static_cast<int>(get("k", 1.0));
        const ChebPoly t = ChebPoly::basis(k);
        f.eval = [t](double x) { return t(x); };
        f.description += "(k=" + std::to_string(k) + ")";
        return f;
    }
    if (name == "polynomial") {
        if (!params.contains("coeffs")) throw std::invalid_argument("polynomial: needs coeffs");
        const ChebPoly p(-1.0, 1.0, params.at("coeffs").get<std::vector<double>>());
        f.eval = [p](double x) { return p(x); };
        return f;
    }
    if (name == "abs_plus_const") {
        const double c = get("c", 5.0);
        f.eval = [c](double x) { return std::abs(x) + c; };
        f.feature_points = {0.0};
        return f;
    }
    throw std::invalid_argument(
        "make_function: unknown name '" + name +
        "' (known: power_abs, neg_power, log_power, truncated_power, exp, sin, cheb, "
        "polynomial, abs_plus_const)");
}

inline TargetFunction from_poly(const ChebPoly& p, std::string description = "poly") {
    TargetFunction f;
    f.eval = [p](double x) { return p(x); };
    f.description = std::move(description);
    return f;
}

/// Membership diagnostic for L_infty^w: max of |w f| over a resolution ladder
/// of grids (singular points excluded). Bounded means the maxima stabilize:
/// the finest rung exceeds the coarsest by less than `growth`.
struct LinfReport {
    std::vector<double> maxima;
    bool bounded = true;
};

inline LinfReport check_weighted_boundedness(const TargetFunction& f, const Weight& w,
                                             std::vector<int> resolutions = {257, 1025, 4097},
                                             double growth = 2.0) {
    LinfReport rep;
    for (int m : resolutions) {
        double mx = 0.0;
        for (double x : cheb_x_grid(m)) {
            bool skip = false;
            for (double s : f.singular_points)
                if (std::abs(x - s) <= 1e-13) skip = true;
            if (skip) continue;
            const double v = w(x) * f(x);
            if (std::isfinite(v)) mx = std::max(mx, std::abs(v));
        }
        rep.maxima.push_back(mx);
    }
    rep.bounded = rep.maxima.back() <= growth * std::max(rep.maxima.front(), 1e-12);
    return rep;
}

}  // namespace wapprox
