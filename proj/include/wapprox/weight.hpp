#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wapprox/geometry.hpp"
#include "wapprox/quadrature.hpp"

namespace wapprox {

enum class WeightKind { constant, generalized_jacobi, generalized_dt, product_monotone, custom };

/// One factor |x - z|^gamma * (ln(e/|x - z|))^Gamma.
struct WeightFactor {
    double z = 0.0;
    double gamma = 0.0;
    double big_gamma = 0.0;
};

/// Evaluable weight on [-1,1], identically zero outside. Zeros may occur only
/// at the declared zero_set points; interval mass integrates with meshes
/// graded toward those points.
class Weight {
public:
    Weight() : kind_(WeightKind::constant), scale_(1.0) {}

    static Weight constant(double value = 1.0) {
        if (value < 0.0) throw std::invalid_argument("Weight: negative constant");
        Weight w;
        w.kind_ = WeightKind::constant;
        w.scale_ = value;
        return w;
    }

    static Weight generalized_jacobi(std::vector<WeightFactor> factors) {
        for (auto& f : factors) {
            if (f.gamma < 0.0) throw std::invalid_argument("Weight: gamma must be >= 0");
            f.big_gamma = 0.0;
        }
        Weight w;
        w.kind_ = WeightKind::generalized_jacobi;
        w.factors_ = std::move(factors);
        w.collect_zero_set();
        return w;
    }

    /// Product of a base weight with generalized Ditzian-Totik factors.
    /// Requires gamma_i >= 0 and Gamma_i <= 0 whenever gamma_i = 0.
    static Weight generalized_dt(Weight base, std::vector<WeightFactor> factors) {
        for (const auto& f : factors) {
            if (f.gamma < 0.0) throw std::invalid_argument("Weight: gamma must be >= 0");
            if (f.gamma == 0.0 && f.big_gamma > 0.0)
                throw std::invalid_argument("Weight: Gamma must be <= 0 when gamma = 0");
        }
        Weight w;
        w.kind_ = WeightKind::generalized_dt;
        w.factors_ = std::move(factors);
        w.base_ = std::make_shared<Weight>(std::move(base));
        w.collect_zero_set();
        return w;
    }

    /// base(x) * profile(|x - xi|) with profile nondecreasing on [0,2].
    static Weight product_monotone(Weight base, double xi, std::function<double(double)> profile,
                                   std::string profile_name, bool profile_vanishes_at_zero) {
        Weight w;
        w.kind_ = WeightKind::product_monotone;
        w.base_ = std::make_shared<Weight>(std::move(base));
        w.xi_ = xi;
        w.callable_ = std::move(profile);
        w.name_ = std::move(profile_name);
        if (profile_vanishes_at_zero) w.zero_set_.push_back(xi);
        w.collect_zero_set();
        return w;
    }

    static Weight custom(std::string name, std::function<double(double)> eval,
                         std::vector<double> zero_set) {
        Weight w;
        w.kind_ = WeightKind::custom;
        w.name_ = std::move(name);
        w.callable_ = std::move(eval);
        w.zero_set_ = std::move(zero_set);
        std::sort(w.zero_set_.begin(), w.zero_set_.end());
        return w;
    }

    [[nodiscard]] WeightKind kind() const { return kind_; }
    [[nodiscard]] const std::vector<WeightFactor>& factors() const { return factors_; }
    [[nodiscard]] const std::vector<double>& zero_set() const { return zero_set_; }
    [[nodiscard]] const std::string& name() const { return name_; }

    [[nodiscard]] double operator()(double x) const {
        if (!std::isfinite(x)) throw std::invalid_argument("Weight: non-finite point");
        if (x < kDomainLo || x > kDomainHi) return 0.0;
        double v = scale_;
        if (base_) v *= (*base_)(x);
        if (v == 0.0) return 0.0;
        switch (kind_) {
            case WeightKind::constant:
                return v;
            case WeightKind::generalized_jacobi:
            case WeightKind::generalized_dt:
                for (const auto& f : factors_) {
                    v *= factor_value(std::abs(x - f.z), f.gamma, f.big_gamma);
                    if (v == 0.0) return 0.0;
                }
                return v;
            case WeightKind::product_monotone:
                return v * callable_(std::abs(x - xi_));
            case WeightKind::custom:
                return v * callable_(x);
        }
        return v;
    }

    /// w([a,b] cap [-1,1]) with relative accuracy tol.
    [[nodiscard]] double mass(double a, double b, double tol = 1e-10) const {
        if (tol <= 0.0) throw std::invalid_argument("Weight::mass: tol must be positive");
        if (a > b) throw std::invalid_argument("Weight::mass: requires a <= b");
        const double lo = std::max(a, kDomainLo);
        const double hi = std::min(b, kDomainHi);
        if (lo >= hi) return 0.0;
        QuadratureOptions opt;
        opt.rel_tol = tol;
        const auto res =
            integrate([this](double u) { return (*this)(u); }, lo, hi, opt, zero_set_);
        if (!res.converged)
            throw QuadratureError("Weight::mass: refinement did not converge", res.value);
        return res.value;
    }

    [[nodiscard]] nlohmann::json to_json() const {
        nlohmann::json j;
        switch (kind_) {
            case WeightKind::constant:
                j["kind"] = "constant";
                if (scale_ != 1.0) j["value"] = scale_;
                break;
            case WeightKind::generalized_jacobi:
            case WeightKind::generalized_dt: {
                j["kind"] = kind_ == WeightKind::generalized_jacobi ? "generalized_jacobi"
                                                                    : "generalized_dt";
                nlohmann::json fs = nlohmann::json::array();
                for (const auto& f : factors_) {
                    nlohmann::json e{{"z", f.z}, {"gamma", f.gamma}};
                    if (f.big_gamma != 0.0) e["Gamma"] = f.big_gamma;
                    fs.push_back(e);
                }
                j["factors"] = fs;
                if (base_) j["base"] = base_->to_json();
                break;
            }
            case WeightKind::product_monotone:
                j["kind"] = "product_monotone";
                j["xi"] = xi_;
                j["profile"] = name_;
                if (base_) j["base"] = base_->to_json();
                break;
            case WeightKind::custom:
                j["kind"] = "custom";
                j["name"] = name_;
                break;
        }
        return j;
    }

    static Weight from_json(const nlohmann::json& j);

    /// Stable identity string for memoization keys.
    [[nodiscard]] std::string key() const { return to_json().dump(); }

private:
    static double factor_value(double d, double gamma, double big_gamma) {
        if (big_gamma == 0.0) return gamma == 0.0 ? 1.0 : std::pow(d, gamma);
        if (d == 0.0) return 0.0;  // gamma > 0, or Gamma < 0 with ln(e/d) -> inf
        const double lg = std::log(std::numbers::e / d);
        const double logs = std::pow(lg, big_gamma);
        return gamma == 0.0 ? logs : std::pow(d, gamma) * logs;
    }

    void collect_zero_set() {
        for (const auto& f : factors_)
            if (f.gamma > 0.0 || f.big_gamma != 0.0) zero_set_.push_back(f.z);
        if (base_)
            for (double z : base_->zero_set()) zero_set_.push_back(z);
        std::sort(zero_set_.begin(), zero_set_.end());
        zero_set_.erase(std::unique(zero_set_.begin(), zero_set_.end()), zero_set_.end());
    }

    WeightKind kind_;
    double scale_ = 1.0;
    std::vector<WeightFactor> factors_;
    std::shared_ptr<const Weight> base_;
    std::function<double(double)> callable_;
    double xi_ = 0.0;
    std::vector<double> zero_set_;
    std::string name_;
};

/// Construction operation for generalized Ditzian-Totik weights.
inline Weight make_gdt_weight(Weight base, std::vector<WeightFactor> factors) {
    return Weight::generalized_dt(std::move(base), std::move(factors));
}

/// Named custom weights usable from JSON configs. "step_quad_lin" is the
/// classic non-doubling example (x^2 right of 0, -x left of it);
/// "exp_inv_sq" vanishes to all orders from the right of 0.
inline Weight named_custom_weight(const std::string& name) {
    if (name == "step_quad_lin") {
        return Weight::custom(
            name, [](double x) { return x < 0.0 ? -x : x * x; }, {0.0});
    }
    if (name == "exp_inv_sq") {
        return Weight::custom(
            name, [](double x) { return x > 0.0 ? std::exp(-1.0 / (x * x)) : 0.0; }, {0.0});
    }
    throw std::invalid_argument("named_custom_weight: unknown name '" + name +
                                "' (known: step_quad_lin, exp_inv_sq)");
}

inline std::function<double(double)> named_profile(const std::string& name, double p) {
    if (name == "pow") {
        if (p < 0.0) throw std::invalid_argument("profile pow: exponent must be >= 0");
        return [p](double d) { return std::pow(d, p); };
    }
    if (name == "identity") return [](double d) { return d; };
    throw std::invalid_argument("named_profile: unknown profile '" + name + "'");
}

inline Weight Weight::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const auto parse_factors = [&j]() {
        std::vector<WeightFactor> fs;
        for (const auto& e : j.value("factors", nlohmann::json::array())) {
            WeightFactor f;
            f.z = e.at("z").get<double>();
            f.gamma = e.value("gamma", 0.0);
            f.big_gamma = e.value("Gamma", 0.0);
            fs.push_back(f);
        }
        return fs;
    };
    if (kind == "constant") return Weight::constant(j.value("value", 1.0));
    if (kind == "generalized_jacobi") return Weight::generalized_jacobi(parse_factors());
    if (kind == "generalized_dt") {
        Weight base = j.contains("base") ? Weight::from_json(j.at("base")) : Weight::constant();
        return Weight::generalized_dt(std::move(base), parse_factors());
    }
    if (kind == "product_monotone") {
        Weight base = j.contains("base") ? Weight::from_json(j.at("base")) : Weight::constant();
        const std::string profile = j.at("profile").get<std::string>();
        const double p = j.value("p", 1.0);
        return Weight::product_monotone(std::move(base), j.at("xi").get<double>(),
                                        named_profile(profile, p),
                                        profile + ":" + std::to_string(p), p > 0.0);
    }
    if (kind == "custom") return named_custom_weight(j.at("name").get<std::string>());
    throw std::invalid_argument("Weight::from_json: unknown kind '" + kind + "'");
}

}  // namespace wapprox
