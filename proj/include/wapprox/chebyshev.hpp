#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "wapprox/util.hpp"

namespace wapprox {

/// Polynomial in Chebyshev-coefficient form on a reference interval [a,b]:
/// p(x) = sum_k c_k T_k(u), u the affine image of x in [-1,1]. A coefficient
/// vector of size n represents a member of P_n (degree <= n-1).
class ChebPoly {
public:
    ChebPoly() : a_(-1.0), b_(1.0), c_{0.0} {}

    ChebPoly(double a, double b, std::vector<double> coeffs)
        : a_(a), b_(b), c_(std::move(coeffs)) {
        if (!(a_ < b_)) throw std::invalid_argument("ChebPoly: degenerate interval");
        if (c_.empty()) c_.push_back(0.0);
    }

    static ChebPoly constant(double v, double a = -1.0, double b = 1.0) {
        return ChebPoly(a, b, {v});
    }

    /// T_k on [a,b] (in the mapped variable).
    static ChebPoly basis(int k, double a = -1.0, double b = 1.0) {
        if (k < 0) throw std::invalid_argument("ChebPoly::basis: k >= 0");
        std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
        c.back() = 1.0;
        return ChebPoly(a, b, std::move(c));
    }

    /// Interpolant of f at `dim` first-kind Chebyshev nodes; exact for
    /// polynomials of degree < dim.
    template <class F>
    static ChebPoly interpolate(F&& f, int dim, double a = -1.0, double b = 1.0) {
        if (dim < 1) throw std::invalid_argument("ChebPoly::interpolate: dim >= 1");
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        std::vector<double> fv(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) {
            const double theta = (2.0 * j + 1.0) * std::numbers::pi / (2.0 * dim);
            fv[static_cast<std::size_t>(j)] = f(mid + half * std::cos(theta));
        }
        std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
        for (int k = 0; k < dim; ++k) {
            double s = 0.0;
            for (int j = 0; j < dim; ++j)
                s += fv[static_cast<std::size_t>(j)] *
                     std::cos(k * (2.0 * j + 1.0) * std::numbers::pi / (2.0 * dim));
            c[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 : 2.0) * s / dim;
        }
        return ChebPoly(a, b, std::move(c));
    }

    /// Member of P_dim with i.i.d. uniform [-1,1] Chebyshev coefficients.
    static ChebPoly random(int dim, SplitMix64& rng, double a = -1.0, double b = 1.0) {
        if (dim < 1) throw std::invalid_argument("ChebPoly::random: dim >= 1");
        std::vector<double> c(static_cast<std::size_t>(dim));
        for (auto& v : c) v = rng.uniform(-1.0, 1.0);
        return ChebPoly(a, b, std::move(c));
    }

    [[nodiscard]] double lo() const { return a_; }
    [[nodiscard]] double hi() const { return b_; }
    [[nodiscard]] int dimension() const { return static_cast<int>(c_.size()); }
    [[nodiscard]] const std::vector<double>& coeffs() const { return c_; }

    [[nodiscard]] double operator()(double x) const {
        const double u = (2.0 * x - a_ - b_) / (b_ - a_);
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t k = c_.size(); k-- > 1;) {
            const double t = 2.0 * u * b1 - b2 + c_[k];
            b2 = b1;
            b1 = t;
        }
        return u * b1 - b2 + c_[0];
    }

    [[nodiscard]] ChebPoly derivative(int order = 1) const {
        if (order < 0) throw std::invalid_argument("ChebPoly::derivative: order >= 0");
        ChebPoly p = *this;
        for (int i = 0; i < order; ++i) p = p.derivative_once();
        return p;
    }

    ChebPoly& operator+=(const ChebPoly& o) { return axpy(1.0, o); }
    ChebPoly& operator-=(const ChebPoly& o) { return axpy(-1.0, o); }
    ChebPoly& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }

    friend ChebPoly operator+(ChebPoly l, const ChebPoly& r) { return l += r; }
    friend ChebPoly operator-(ChebPoly l, const ChebPoly& r) { return l -= r; }
    friend ChebPoly operator*(double s, ChebPoly p) { return p *= s; }

    [[nodiscard]] nlohmann::json to_json() const {
        return nlohmann::json{{"interval", {a_, b_}}, {"coeffs", c_}};
    }

    static ChebPoly from_json(const nlohmann::json& j) {
        const auto iv = j.at("interval");
        return ChebPoly(iv.at(0).get<double>(), iv.at(1).get<double>(),
                        j.at("coeffs").get<std::vector<double>>());
    }

private:
    [[nodiscard]] ChebPoly derivative_once() const {
        const std::size_t m = c_.size();
        if (m <= 1) return ChebPoly::constant(0.0, a_, b_);
        std::vector<double> d(m - 1, 0.0);
        const double scale = 2.0 / (b_ - a_);
        double next2 = 0.0;  // d[k+1] while walking k downward
        d[m - 2] = 2.0 * static_cast<double>(m - 1) * c_[m - 1];
        for (std::size_t k = m - 2; k >= 1; --k) {
            d[k - 1] = next2 + 2.0 * static_cast<double>(k) * c_[k];
            next2 = d[k];
        }
        d[0] *= 0.5;
        for (double& v : d) v *= scale;
        return ChebPoly(a_, b_, std::move(d));
    }

    ChebPoly& axpy(double s, const ChebPoly& o) {
        if (a_ != o.a_ || b_ != o.b_)
            throw std::invalid_argument("ChebPoly: mismatched reference intervals");
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += s * o.c_[k];
        return *this;
    }

    double a_, b_;
    std::vector<double> c_;
};

/// Degree-(r-1) Taylor section of p at z: matches p^{(nu)}(z), 0 <= nu < r.
inline ChebPoly taylor_section(const ChebPoly& p, double z, int r) {
    if (r < 1) throw std::invalid_argument("taylor_section: r >= 1");
    std::vector<double> deriv(static_cast<std::size_t>(r));
    ChebPoly d = p;
    double fact = 1.0;
    for (int nu = 0; nu < r; ++nu) {
        deriv[static_cast<std::size_t>(nu)] = d(z) / fact;
        if (nu + 1 < r) {
            d = d.derivative();
            fact *= nu + 1.0;
        }
    }
    const auto horner = [&](double x) {
        double acc = 0.0;
        for (int nu = r - 1; nu >= 0; --nu) acc = acc * (x - z) + deriv[static_cast<std::size_t>(nu)];
        return acc;
    };
    return ChebPoly::interpolate(horner, r, p.lo(), p.hi());
}

/// Re-expand a low-degree polynomial on a different reference interval
/// (exact: interpolation at dim nodes reproduces degree < dim).
inline ChebPoly rebase(const ChebPoly& p, double a, double b) {
    return ChebPoly::interpolate([&p](double x) { return p(x); }, p.dimension(), a, b);
}

}  // namespace wapprox
