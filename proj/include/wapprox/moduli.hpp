#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "wapprox/geometry.hpp"
#include "wapprox/minimax.hpp"
#include "wapprox/target.hpp"
#include "wapprox/weight.hpp"

namespace wapprox {

struct StencilTally {
    long excluded = 0;   // stencils dropped because a node hit a singular point
    long evaluated = 0;  // stencils actually summed
};

/// r-th symmetric difference with step h at x, zero unless the full stencil
/// [x - rh/2, x + rh/2] lies inside J. Stencils touching a singular point of
/// f are treated as outside and tallied.
inline double symmetric_difference(const TargetFunction& f, double h, int r, double x,
                                   const IntervalSet& J, StencilTally* tally = nullptr) {
    if (r < 1 || r > 20) throw std::invalid_argument("symmetric_difference: 1 <= r <= 20");
    if (h < 0.0) throw std::invalid_argument("symmetric_difference: h >= 0");
    const double half = 0.5 * r * h;
    if (!J.contains_segment(x - half, x + half)) return 0.0;

    // Exact integer binomials; r <= 20 keeps them well inside 2^53.
    std::int64_t binom = 1;
    double acc = 0.0;
    for (int i = 0; i <= r; ++i) {
        const double node = x - half + i * h;
        for (double s : f.singular_points) {
            if (std::abs(node - s) <= 1e-13) {
                if (tally) ++tally->excluded;
                return 0.0;
            }
        }
        const double fv = f(node);
        if (!std::isfinite(fv)) {
            if (tally) ++tally->excluded;
            return 0.0;
        }
        const double sign = ((r - i) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * static_cast<double>(binom) * fv;
        binom = binom * (r - i) / (i + 1);
    }
    if (tally) ++tally->evaluated;
    return acc;
}

struct ModulusQuery {
    int r = 1;
    double A = 1.0;
    double B = 1.0;
    double t = 0.25;
    int h_grid = 16;
    int x_grid = 257;
    int approx_grid = 8;  // grid multiplier for the E_r terms
    double theta = 0.85;
};

struct ModulusValue {
    double value = 0.0;
    double argmax_h = 0.0;
    double argmax_x = 0.0;
    long excluded_stencils = 0;
    bool vacuous = false;  // no admissible stencil at any h

    [[nodiscard]] nlohmann::json to_json() const {
        return nlohmann::json{{"value", value},
                              {"argmax_h", argmax_h},
                              {"argmax_x", argmax_x},
                              {"excluded_stencils", excluded_stencils},
                              {"vacuous", vacuous}};
    }
};

namespace detail {

/// Shared sweep: max over (h, x) of w(x) |Delta_{h phi(x)}^r (f, x, J(h))|.
template <class JOfH>
ModulusValue sweep_modulus(const TargetFunction& f, const Weight& w, int r,
                           std::span<const double> h_values, std::span<const double> x_values,
                           JOfH&& set_for_h) {
    ModulusValue out;
    StencilTally tally;
    bool any = false;
    for (double h : h_values) {
        const IntervalSet J = set_for_h(h);
        if (J.empty()) continue;
        for (double x : x_values) {
            const double step = h * phi(x);
            const double half = 0.5 * r * step;
            if (!J.contains_segment(x - half, x + half)) continue;
            const long seen = tally.evaluated;
            const double d = symmetric_difference(f, step, r, x, J, &tally);
            if (tally.evaluated == seen) continue;  // singular node exclusion
            any = true;
            const double v = w(x) * std::abs(d);
            if (v > out.value) {
                out.value = v;
                out.argmax_h = h;
                out.argmax_x = x;
            }
        }
    }
    out.excluded_stencils = tally.excluded;
    out.vacuous = !any;
    return out;
}

/// E_r(f, I)_w on either a private Chebyshev grid or (for shared-grid
/// inclusion checks) the restriction of a master grid to I.
inline double local_best_error(const TargetFunction& f, const Weight& w, Interval I, int r,
                               int grid_mult, std::span<const double> master_grid) {
    if (I.empty() || I.length() <= 0.0) return 0.0;
    if (master_grid.empty()) {
        const int count = std::max({8 * r, grid_mult * r, 33});
        return best_weighted_approx(f, w, I, r, count).error;
    }
    std::vector<double> pts;
    for (double x : master_grid)
        if (I.contains(x)) pts.push_back(x);
    const double tiny = 1e-13;
    std::erase_if(pts, [&](double x) {
        for (double s : f.singular_points)
            if (std::abs(x - s) <= tiny) return true;
        return false;
    });
    if (pts.size() < static_cast<std::size_t>(r) + 1) return 0.0;
    MinimaxOptions opt;
    opt.refine_passes = 0;  // keep the constraint-subset discipline exact
    return best_weighted_approx_on_points(f, w, pts, r, I.lo, I.hi, opt).error;
}

}  // namespace detail

/// Main part modulus on explicit grids; the public overload builds default
/// geometric/Chebyshev grids from the query.
inline ModulusValue main_part_modulus(const TargetFunction& f, const Weight& w, const ZSet& Z,
                                      int r, double A, std::span<const double> h_values,
                                      std::span<const double> x_values) {
    return detail::sweep_modulus(f, w, r, h_values, x_values,
                                 [&](double h) { return main_set(Z, A, h); });
}

inline ModulusValue main_part_modulus(const TargetFunction& f, const Weight& w, const ZSet& Z,
                                      const ModulusQuery& q) {
    const auto h = geometric_h_grid(q.t, q.h_grid, q.theta);
    const auto x = cheb_x_grid(q.x_grid);
    return main_part_modulus(f, w, Z, q.r, q.A, h, x);
}

/// Restricted main part modulus: the admissible set S is h-independent.
inline ModulusValue restricted_modulus(const TargetFunction& f, const Weight& w, int r,
                                       const IntervalSet& S, std::span<const double> h_values,
                                       std::span<const double> x_values) {
    return detail::sweep_modulus(f, w, r, h_values, x_values, [&](double) { return S; });
}

inline ModulusValue restricted_modulus(const TargetFunction& f, const Weight& w, int r, double t,
                                       const IntervalSet& S, int h_grid = 16, int x_grid = 257,
                                       double theta = 0.85) {
    const auto h = geometric_h_grid(t, h_grid, theta);
    const auto x = cheb_x_grid(x_grid);
    return restricted_modulus(f, w, r, S, h, x);
}

/// Weighted Ditzian-Totik modulus: restricted modulus with S = [-1,1].
inline ModulusValue dt_modulus(const TargetFunction& f, const Weight& w, int r, double t,
                               int h_grid = 16, int x_grid = 257, double theta = 0.85) {
    const IntervalSet full = IntervalSet::from_intervals({{kDomainLo, kDomainHi}});
    return restricted_modulus(f, w, r, t, full, h_grid, x_grid, theta);
}

/// Complete modulus: main part plus the local E_r terms on the singular
/// neighborhoods Z_{B,t}^j.
inline ModulusValue complete_modulus(const TargetFunction& f, const Weight& w, const ZSet& Z,
                                     int r, double A, double B, double t,
                                     std::span<const double> h_values,
                                     std::span<const double> x_values, int approx_grid = 8,
                                     std::span<const double> master_grid = {}) {
    ModulusValue out = main_part_modulus(f, w, Z, r, A, h_values, x_values);
    for (int j = 0; j < Z.size(); ++j) {
        const Interval nb = singular_neighborhood(Z, j, B, t);
        out.value += detail::local_best_error(f, w, nb, r, approx_grid, master_grid);
    }
    return out;
}

inline ModulusValue complete_modulus(const TargetFunction& f, const Weight& w, const ZSet& Z,
                                     const ModulusQuery& q) {
    const auto h = geometric_h_grid(q.t, q.h_grid, q.theta);
    const auto x = cheb_x_grid(q.x_grid);
    return complete_modulus(f, w, Z, q.r, q.A, q.B, q.t, h, x, q.approx_grid);
}

/// The classical composite modulus: per-gap sups over J_{j,h} plus E_r terms
/// on the I_{j,t} neighborhoods. Requires the M >= 3 layout with z_1 = -1 and
/// z_M = 1.
inline ModulusValue mt_modulus(const TargetFunction& f, const Weight& w, const ZSet& Z, int r,
                               double t, std::span<const double> h_values,
                               std::span<const double> x_values, int approx_grid = 8,
                               std::span<const double> master_grid = {}) {
    const int M = Z.size();
    if (M < 3 || std::abs(Z[0] - kDomainLo) > 1e-14 || std::abs(Z[M - 1] - kDomainHi) > 1e-14)
        throw std::invalid_argument("mt_modulus: needs M >= 3 with z_1 = -1 and z_M = 1");

    const auto gap_interval = [&](int j, double h) -> Interval {
        // j = 0..M-2 indexes the gap (z_j, z_{j+1}).
        const double lo = (j == 0) ? kDomainLo + h * h : Z[j] + h;
        const double hi = (j == M - 2) ? kDomainHi - h * h : Z[j + 1] - h;
        return {lo, hi};
    };

    ModulusValue out;
    StencilTally tally;
    bool any = false;
    double best_term = 0.0;
    for (int j = 0; j < M - 1; ++j) {
        double sup_j = 0.0;
        for (double h : h_values) {
            const Interval gap = gap_interval(j, h);
            if (gap.empty()) continue;
            const IntervalSet J = IntervalSet::from_intervals({gap});
            for (double x : x_values) {
                const double step = h * phi(x);
                const double half = 0.5 * r * step;
                if (!J.contains_segment(x - half, x + half)) continue;
                const long seen = tally.evaluated;
                const double d = symmetric_difference(f, step, r, x, J, &tally);
                if (tally.evaluated == seen) continue;
                any = true;
                const double v = w(x) * std::abs(d);
                if (v > sup_j) sup_j = v;
                if (v > best_term) {
                    best_term = v;
                    out.argmax_h = h;
                    out.argmax_x = x;
                }
            }
        }
        out.value += sup_j;
    }
    for (int j = 0; j < M; ++j) {
        Interval nb;
        if (j == 0)
            nb = {kDomainLo, kDomainLo + t * t};
        else if (j == M - 1)
            nb = {kDomainHi - t * t, kDomainHi};
        else
            nb = {Z[j] - t, Z[j] + t};
        nb = intersect(nb, {kDomainLo, kDomainHi});
        out.value += detail::local_best_error(f, w, nb, r, approx_grid, master_grid);
    }
    out.excluded_stencils = tally.excluded;
    out.vacuous = !any;
    return out;
}

}  // namespace wapprox
