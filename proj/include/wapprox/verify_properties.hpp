#pragma once

// Shared-grid verification of the structural modulus properties
// (saturation, monotonicity in t/A/B, the restricted-modulus comparison),
// the boundedness estimates, the doubling-of-t bounds, the B-inflation
// bounds, the difference recombination identity, and near-best extension.
// Included via verify.hpp.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace wapprox {

namespace detail {

inline std::vector<double> filter_le(std::span<const double> h, double cut) {
    std::vector<double> out;
    for (double v : h)
        if (v <= cut) out.push_back(v);
    return out;
}

/// Both sides of the recombination identity
/// Delta_{2h}^r(f,x) = sum over {0,1}^r of Delta_h^r at shifted centers,
/// evaluated with unrestricted stencils (caller keeps them inside [-1,1]).
struct RecombinationPair {
    double lhs;
    double rhs;
    bool valid;
};

inline RecombinationPair recombination_identity(const TargetFunction& f, int r, double h,
                                                double x) {
    const IntervalSet full = IntervalSet::from_intervals({{kDomainLo, kDomainHi}});
    StencilTally tally;
    RecombinationPair out{0.0, 0.0, true};
    out.lhs = symmetric_difference(f, 2.0 * h, r, x, full, &tally);
    long evaluated = tally.evaluated;
    if (evaluated == 0) return {0.0, 0.0, false};
    // Group the 2^r shift tuples by their sum m: binom(r, m) copies each.
    std::int64_t binom = 1;
    for (int m = 0; m <= r; ++m) {
        const long seen = tally.evaluated;
        const double term = symmetric_difference(f, h, r, x + (m - 0.5 * r) * h, full, &tally);
        if (tally.evaluated == seen) return {0.0, 0.0, false};
        out.rhs += static_cast<double>(binom) * term;
        binom = binom * (r - m) / (m + 1);
    }
    return out;
}

}  // namespace detail

/// Structural property suite on shared grids. Equalities compare bitwise-
/// shared term sets (tolerance 1e-12 is slack); inequalities whose two sides
/// range over nested term sets are checked exactly, with a small guard only
/// where local best-approximation errors enter (solver tolerance).
inline VerdictReport verify_modulus_properties(const TargetFunction& f, const Weight& w,
                                               const ZSet& Z, int r, VerifyContext& ctx,
                                               double A = 1.0, double B = 1.0) {
    detail::Stopwatch clock;
    VerdictReport rep;
    rep.theorem = "modulus_properties";
    rep.threshold = ctx.threshold;
    rep.inputs = {{"function", f.description}, {"weight", w.to_json()}, {"zset", Z.points()},
                  {"r", r},                    {"A", A},                {"B", B}};

    const auto xg = cheb_x_grid(ctx.grids.x_grid);
    const auto master = detail::eval_grid(f, ctx.grids.master_grid);
    const int hg = ctx.grids.h_grid;
    const double th = ctx.grids.theta;
    const int am = ctx.grids.approx_mult;

    const auto omega_at = [&](double Aq, double Bq, double t, std::span<const double> h) {
        return complete_modulus(f, w, Z, r, Aq, Bq, t, h, xg, am, master).value;
    };
    const auto main_at = [&](double Aq, std::span<const double> h) {
        return main_part_modulus(f, w, Z, r, Aq, h, xg).value;
    };

    // (i) saturation of the main part at t0 = sqrt(2/A).
    {
        const double t0 = std::sqrt(2.0 / A);
        const auto H = geometric_h_grid(2.0 * t0, hg, th);
        const auto H0 = detail::filter_le(H, t0);
        rep.add_eq("saturation_main", 2.0 * t0, main_at(A, H), main_at(A, H0), 1e-12);
    }

    // (ii) saturation of the complete modulus above t0 = max(sqrt(2/A),
    // sqrt(2/B)), compared at 2 t0 vs 1.25 t0 (both saturated, with margin so
    // every neighborhood is exactly [-1,1]), plus the M E_r lower bound.
    {
        const double t0 = std::max(std::sqrt(2.0 / A), std::sqrt(2.0 / B));
        const auto H = geometric_h_grid(2.0 * t0, hg, th);
        const auto Hs = detail::filter_le(H, 1.25 * t0);
        rep.add_eq("saturation_complete", 2.0 * t0, omega_at(A, B, 2.0 * t0, H),
                   omega_at(A, B, 1.25 * t0, Hs), 1e-12);
        const double er_full =
            detail::local_best_error(f, w, {kDomainLo, kDomainHi}, r, am, master);
        rep.add_le("saturated_ge_M_Er", 2.0 * t0, Z.size() * er_full,
                   omega_at(A, B, 2.0 * t0, H), 1e-11);
    }

    // (iii)-(v) monotonicity on nested grids.
    const std::vector<double> ladder{0.0625, 0.125, 0.25};
    {
        const auto H = geometric_h_grid(ladder.back(), 3 * hg, th);
        for (std::size_t i = 0; i + 1 < ladder.size(); ++i) {
            const auto H1 = detail::filter_le(H, ladder[i]);
            const auto H2 = detail::filter_le(H, ladder[i + 1]);
            rep.add_le("monotone_t_main", ladder[i], main_part_modulus(f, w, Z, r, A, H1, xg).value,
                       main_part_modulus(f, w, Z, r, A, H2, xg).value, 0.0);
            rep.add_le("monotone_t_complete", ladder[i], omega_at(A, B, ladder[i], H1),
                       omega_at(A, B, ladder[i + 1], H2), 1e-11);
        }
    }
    for (double t : ladder) {
        const auto H = geometric_h_grid(t, hg, th);
        rep.add_le("monotone_A", t, main_at(2.0 * A, H), main_at(A, H), 0.0);
        rep.add_le("monotone_A_complete", t, omega_at(2.0 * A, B, t, H), omega_at(A, B, t, H),
                   1e-12);
        rep.add_le("monotone_B", t, omega_at(A, 0.5 * B, t, H), omega_at(A, B, t, H), 1e-11);
    }

    // (vi) restricted modulus against the widened main part.
    for (double cs : {0.5, 1.0, 2.0}) {
        const double t = 0.25;
        const auto H = geometric_h_grid(cs * t, hg, th);
        const IntervalSet S = main_set(Z, A, t);
        const double lhs = restricted_modulus(f, w, r, S, H, xg).value;
        const double rhs = main_part_modulus(f, w, Z, r, A / std::max(cs, cs * cs), H, xg).value;
        rep.add_le("restricted_vs_main", cs, lhs, rhs, 0.0);
    }

    // Boundedness: omega <= c |wf| and the sharper omega <= c E_r(f,[-1,1]).
    const auto fgrid = detail::eval_grid(f, ctx.grids.x_grid);
    const double wf_norm = detail::weighted_sup(f, w, fgrid);
    const double er_full = detail::local_best_error(f, w, {kDomainLo, kDomainHi}, r, am, master);
    for (double t : ladder) {
        const auto H = geometric_h_grid(t, hg, th);
        const double om = omega_at(A, B, t, H);
        rep.add_ratio("bounded_by_wf", t, om, wf_norm);
        rep.add_ratio("bounded_by_Er", t, om, er_full);
    }

    // Doubling of t: Omega(A, 2t) <= c Omega(sqrt2 A, sqrt2 t) and the A = 1
    // consequence Omega(1, 2t) <= c Omega(1, t).
    for (double t : ladder) {
        const auto H2 = geometric_h_grid(2.0 * t, hg, th);
        const auto Hs = geometric_h_grid(std::numbers::sqrt2 * t, hg, th);
        const auto H1 = geometric_h_grid(t, hg, th);
        rep.add_ratio("doubling_t", t, main_at(A, H2), main_part_modulus(
                f, w, Z, r, std::numbers::sqrt2 * A, Hs, xg).value);
        rep.add_ratio("doubling_t_A1", t, main_part_modulus(f, w, Z, r, 1.0, H2, xg).value,
                      main_part_modulus(f, w, Z, r, 1.0, H1, xg).value);
    }

    // B-inflation and B-halving below the spacing threshold c0.
    {
        const double c0 = std::min(1.0, Z.spacing() / (4.0 * B));
        bool any = false;
        for (double t : ladder) {
            if (!(t < c0)) continue;
            any = true;
            const auto H = geometric_h_grid(t, hg, th);
            rep.add_ratio("B_inflation", t, omega_at(1.0, B * (1.0 + 0.5 / r), t, H),
                          omega_at(1.0, B, t, H));
            rep.add_ratio("B_halving", t, omega_at(1.0, B, t, H), omega_at(1.0, 0.5 * B, t, H));
        }
        if (!any) rep.add_info("B_inflation_skipped_c0", c0, 0.0);
    }

    // Difference recombination identity at interior sample points.
    {
        const struct { double x, h; } samples[] = {{0.1, 0.05}, {-0.3, 0.02}, {0.37, 0.031}};
        for (const auto& s : samples) {
            const auto pr = detail::recombination_identity(f, r, s.h, s.x);
            if (pr.valid) rep.add_eq("recombination", s.x, pr.lhs, pr.rhs, 1e-12);
        }
    }

    // Local weight comparability on admitted stencils: w(y) ~ w(x) for
    // stencil nodes y, and w(x) ~ w_n(x) with n = ceil(1/h).
    for (double h : {0.125, 0.0625, 0.03125}) {
        const int n = static_cast<int>(std::ceil(1.0 / h));
        const IntervalSet I = main_set(Z, A, h);
        double worst_local = 0.0, worst_avg = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < xg.size(); i += 8) {
            const double x = xg[i];
            const double half = 0.5 * r * h * phi(x);
            if (!I.contains_segment(x - half, x + half)) continue;
            const double wx = w(x);
            if (wx <= 0.0) continue;
            for (int k = 0; k <= r; ++k) {
                const double y = x - half + k * h * phi(x);
                const double wy = w(y);
                if (wy > 0.0) worst_local = std::max(worst_local, detail::sym_ratio(wx, wy));
            }
            const double wn = averaged_weight(w, n, x);
            worst_avg = std::max(worst_avg, detail::sym_ratio(wx, wn));
            if (++count >= 24) break;
        }
        if (count > 0) {
            rep.add_ratio("local_weight_ratio", h, worst_local, 1.0);
            rep.add_ratio("averaged_weight_ratio", h, worst_avg, 1.0);
        }
    }

    rep.finalize();
    rep.runtime_seconds = clock.seconds();
    return rep;
}

/// Nested (I, J) ladder around a point: I_k = [z - a_k, z + a_k],
/// J_k twice as wide, a_k halving.
inline std::vector<std::pair<Interval, Interval>> make_shrinking_pairs(double z, int count,
                                                                       double start = 0.4) {
    std::vector<std::pair<Interval, Interval>> out;
    double a = start;
    for (int k = 0; k < count; ++k) {
        const Interval I = intersect({z - a, z + a}, {kDomainLo, kDomainHi});
        const Interval J = intersect({z - 2.0 * a, z + 2.0 * a}, {kDomainLo, kDomainHi});
        if (I.length() > 0.0 && J.length() > 0.0) out.emplace_back(I, J);
        a *= 0.5;
    }
    return out;
}

/// Near-best extension: the minimax solution on I stays near-best on the
/// enclosing J; rows record |w(f-q_I)|_J / E_r(f, J)_w across the ladder.
inline VerdictReport verify_near_best_extension(const TargetFunction& f, const Weight& w, int r,
                                                std::span<const std::pair<Interval, Interval>> pairs,
                                                VerifyContext& ctx) {
    detail::Stopwatch clock;
    VerdictReport rep;
    rep.theorem = "near_best_extension";
    rep.threshold = ctx.threshold;
    rep.inputs = {{"function", f.description}, {"weight", w.to_json()}, {"r", r},
                  {"pairs", pairs.size()}};

    int k = 0;
    for (const auto& [I, J] : pairs) {
        if (!(I.lo >= J.lo && I.hi <= J.hi))
            throw std::invalid_argument("verify_near_best_extension: needs I inside J");
        const int grid = std::max(8 * r, 64);
        const auto on_I = best_weighted_approx(f, w, I, r, grid);
        const auto on_J = best_weighted_approx(f, w, J, r, grid);
        std::vector<double> jg = cheb_x_grid(257, J.lo, J.hi);
        for (double z : f.feature_points)
            if (J.contains(z)) jg.push_back(z);
        std::erase_if(jg, [&](double x) {
            for (double s : f.singular_points)
                if (std::abs(x - s) <= 1e-13) return true;
            return false;
        });
        double lhs = 0.0;
        for (double x : jg) lhs = std::max(lhs, w(x) * std::abs(f(x) - on_I.poly(x)));
        rep.add_ratio("extension_ratio", k, lhs, on_J.error,
                      1e-9 * std::max(1.0, std::abs(on_J.error)));
        ++k;
    }
    rep.finalize();
    rep.runtime_seconds = clock.seconds();
    return rep;
}

}  // namespace wapprox
