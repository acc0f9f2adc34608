#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wapprox/chebyshev.hpp"
#include "wapprox/geometry.hpp"
#include "wapprox/simplex.hpp"
#include "wapprox/target.hpp"
#include "wapprox/weight.hpp"

namespace wapprox {

struct MinimaxResult {
    ChebPoly poly;
    double error = 0.0;
    std::vector<std::pair<double, double>> residual_extrema;  // (x, weighted residual)
    int iterations = 0;
    int grid_size = 0;
    int alternations = 0;
    bool used_lp = false;
};

struct MinimaxOptions {
    double tol = 1e-11;
    int max_iterations = 120;
    int refine_passes = 8;  // off-grid refinement rounds (stops when stable)
    bool force_lp = false;
};

namespace detail {

struct DiscreteProblem {
    std::vector<double> x, fx, wx;
    double lo = -1.0, hi = 1.0;
};

inline double chebval_basis(int k, double u) {
    // T_k(u) via the cosine form for |u|<=1, recurrence otherwise.
    if (u >= -1.0 && u <= 1.0) return std::cos(k * std::acos(u));
    double t0 = 1.0, t1 = u;
    if (k == 0) return t0;
    for (int i = 1; i < k; ++i) {
        const double t2 = 2.0 * u * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

/// Solve the levelled system w_i p(x_i) + s_i e = w_i f_i over n+1 reference
/// points (s_i alternating signs; rows pre-scaled by the weights so vanishing
/// weights do not wreck conditioning). Returns false on singular systems.
inline bool solve_reference(const DiscreteProblem& P, std::span<const int> ref, int n,
                            std::vector<double>& coeffs, double& level) {
    const std::size_t dim = static_cast<std::size_t>(n) + 1;
    std::vector<double> A(dim * dim), b(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double x = P.x[static_cast<std::size_t>(ref[i])];
        const double u = (2.0 * x - P.lo - P.hi) / (P.hi - P.lo);
        const double w = P.wx[static_cast<std::size_t>(ref[i])];
        for (int k = 0; k < n; ++k)
            A[i * dim + static_cast<std::size_t>(k)] = w * chebval_basis(k, u);
        A[i * dim + static_cast<std::size_t>(n)] = (i % 2 == 0 ? 1.0 : -1.0);
        b[i] = w * P.fx[static_cast<std::size_t>(ref[i])];
    }
    std::vector<double> sol;
    if (!gauss_solve(std::move(A), std::move(b), sol)) return false;
    coeffs.assign(sol.begin(), sol.end() - 1);
    level = sol.back();
    return true;
}

/// Alternating extremal subset of the residual: one representative per
/// maximal sign run, trimmed to exactly n+1 points keeping the largest.
inline bool alternating_reference(std::span<const double> r, int n, std::vector<int>& ref) {
    std::vector<int> reps;
    int run_sign = 0, run_best = -1;
    for (int k = 0; k < static_cast<int>(r.size()); ++k) {
        const double v = r[static_cast<std::size_t>(k)];
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (s != run_sign) {
            if (run_best >= 0) reps.push_back(run_best);
            run_sign = s;
            run_best = k;
        } else if (std::abs(v) > std::abs(r[static_cast<std::size_t>(run_best)])) {
            run_best = k;
        }
    }
    if (run_best >= 0) reps.push_back(run_best);
    if (static_cast<int>(reps.size()) < n + 1) return false;

    const auto mag = [&r](int k) { return std::abs(r[static_cast<std::size_t>(k)]); };
    while (static_cast<int>(reps.size()) > n + 1) {
        if (static_cast<int>(reps.size()) == n + 2) {
            if (mag(reps.front()) <= mag(reps.back()))
                reps.erase(reps.begin());
            else
                reps.pop_back();
            continue;
        }
        std::size_t worst = 0;
        for (std::size_t i = 1; i < reps.size(); ++i)
            if (mag(reps[i]) < mag(reps[worst])) worst = i;
        if (worst == 0) {
            reps.erase(reps.begin());
        } else if (worst + 1 == reps.size()) {
            reps.pop_back();
        } else {
            // drop it and merge the now same-signed neighbors
            const std::size_t keep =
                mag(reps[worst - 1]) >= mag(reps[worst + 1]) ? worst - 1 : worst + 1;
            const int kept = reps[keep];
            reps.erase(reps.begin() + static_cast<std::ptrdiff_t>(worst - 1),
                       reps.begin() + static_cast<std::ptrdiff_t>(worst + 2));
            reps.insert(reps.begin() + static_cast<std::ptrdiff_t>(worst - 1), kept);
        }
    }
    ref = std::move(reps);
    return true;
}

struct SolveOutcome {
    std::vector<double> coeffs;
    double level = 0.0;
    std::vector<int> ref;
    int iterations = 0;
    bool ok = false;
};

inline std::vector<double> residuals(const DiscreteProblem& P, const ChebPoly& p) {
    std::vector<double> r(P.x.size());
    for (std::size_t k = 0; k < P.x.size(); ++k) r[k] = P.wx[k] * (P.fx[k] - p(P.x[k]));
    return r;
}

/// Classical single-point exchange: swap the global residual extremum into
/// the reference while preserving sign alternation. Returns false when the
/// extremum already is a reference point.
inline bool single_exchange(std::vector<int>& ref, std::span<const double> r, double level) {
    int g = -1;
    double best = 0.0;
    for (int k = 0; k < static_cast<int>(r.size()); ++k) {
        const double v = std::abs(r[static_cast<std::size_t>(k)]);
        if (v > best) {
            best = v;
            g = k;
        }
    }
    if (g < 0) return false;
    for (int idx : ref)
        if (idx == g) return false;
    const double s = r[static_cast<std::size_t>(g)] > 0.0 ? 1.0 : -1.0;
    const double sign0 = level >= 0.0 ? 1.0 : -1.0;  // imposed sign at ref[0]
    const auto ref_sign = [&](std::size_t i) { return (i % 2 == 0) ? sign0 : -sign0; };

    if (g < ref.front()) {
        if (ref_sign(0) == s) {
            ref.front() = g;
        } else {
            ref.insert(ref.begin(), g);
            ref.pop_back();
        }
        return true;
    }
    if (g > ref.back()) {
        if (ref_sign(ref.size() - 1) == s) {
            ref.back() = g;
        } else {
            ref.push_back(g);
            ref.erase(ref.begin());
        }
        return true;
    }
    for (std::size_t i = 0; i + 1 < ref.size(); ++i) {
        if (ref[i] < g && g < ref[i + 1]) {
            if (ref_sign(i) == s)
                ref[i] = g;
            else
                ref[i + 1] = g;
            return true;
        }
    }
    return false;
}

inline SolveOutcome exchange_solve(const DiscreteProblem& P, int n, const MinimaxOptions& opt) {
    SolveOutcome out;
    const int K = static_cast<int>(P.x.size());
    std::vector<int> positive;
    for (int k = 0; k < K; ++k)
        if (P.wx[static_cast<std::size_t>(k)] > 0.0) positive.push_back(k);
    if (static_cast<int>(positive.size()) < n + 1) return out;

    // Chebyshev-extrema initial reference mapped into the admissible points.
    std::vector<int> ref;
    ref.reserve(static_cast<std::size_t>(n) + 1);
    {
        const double mid = 0.5 * (P.lo + P.hi);
        const double half = 0.5 * (P.hi - P.lo);
        std::size_t cursor = 0;
        for (int i = 0; i <= n; ++i) {
            const double target = mid - half * std::cos(i * std::numbers::pi / n);
            while (cursor + 1 < positive.size() &&
                   P.x[static_cast<std::size_t>(positive[cursor + 1])] <= target)
                ++cursor;
            std::size_t pick = cursor;
            if (!ref.empty() && positive[pick] <= ref.back()) {
                // keep strictly increasing; scan forward for the next free point
                while (pick + 1 < positive.size() && positive[pick] <= ref.back()) ++pick;
                if (positive[pick] <= ref.back()) return out;
            }
            ref.push_back(positive[pick]);
            cursor = pick;
        }
    }

    std::vector<double> coeffs;
    double level = 0.0;
    double best_dev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opt.max_iterations; ++it) {
        out.iterations = it;
        if (!solve_reference(P, ref, n, coeffs, level)) return out;
        const ChebPoly p(P.lo, P.hi, coeffs);
        const std::vector<double> r = residuals(P, p);
        double rmax = 0.0;
        for (double v : r) rmax = std::max(rmax, std::abs(v));
        const double dev = rmax - std::abs(level);
        if (dev < best_dev) {
            best_dev = dev;
            out.coeffs = coeffs;
            out.level = level;
            out.ref = ref;
        }
        if (dev <= opt.tol * std::max(1.0, rmax)) {
            out.ok = true;
            return out;
        }

        // Multiple exchange when it accepts a full alternating set and does
        // not shrink the level; otherwise fall back to single exchange,
        // which always makes progress on a finite grid.
        bool stepped = false;
        std::vector<int> next;
        if (alternating_reference(r, n, next) && next != ref) {
            std::vector<double> cand_coeffs;
            double cand_level = 0.0;
            if (solve_reference(P, next, n, cand_coeffs, cand_level) &&
                std::abs(cand_level) >= std::abs(level) * (1.0 - 1e-12)) {
                ref = std::move(next);
                stepped = true;
            }
        }
        if (!stepped) {
            std::vector<int> bumped = ref;
            if (!single_exchange(bumped, r, level)) {
                out.ok = best_dev <= 1e3 * opt.tol * std::max(1.0, rmax);
                return out;
            }
            ref = std::move(bumped);
        }
    }
    return out;
}

inline SolveOutcome lp_solve(const DiscreteProblem& P, int n) {
    SolveOutcome out;
    std::vector<int> active;
    for (int k = 0; k < static_cast<int>(P.x.size()); ++k)
        if (P.wx[static_cast<std::size_t>(k)] > 0.0) active.push_back(k);
    const std::size_t K = active.size();
    if (K == 0) return out;
    const std::size_t rows = static_cast<std::size_t>(n) + 1;
    const std::size_t cols = 2 * K;

    // Dual of min_e { |w_k (f_k - p(x_k))| <= e }: equality-form LP whose
    // duals recover the polynomial coefficients and the level.
    std::vector<double> A(rows * cols, 0.0), b(rows, 0.0), c(cols, 0.0);
    for (std::size_t j = 0; j < K; ++j) {
        const std::size_t k = static_cast<std::size_t>(active[j]);
        const double w = P.wx[k];
        const double u = (2.0 * P.x[k] - P.lo - P.hi) / (P.hi - P.lo);
        for (int i = 0; i < n; ++i) {
            const double a = w * chebval_basis(i, u);
            A[static_cast<std::size_t>(i) * cols + j] = a;       // mu column
            A[static_cast<std::size_t>(i) * cols + K + j] = -a;  // nu column
        }
        A[static_cast<std::size_t>(n) * cols + j] = 1.0;
        A[static_cast<std::size_t>(n) * cols + K + j] = 1.0;
        c[j] = -w * P.fx[k];
        c[K + j] = w * P.fx[k];
    }
    b[static_cast<std::size_t>(n)] = 1.0;

    const LpResult lp = lp_solve_standard(std::move(A), rows, cols, std::move(b), std::move(c));
    if (lp.status != LpResult::Status::optimal || lp.duals.size() != rows) return out;
    out.coeffs.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.coeffs[static_cast<std::size_t>(i)] = -lp.duals[static_cast<std::size_t>(i)];
    out.level = -lp.duals[rows - 1];
    out.iterations = 1;
    out.ok = true;
    return out;
}

}  // namespace detail

/// Discrete weighted minimax on explicit points: exchange iteration with an
/// LP fallback. The reported error is the max weighted residual over the
/// points, a lower bound for the continuous problem.
inline MinimaxResult best_weighted_approx_on_points(const TargetFunction& f, const Weight& w,
                                                    std::span<const double> pts, int n,
                                                    double lo, double hi,
                                                    const MinimaxOptions& opt = {}) {
    if (n < 1) throw std::invalid_argument("best_weighted_approx: n >= 1");
    if (pts.size() < 2) throw std::invalid_argument("best_weighted_approx: too few grid points");
    detail::DiscreteProblem P;
    P.lo = lo;
    P.hi = hi;
    P.x.assign(pts.begin(), pts.end());
    P.fx.resize(P.x.size());
    P.wx.resize(P.x.size());
    double wmax = 0.0;
    for (std::size_t k = 0; k < P.x.size(); ++k) {
        P.fx[k] = f(P.x[k]);
        P.wx[k] = w(P.x[k]);
        wmax = std::max(wmax, P.wx[k]);
        if (!std::isfinite(P.fx[k]) || !std::isfinite(P.wx[k]))
            throw std::invalid_argument("best_weighted_approx: non-finite sample (singular point in grid?)");
    }
    if (wmax <= 0.0) throw std::invalid_argument("best_weighted_approx: weight vanishes on the whole grid");
    for (double& v : P.wx)
        if (v < 1e-14 * wmax) v = 0.0;  // zero-weight points stay as verification-only rows

    MinimaxResult res;
    res.grid_size = static_cast<int>(P.x.size());

    std::size_t npos = 0;
    for (double v : P.wx) npos += v > 0.0;
    if (npos <= static_cast<std::size_t>(n)) {
        // Fewer active constraints than coefficients: interpolate them, E = 0.
        std::vector<double> xs, fs;
        for (std::size_t k = 0; k < P.x.size(); ++k)
            if (P.wx[k] > 0.0) {
                xs.push_back(P.x[k]);
                fs.push_back(P.fx[k]);
            }
        // Newton interpolation evaluated through a lambda, re-expanded.
        std::vector<double> coef = fs;
        for (std::size_t j = 1; j < xs.size(); ++j)
            for (std::size_t i = xs.size(); i-- > j;)
                coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j]);
        const auto newton = [xs, coef](double x) {
            double acc = 0.0;
            for (std::size_t i = xs.size(); i-- > 0;) acc = acc * (x - xs[i]) + coef[i];
            return acc;
        };
        res.poly = ChebPoly::interpolate(newton, n, lo, hi);
        const auto r = detail::residuals(P, res.poly);
        for (double v : r) res.error = std::max(res.error, std::abs(v));
        res.alternations = 0;
        return res;
    }

    detail::SolveOutcome sol;
    if (!opt.force_lp) sol = detail::exchange_solve(P, n, opt);
    if (!sol.ok) {
        sol = detail::lp_solve(P, n);
        res.used_lp = true;
        if (!sol.ok) throw std::runtime_error("best_weighted_approx: exchange and LP both failed");
    }
    res.iterations += sol.iterations;
    res.poly = ChebPoly(lo, hi, sol.coeffs);

    const auto r = detail::residuals(P, res.poly);
    for (double v : r) res.error = std::max(res.error, std::abs(v));

    // Extremal set: the converged reference if available, else grid scan.
    std::vector<int> ref = sol.ref;
    if (ref.empty()) detail::alternating_reference(r, n, ref);
    res.residual_extrema.clear();
    for (int k : ref)
        res.residual_extrema.emplace_back(P.x[static_cast<std::size_t>(k)],
                                          r[static_cast<std::size_t>(k)]);
    int alt = res.residual_extrema.empty() ? 0 : 1;
    for (std::size_t i = 1; i < res.residual_extrema.size(); ++i)
        if (res.residual_extrema[i].second * res.residual_extrema[i - 1].second < 0.0) ++alt;
    res.alternations = alt;
    return res;
}

namespace detail {

inline std::vector<double> approx_grid(const TargetFunction& f, const Weight& w, double lo,
                                       double hi, int n, int count) {
    const int base = std::max({count, 8 * n, n + 2, 33});
    std::vector<double> pts = cheb_x_grid(base, lo, hi);
    for (double z : f.feature_points)
        if (z > lo && z < hi) pts.push_back(z);
    for (double z : w.zero_set())
        if (z > lo && z < hi) pts.push_back(z);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const double tiny = 1e-13 * std::max(1.0, hi - lo);
    std::erase_if(pts, [&](double x) {
        for (double s : f.singular_points)
            if (std::abs(x - s) <= tiny) return true;
        return false;
    });
    return pts;
}

}  // namespace detail

/// E_n(f, I)_w solver: Chebyshev-distributed grid (at least 8n points, plus
/// declared kinks and weight zeros, minus singular points), discrete exchange
/// with LP fallback, then a few off-grid refinement rounds that insert
/// parabolic estimates of the residual extrema back into the grid. Refinement
/// keeps the discrete error a lower bound of the continuous one while
/// recovering the interior extrema a bare 8n grid cannot resolve.
inline MinimaxResult best_weighted_approx(const TargetFunction& f, const Weight& w, Interval I,
                                          int n, int grid_count = 0,
                                          const MinimaxOptions& opt = {}) {
    if (I.empty() || I.length() <= 0.0)
        throw std::invalid_argument("best_weighted_approx: nondegenerate interval required");
    std::vector<double> pts = detail::approx_grid(f, w, I.lo, I.hi, n, grid_count);

    MinimaxResult res = best_weighted_approx_on_points(f, w, pts, n, I.lo, I.hi, opt);
    for (int pass = 0; pass < opt.refine_passes; ++pass) {
        // Around every grid-local maximum of the weighted residual, insert
        // the parabolic vertex estimate plus the two bracketing midpoints
        // (the midpoints guarantee geometric localization even where the
        // residual peak is not parabola-like).
        std::vector<double> extra;
        const auto maybe_add = [&](double x, double xlo, double xhi) {
            if (x <= xlo || x >= xhi) return;
            for (double s : f.singular_points)
                if (std::abs(x - s) <= 1e-13) return;
            extra.push_back(x);
        };
        std::vector<double> absr(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k)
            absr[k] = std::abs(w(pts[k]) * (f(pts[k]) - res.poly(pts[k])));
        for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
            if (absr[k] <= 0.0 || absr[k] < absr[k - 1] || absr[k] < absr[k + 1]) continue;
            const double x0 = pts[k - 1], x1 = pts[k], x2 = pts[k + 1];
            maybe_add(0.5 * (x0 + x1), x0, x1);
            maybe_add(0.5 * (x1 + x2), x1, x2);
            const double d1 = (absr[k] - absr[k - 1]) / (x1 - x0);
            const double d2 = (absr[k + 1] - absr[k]) / (x2 - x1);
            const double curv = (d2 - d1) / (x2 - x0);
            if (curv < 0.0) maybe_add(0.5 * (x0 + x1 - d1 / curv), x0, x2);
        }
        if (extra.empty()) break;
        pts.insert(pts.end(), extra.begin(), extra.end());
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        const int prev_iter = res.iterations;
        const double prev_error = res.error;
        res = best_weighted_approx_on_points(f, w, pts, n, I.lo, I.hi, opt);
        res.iterations += prev_iter;
        if (std::abs(res.error - prev_error) <= 1e-4 * opt.tol * std::max(1.0, res.error) &&
            pass >= 2)
            break;
    }
    return res;
}

enum class NormVariant { phi, phi_n, lambda_n, rho_n };

/// Grid sup of w(x) g(x)^mu |p^{(nu)}(x)| with g one of phi, phi_n, lambda_n,
/// rho_n at scale n_scale.
inline double weighted_poly_norm(const ChebPoly& p, const Weight& w, int nu, double mu,
                                 int n_scale, NormVariant variant, std::span<const double> grid) {
    if (nu < 0 || mu < 0.0) throw std::invalid_argument("weighted_poly_norm: nu, mu >= 0");
    const ChebPoly d = p.derivative(nu);
    double mx = 0.0;
    for (double x : grid) {
        double g = 1.0;
        if (mu != 0.0) {
            switch (variant) {
                case NormVariant::phi: g = phi(x); break;
                case NormVariant::phi_n: g = phi_n(n_scale, x); break;
                case NormVariant::lambda_n: g = lambda_n(n_scale, x); break;
                case NormVariant::rho_n: g = rho_n(n_scale, x); break;
            }
            g = std::pow(g, mu);
        }
        mx = std::max(mx, w(x) * g * std::abs(d(x)));
    }
    return mx;
}

}  // namespace wapprox
