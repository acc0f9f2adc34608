#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "wapprox/geometry.hpp"
#include "wapprox/weight.hpp"

namespace wapprox {

namespace detail {

inline constexpr double kMassFloor = 1e-280;

/// Sliding interval family: every depth d with 2^d <= resolution contributes
/// intervals of length 2^{1-d} at half-length offsets. Families are nested
/// across resolutions, so estimates are non-decreasing under refinement.
inline std::vector<Interval> sliding_family(int resolution) {
    std::vector<Interval> out;
    for (int d = 0; (1 << d) <= resolution; ++d) {
        const double len = std::ldexp(2.0, -d);
        const double step = 0.5 * len;
        for (int j = 0;; ++j) {
            const double lo = -1.0 + j * step;
            const double hi = lo + len;
            if (hi > 1.0) break;
            out.push_back({lo, hi});
        }
    }
    return out;
}

/// Intervals anchored at candidate zeros, with endpoint distances running
/// over geometric scales down to ~resolution^{-3}. The sup defining the A*
/// constant is attained on strongly asymmetric intervals hugging a zero; the
/// sliding family alone resolves those too slowly to cross the diverging
/// threshold, while this depth makes a divergent sup grow by ~2x per
/// resolution doubling.
inline std::vector<Interval> anchored_family(std::span<const double> anchors, int resolution) {
    double smin = 2.0;
    for (int q = resolution; q > 1; q /= 2) smin /= 8.0;
    std::vector<double> scales;
    for (double s = 2.0; s >= smin; s *= std::numbers::sqrt2 / 2.0) scales.push_back(s);

    std::vector<Interval> out;
    for (double z : anchors) {
        for (double s : scales) {
            if (z - s >= kDomainLo) out.push_back({z - s, z});
            if (z + s <= kDomainHi) out.push_back({z, z + s});
            for (double s2 : scales) {
                const Interval I{std::max(z - s, kDomainLo), std::min(z + s2, kDomainHi)};
                if (I.length() > 0.0) out.push_back(I);
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) {
        return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Interval& a, const Interval& b) {
                              return a.lo == b.lo && a.hi == b.hi;
                          }),
              out.end());
    return out;
}

class MassCache {
public:
    explicit MassCache(const Weight& w, double tol) : w_(w), tol_(tol) {}
    double operator()(double lo, double hi) {
        const auto key = std::make_pair(lo, hi);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const double m = w_.mass(lo, hi, tol_);
        cache_.emplace(key, m);
        return m;
    }

private:
    const Weight& w_;
    double tol_;
    std::map<std::pair<double, double>, double> cache_;
};

}  // namespace detail

struct DoublingEstimate {
    double doubling = 0.0;  // max w(2I)/w(I) over the sampled family
    double kappa = 0.0;     // max mass ratio over adjacent equal-length pairs
    bool diverging = false; // zero-mass interval with positive-mass companion
    int resolution = 0;
};

/// Grid estimate of the doubling constant: max of w(2I)/w(I) over the sliding
/// and zero-anchored families, plus the adjacent-interval kappa.
inline DoublingEstimate estimate_doubling_constant(const Weight& w, int resolution) {
    if (resolution < 8) throw std::invalid_argument("estimate_doubling_constant: resolution >= 8");
    detail::MassCache mass(w, 1e-9);
    DoublingEstimate est;
    est.resolution = resolution;

    auto family = detail::sliding_family(resolution);
    std::vector<double> anchors = w.zero_set();
    anchors.push_back(kDomainLo);
    anchors.push_back(kDomainHi);
    const auto anchored = detail::anchored_family(anchors, resolution);
    family.insert(family.end(), anchored.begin(), anchored.end());

    for (const Interval& I : family) {
        const double mI = mass(I.lo, I.hi);
        const double c = I.midpoint();
        const double m2I = mass(std::max(c - I.length(), kDomainLo),
                                std::min(c + I.length(), kDomainHi));
        if (mI <= detail::kMassFloor) {
            if (m2I > detail::kMassFloor) est.diverging = true;
            continue;
        }
        est.doubling = std::max(est.doubling, m2I / mI);
    }

    // Adjacent equal-length pairs from the sliding grid.
    for (int d = 0; (1 << d) <= resolution; ++d) {
        const double len = std::ldexp(2.0, -d);
        const double step = 0.5 * len;
        for (int j = 0;; ++j) {
            const double lo = -1.0 + j * step;
            if (lo + 2.0 * len > 1.0) break;
            const double m1 = mass(lo, lo + len);
            const double m2 = mass(lo + len, lo + 2.0 * len);
            if (m1 <= detail::kMassFloor || m2 <= detail::kMassFloor) {
                if (m1 > detail::kMassFloor || m2 > detail::kMassFloor) est.diverging = true;
                continue;
            }
            est.kappa = std::max({est.kappa, m1 / m2, m2 / m1});
        }
    }
    return est;
}

struct AstarEstimate {
    double astar = 0.0;  // max of max{w(a),w(b)} (b-a)/w[a,b]
    bool diverging = false;
    int resolution = 0;
};

/// Grid estimate of the A* constant via the endpoint characterization
/// max{w(a), w(b)} <= (L*/(b-a)) w[a,b].
inline AstarEstimate estimate_astar_constant(const Weight& w, int resolution) {
    if (resolution < 8) throw std::invalid_argument("estimate_astar_constant: resolution >= 8");
    detail::MassCache mass(w, 1e-9);
    AstarEstimate est;
    est.resolution = resolution;

    auto family = detail::sliding_family(resolution);
    std::vector<double> anchors = w.zero_set();
    anchors.push_back(kDomainLo);
    anchors.push_back(kDomainHi);
    const auto anchored = detail::anchored_family(anchors, resolution);
    family.insert(family.end(), anchored.begin(), anchored.end());

    for (const Interval& I : family) {
        const double wa = w(I.lo);
        const double wb = w(I.hi);
        const double peak = std::max(wa, wb);
        if (peak <= 0.0) continue;  // zero endpoint values contribute nothing
        const double m = mass(I.lo, I.hi);
        if (m <= detail::kMassFloor) {
            est.diverging = true;
            continue;
        }
        est.astar = std::max(est.astar, peak * I.length() / m);
    }
    return est;
}

/// w_n(x) = rho_n(x)^{-1} int_{x-rho_n}^{x+rho_n} w, with w = 0 off [-1,1].
inline double averaged_weight(const Weight& w, int n, double x) {
    if (n < 1) throw std::invalid_argument("averaged_weight: n >= 1");
    if (x < kDomainLo || x > kDomainHi)
        throw std::invalid_argument("averaged_weight: x must lie in [-1,1]");
    const double r = rho_n(n, x);
    return w.mass(x - r, x + r, 1e-9) / r;
}

inline std::vector<double> averaged_weight_profile(const Weight& w, int n,
                                                   std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = averaged_weight(w, n, xs[i]);
    return out;
}

struct WStarResult {
    double c_star = 1.0;  // min over sampled pairs of min(w(x)/w(y), w(y)/w(x))
    bool vacuous = false; // I_{A,1/n} was empty
    long pairs = 0;
};

/// Samples the Definition-level ratio condition at scale n: pairs x,y with
/// [x,y] inside I_{A,1/n} and |x-y| <= B rho_n(x). Besides a Chebyshev base
/// grid, pairs are clustered around descent-refined local minima of w (and
/// component endpoints), so zeros hiding inside the main set collapse the
/// estimate instead of slipping between grid points.
inline WStarResult check_wstar_condition(const Weight& w, const ZSet& Z, int n, double A, double B,
                                         int samples) {
    if (n < 1 || A <= 0.0 || B <= 0.0) throw std::invalid_argument("check_wstar_condition: bad args");
    const IntervalSet I = main_set(Z, A, 1.0 / n);
    WStarResult res;
    if (I.empty()) {
        res.vacuous = true;
        return res;
    }

    const auto offsets = {1.0, 0.5, 0.25};
    const auto consider_pair = [&](double x, double y) {
        if (!I.contains_segment(std::min(x, y), std::max(x, y))) return;
        const double wx = w(x);
        const double wy = w(y);
        if (wx <= 0.0 && wy <= 0.0) return;
        ++res.pairs;
        if (wx <= 0.0 || wy <= 0.0) {
            res.c_star = 0.0;
            return;
        }
        res.c_star = std::min(res.c_star, std::min(wx / wy, wy / wx));
    };
    const auto probe = [&](double x) {
        if (!I.contains(x)) return;
        const double rn = rho_n(n, x);
        for (double u : offsets) {
            consider_pair(x, x + u * B * rn);
            consider_pair(x, x - u * B * rn);
        }
    };

    const std::vector<double> base = cheb_x_grid(std::max(samples, 32));
    std::vector<double> kept;
    for (double x : base)
        if (I.contains(x)) kept.push_back(x);
    for (double x : kept) probe(x);

    // Cluster seeds: local minima of w over the base grid plus component ends.
    std::vector<double> seeds;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const double v = w(kept[i]);
        const double vl = i > 0 ? w(kept[i - 1]) : v + 1.0;
        const double vr = i + 1 < kept.size() ? w(kept[i + 1]) : v + 1.0;
        if (v <= vl && v <= vr) seeds.push_back(kept[i]);
    }
    for (const Interval& part : I.parts()) {
        seeds.push_back(part.lo);
        seeds.push_back(part.hi);
    }

    int descent_steps = 3;
    for (int m = 1; m < n; m *= 2) ++descent_steps;
    for (double seed : seeds) {
        const Interval* home = nullptr;
        for (const Interval& part : I.parts())
            if (part.contains(seed)) home = &part;
        if (!home) continue;
        double c = seed;
        double s = rho_n(n, seed);
        for (int it = 0; it < 2 * descent_steps; ++it) {
            const double lo = std::max(home->lo, c - s);
            const double hi = std::min(home->hi, c + s);
            double best = c, bv = w(c);
            if (w(lo) < bv) { best = lo; bv = w(lo); }
            if (w(hi) < bv) { best = hi; bv = w(hi); }
            c = best;
            s *= 0.5;
        }
        double d = rho_n(n, c);
        for (int i = 0; i <= descent_steps; ++i) {
            probe(std::max(home->lo, c - d));
            probe(std::min(home->hi, c + d));
            d *= 0.25;
        }
        probe(c);
    }
    return res;
}

struct WeightClassReport {
    std::vector<int> resolutions;
    std::vector<double> doubling;
    std::vector<double> kappa;
    std::vector<double> astar;
    bool doubling_diverging = false;
    bool astar_diverging = false;

    [[nodiscard]] double doubling_estimate() const { return doubling.back(); }
    [[nodiscard]] double astar_estimate() const { return astar.back(); }
    [[nodiscard]] bool diverging() const { return doubling_diverging || astar_diverging; }

    [[nodiscard]] nlohmann::json to_json() const {
        return nlohmann::json{{"resolutions", resolutions}, {"doubling", doubling},
                              {"kappa", kappa},             {"astar", astar},
                              {"doubling_diverging", doubling_diverging},
                              {"astar_diverging", astar_diverging}};
    }
};

/// Runs both constant estimators across a resolution ladder. "Diverging"
/// means a hard zero-mass flag, or growth above 1.5x for two consecutive
/// resolution doublings (sup-divergence rather than slow convergence).
inline WeightClassReport classify_weight(const Weight& w, std::span<const int> resolutions) {
    if (resolutions.size() < 3)
        throw std::invalid_argument("classify_weight: need at least 3 resolutions");
    WeightClassReport rep;
    for (int res : resolutions) {
        const auto d = estimate_doubling_constant(w, res);
        const auto a = estimate_astar_constant(w, res);
        rep.resolutions.push_back(res);
        rep.doubling.push_back(d.doubling);
        rep.kappa.push_back(d.kappa);
        rep.astar.push_back(a.astar);
        rep.doubling_diverging = rep.doubling_diverging || d.diverging;
        rep.astar_diverging = rep.astar_diverging || a.diverging;
    }
    const auto growth_rule = [](const std::vector<double>& e) {
        for (std::size_t i = 0; i + 2 < e.size(); ++i)
            if (e[i] > 0.0 && e[i + 1] > 1.5 * e[i] && e[i + 2] > 1.5 * e[i + 1]) return true;
        return false;
    };
    rep.doubling_diverging = rep.doubling_diverging || growth_rule(rep.doubling) ||
                             growth_rule(rep.kappa);
    rep.astar_diverging = rep.astar_diverging || growth_rule(rep.astar);
    return rep;
}

}  // namespace wapprox
