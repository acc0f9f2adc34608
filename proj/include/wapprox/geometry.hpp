#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace wapprox {

inline constexpr double kDomainLo = -1.0;
inline constexpr double kDomainHi = 1.0;

/// phi(x) = sqrt(1-x^2), clamped so values just outside [-1,1] give 0.
[[nodiscard]] inline double phi(double x) {
    return std::sqrt(std::max(0.0, 1.0 - x * x));
}

/// rho(h,x) = h*phi(x) + h^2, the step scale of all neighborhoods.
[[nodiscard]] inline double rho(double h, double x) {
    return h * phi(x) + h * h;
}

/// rho_n = rho(1/n, .)
[[nodiscard]] inline double rho_n(int n, double x) {
    return rho(1.0 / n, x);
}

[[nodiscard]] inline double phi_n(int n, double x) {
    return phi(x) + 1.0 / n;
}

[[nodiscard]] inline double lambda_n(int n, double x) {
    return std::max(phi(x), 1.0 / n);
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double length() const { return hi - lo; }
    [[nodiscard]] double midpoint() const { return 0.5 * (lo + hi); }
    [[nodiscard]] bool empty() const { return lo > hi; }
    [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
    [[nodiscard]] bool contains_segment(double a, double b) const {
        return lo <= a && b <= hi;
    }
};

[[nodiscard]] inline Interval intersect(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

/// Sorted union of disjoint closed intervals inside [-1,1].
class IntervalSet {
public:
    IntervalSet() = default;

    static IntervalSet from_intervals(std::vector<Interval> parts) {
        std::erase_if(parts, [](const Interval& I) { return I.empty(); });
        std::sort(parts.begin(), parts.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> merged;
        for (const Interval& I : parts) {
            if (!merged.empty() && I.lo <= merged.back().hi) {
                merged.back().hi = std::max(merged.back().hi, I.hi);
            } else {
                merged.push_back(I);
            }
        }
        IntervalSet s;
        s.parts_ = std::move(merged);
        return s;
    }

    [[nodiscard]] bool empty() const { return parts_.empty(); }
    [[nodiscard]] const std::vector<Interval>& parts() const { return parts_; }

    [[nodiscard]] bool contains(double x) const {
        for (const Interval& I : parts_) {
            if (x < I.lo) return false;
            if (x <= I.hi) return true;
        }
        return false;
    }

    /// True when [a,b] lies inside a single component. Components are
    /// separated by open gaps, so this is exactly segment containment in the
    /// union.
    [[nodiscard]] bool contains_segment(double a, double b) const {
        if (a > b) std::swap(a, b);
        for (const Interval& I : parts_) {
            if (b <= I.hi) return I.lo <= a;
            if (a < I.lo) return false;
            if (a <= I.hi) return false;  // starts inside, ends beyond
        }
        return false;
    }

private:
    std::vector<Interval> parts_;
};

/// Ordered singular-point set Z = (z_1 < ... < z_M) in [-1,1].
class ZSet {
public:
    explicit ZSet(std::vector<double> points) : pts_(std::move(points)) {
        if (pts_.empty()) throw std::invalid_argument("ZSet: needs at least one point");
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            if (pts_[i] < kDomainLo || pts_[i] > kDomainHi)
                throw std::invalid_argument("ZSet: point outside [-1,1]");
            if (i > 0 && pts_[i] <= pts_[i - 1])
                throw std::invalid_argument("ZSet: points must be strictly increasing");
        }
    }

    [[nodiscard]] int size() const { return static_cast<int>(pts_.size()); }
    [[nodiscard]] double operator[](int j) const { return pts_[static_cast<std::size_t>(j)]; }
    [[nodiscard]] const std::vector<double>& points() const { return pts_; }

    /// D = smallest positive gap among consecutive points with sentinels
    /// z_0 = -1 and z_{M+1} = 1; zero gaps (endpoint coincidences) ignored.
    [[nodiscard]] double spacing() const {
        double d = 4.0;
        double prev = kDomainLo;
        for (double z : pts_) {
            const double gap = z - prev;
            if (gap > 0.0) d = std::min(d, gap);
            prev = z;
        }
        const double last = kDomainHi - prev;
        if (last > 0.0) d = std::min(d, last);
        return d;
    }

private:
    std::vector<double> pts_;
};

/// Z_{A,h}^j = {x in [-1,1] : |x - z_j| <= A rho(h, z_j)}, j zero-based here.
[[nodiscard]] inline Interval singular_neighborhood(const ZSet& Z, int j, double A, double h) {
    const double z = Z[j];
    const double rad = A * rho(h, z);
    return intersect({z - rad, z + rad}, {kDomainLo, kDomainHi});
}

/// I_{A,h} = closure of [-1,1] minus the union of all Z_{A,h}^j.
[[nodiscard]] inline IntervalSet main_set(const ZSet& Z, double A, double h) {
    struct Gap {
        double lo, hi;
    };
    std::vector<Gap> holes;
    holes.reserve(static_cast<std::size_t>(Z.size()));
    for (int j = 0; j < Z.size(); ++j) {
        const double z = Z[j];
        const double rad = A * rho(h, z);
        holes.push_back({z - rad, z + rad});
    }
    // Radii vary with phi(z_j), so hole left endpoints need not be sorted.
    std::sort(holes.begin(), holes.end(),
              [](const Gap& a, const Gap& b) { return a.lo < b.lo; });
    std::vector<Interval> parts;
    double cursor = kDomainLo;
    for (const Gap& g : holes) {
        if (g.lo > cursor) parts.push_back({cursor, std::min(g.lo, kDomainHi)});
        cursor = std::max(cursor, g.hi);
        if (cursor >= kDomainHi) break;
    }
    if (cursor < kDomainHi) parts.push_back({cursor, kDomainHi});
    return IntervalSet::from_intervals(std::move(parts));
}

/// Stencil admissibility: [x - r h phi(x)/2, x + r h phi(x)/2] inside I_{A,h}.
[[nodiscard]] inline bool in_difference_domain(const ZSet& Z, double A, double h, int r, double x) {
    const double half = 0.5 * r * h * phi(x);
    return main_set(Z, A, h).contains_segment(x - half, x + half);
}

/// Dom(A,h,r) materialized as the admitted subset of the supplied grid.
[[nodiscard]] inline std::vector<double> difference_domain(const ZSet& Z, double A, double h,
                                                           int r, std::span<const double> grid) {
    const IntervalSet I = main_set(Z, A, h);
    std::vector<double> kept;
    kept.reserve(grid.size());
    for (double x : grid) {
        const double half = 0.5 * r * h * phi(x);
        if (I.contains_segment(x - half, x + half)) kept.push_back(x);
    }
    return kept;
}

/// Chebyshev partition x_i = cos(i pi / n), returned descending: x_0 = 1 down
/// to x_n = -1.
[[nodiscard]] inline std::vector<double> chebyshev_partition(int n) {
    if (n < 1) throw std::invalid_argument("chebyshev_partition: n >= 1");
    std::vector<double> x(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) x[static_cast<std::size_t>(i)] = std::cos(i * std::numbers::pi / n);
    x.front() = 1.0;
    x.back() = -1.0;
    if (n % 2 == 0) x[static_cast<std::size_t>(n) / 2] = 0.0;
    return x;
}

/// Ascending grid of m points on [a,b], Chebyshev-distributed (images of
/// uniformly spaced angles, endpoints included). Odd m puts the midpoint in
/// the grid.
[[nodiscard]] inline std::vector<double> cheb_x_grid(int m, double a = kDomainLo,
                                                     double b = kDomainHi) {
    if (m < 1) throw std::invalid_argument("cheb_x_grid: m >= 1");
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    if (m == 1) return {mid};
    std::vector<double> x(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        x[static_cast<std::size_t>(j)] = mid - half * std::cos(j * std::numbers::pi / (m - 1));
    x.front() = a;
    x.back() = b;
    if (m % 2 == 1) x[static_cast<std::size_t>(m) / 2] = mid;
    return x;
}

/// Geometric h-ladder {t theta^k, k = 0..m-1}, descending from t.
[[nodiscard]] inline std::vector<double> geometric_h_grid(double t, int m, double theta = 0.85) {
    if (t <= 0.0 || m < 1 || theta <= 0.0 || theta >= 1.0)
        throw std::invalid_argument("geometric_h_grid: bad parameters");
    std::vector<double> h(static_cast<std::size_t>(m));
    double v = t;
    for (int k = 0; k < m; ++k) {
        h[static_cast<std::size_t>(k)] = v;
        v *= theta;
    }
    return h;
}

}  // namespace wapprox
