#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wapprox {

/// Dense Gaussian elimination with partial pivoting; A is row-major n x n.
/// Returns false when the matrix is numerically singular.
inline bool gauss_solve(std::vector<double> A, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    if (A.size() != n * n) throw std::invalid_argument("gauss_solve: shape mismatch");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(A[perm[col] * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(A[perm[r] * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-300) return false;
        std::swap(perm[col], perm[piv]);
        const double diag = A[perm[col] * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = A[perm[r] * n + col] / diag;
            if (factor == 0.0) continue;
            A[perm[r] * n + col] = 0.0;
            for (std::size_t c = col + 1; c < n; ++c) A[perm[r] * n + c] -= factor * A[perm[col] * n + c];
            b[perm[r]] -= factor * b[perm[col]];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[perm[i]];
        for (std::size_t c = i + 1; c < n; ++c) s -= A[perm[i] * n + c] * x[c];
        x[i] = s / A[perm[i] * n + i];
    }
    return true;
}

struct LpResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit };
    Status status = Status::iteration_limit;
    double objective = 0.0;
    std::vector<double> x;
    std::vector<int> basis;     // basic column per row
    std::vector<double> duals;  // y with A^T y <= c at optimum
};

/// Two-phase dense tableau simplex with Bland's rule:
///   min c'x  s.t.  A x = b, x >= 0   (A row-major m x n).
inline LpResult lp_solve_standard(std::vector<double> A, std::size_t m, std::size_t n,
                                  std::vector<double> b, std::vector<double> c,
                                  int max_iter = 50000) {
    if (A.size() != m * n || b.size() != m || c.size() != n)
        throw std::invalid_argument("lp_solve_standard: shape mismatch");
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0.0) {
            b[i] = -b[i];
            for (std::size_t j = 0; j < n; ++j) A[i * n + j] = -A[i * n + j];
        }
    }

    // Column equilibration; duals are invariant, x is unscaled at the end.
    std::vector<double> colscale(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        double mx = 0.0;
        for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, std::abs(A[i * n + j]));
        if (mx > 0.0) {
            colscale[j] = 1.0 / mx;
            for (std::size_t i = 0; i < m; ++i) A[i * n + j] *= colscale[j];
            c[j] *= colscale[j];
        }
    }

    const std::size_t total = n + m;  // artificials appended
    std::vector<double> T((m + 1) * (total + 1), 0.0);
    const auto at = [&](std::size_t r, std::size_t col) -> double& { return T[r * (total + 1) + col]; };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) at(i, j) = A[i * n + j];
        at(i, n + i) = 1.0;
        at(i, total) = b[i];
    }
    std::vector<int> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = static_cast<int>(n + i);

    const double eps = 1e-10;
    const auto pivot = [&](std::size_t prow, std::size_t pcol) {
        const double pv = at(prow, pcol);
        for (std::size_t j = 0; j <= total; ++j) at(prow, j) /= pv;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == prow) continue;
            const double f = at(r, pcol);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= total; ++j) at(r, j) -= f * at(prow, j);
        }
        basis[prow] = static_cast<int>(pcol);
    };

    // Dantzig pricing until the objective stalls, then Bland (anti-cycling).
    const auto run_phase = [&](std::size_t ncols, int& iters) {
        const int stall_limit = 4 * static_cast<int>(m) + 40;
        int stall = 0;
        double last_obj = at(m, total);
        while (iters-- > 0) {
            const bool bland = stall >= stall_limit;
            std::size_t pcol = total + 1;
            double most_neg = -eps;
            for (std::size_t j = 0; j < ncols; ++j) {
                const double rc = at(m, j);
                if (rc < most_neg) {
                    pcol = j;
                    if (bland) break;
                    most_neg = rc;
                }
            }
            if (pcol == total + 1) return true;  // optimal
            std::size_t prow = m;
            double best_ratio = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                const double a = at(r, pcol);
                if (a > eps) {
                    const double ratio = at(r, total) / a;
                    if (prow == m || ratio < best_ratio - 1e-15 ||
                        (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] < basis[prow])) {
                        prow = r;
                        best_ratio = ratio;
                    }
                }
            }
            if (prow == m) return false;  // unbounded direction
            pivot(prow, pcol);
            const double obj = at(m, total);
            if (std::abs(obj - last_obj) > 1e-13 * (1.0 + std::abs(last_obj))) {
                stall = 0;
                last_obj = obj;
            } else {
                ++stall;
            }
        }
        return true;  // iteration cap; caller inspects
    };

    LpResult out;
    int iters = max_iter;

    // Phase 1: minimize sum of artificials.
    for (std::size_t j = 0; j <= total; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += at(i, j);
        at(m, j) = (j >= n && j < total) ? 1.0 - s : -s;
    }
    run_phase(total, iters);
    if (iters <= 0) {
        out.status = LpResult::Status::iteration_limit;
        return out;
    }
    if (at(m, total) < -1e-7) {
        out.status = LpResult::Status::infeasible;
        return out;
    }
    // Drive lingering artificial basics out where possible.
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] >= static_cast<int>(n)) {
            for (std::size_t j = 0; j < n; ++j) {
                if (std::abs(at(r, j)) > eps) {
                    pivot(r, j);
                    break;
                }
            }
        }
    }

    // Phase 2 objective row. Artificials keep cost 0: they can never enter
    // (run_phase scans only the first n columns) and a lingering degenerate
    // basic artificial just marks a redundant row.
    for (std::size_t j = 0; j <= total; ++j) at(m, j) = 0.0;
    for (std::size_t j = 0; j < n; ++j) at(m, j) = c[j];
    for (std::size_t r = 0; r < m; ++r) {
        const int bc = basis[r];
        const double cb = at(m, static_cast<std::size_t>(bc));
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= total; ++j) at(m, j) -= cb * at(r, j);
    }
    const bool bounded = run_phase(n, iters);
    if (iters <= 0) {
        out.status = LpResult::Status::iteration_limit;
        return out;
    }
    if (!bounded) {
        out.status = LpResult::Status::unbounded;
        return out;
    }

    out.status = LpResult::Status::optimal;
    out.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < static_cast<int>(n)) out.x[static_cast<std::size_t>(basis[r])] = at(r, total);
    out.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) out.objective += c[j] * out.x[j];
    for (std::size_t j = 0; j < n; ++j) out.x[j] *= colscale[j];
    out.basis = basis;

    // Duals from the final basis: solve B^T y = c_B with original columns.
    {
        std::vector<double> Bt(m * m, 0.0), cb(m, 0.0);
        bool ok = true;
        for (std::size_t r = 0; r < m; ++r) {
            const int col = basis[r];
            if (col >= static_cast<int>(n)) {
                // artificial basic (degenerate feasible row): unit column, zero cost
                Bt[r * m + static_cast<std::size_t>(col - static_cast<int>(n))] = 1.0;
                cb[r] = 0.0;
                continue;
            }
            for (std::size_t i = 0; i < m; ++i)
                Bt[r * m + i] = A[i * n + static_cast<std::size_t>(col)];
            cb[r] = c[static_cast<std::size_t>(col)];
        }
        std::vector<double> y;
        ok = gauss_solve(std::move(Bt), std::move(cb), y);
        if (ok) out.duals = std::move(y);
    }
    return out;
}

}  // namespace wapprox
