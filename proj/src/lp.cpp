#include "noisyauth/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace noisyauth {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
    // rows x (cols + 1); last column is the rhs.
    std::size_t rows, cols;
    std::vector<std::vector<double>> t;
    std::vector<std::size_t> basis;  // basic variable of each row

    void pivot(std::size_t pr, std::size_t pc) {
        double piv = t[pr][pc];
        for (double& v : t[pr]) v /= piv;
        for (std::size_t r = 0; r <= rows; ++r) {
            if (r == pr) continue;
            double f = t[r][pc];
            if (std::fabs(f) < kPivotTol) continue;
            for (std::size_t cidx = 0; cidx <= cols; ++cidx)
                t[r][cidx] -= f * t[pr][cidx];
        }
        basis[pr] = pc;
    }

    // Runs the simplex on the current objective row (row index rows).
    // Bland's rule on `active` columns. Returns false if unbounded.
    bool optimize(std::size_t active_cols) {
        for (;;) {
            std::size_t pc = active_cols;
            for (std::size_t cidx = 0; cidx < active_cols; ++cidx) {
                if (t[rows][cidx] < -kPivotTol) { pc = cidx; break; }
            }
            if (pc == active_cols) return true;
            std::size_t pr = rows;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows; ++r) {
                if (t[r][pc] > kPivotTol) {
                    double ratio = t[r][cols] / t[r][pc];
                    if (ratio < best_ratio - kPivotTol ||
                        (ratio < best_ratio + kPivotTol &&
                         (pr == rows || basis[r] < basis[pr]))) {
                        best_ratio = ratio;
                        pr = r;
                    }
                }
            }
            if (pr == rows) return false;
            pivot(pr, pc);
        }
    }
};

}  // namespace

LpResult simplex_solve(const std::vector<std::vector<double>>& a,
                       const std::vector<double>& b,
                       const std::vector<double>& c) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    for (std::size_t r = 0; r < m; ++r) {
        if (a[r].size() != n) throw std::invalid_argument("lp: ragged constraint matrix");
        if (b[r] < 0.0) throw std::invalid_argument("lp: negative rhs");
    }

    // Columns: n structural + m artificial, then rhs.
    Tableau tab;
    tab.rows = m;
    tab.cols = n + m;
    tab.t.assign(m + 1, std::vector<double>(tab.cols + 1, 0.0));
    tab.basis.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t cidx = 0; cidx < n; ++cidx) tab.t[r][cidx] = a[r][cidx];
        tab.t[r][n + r] = 1.0;
        tab.t[r][tab.cols] = b[r];
        tab.basis[r] = n + r;
    }

    // Phase 1: minimize the sum of artificials.
    for (std::size_t cidx = 0; cidx <= tab.cols; ++cidx) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += tab.t[r][cidx];
        tab.t[m][cidx] = (cidx >= n && cidx < n + m) ? 0.0 : -s;
    }
    if (!tab.optimize(tab.cols)) return {LpStatus::Unbounded, 0.0, {}};
    if (tab.t[m][tab.cols] < -1e-8) return {LpStatus::Infeasible, 0.0, {}};

    // Drive any artificial still in the basis out (degenerate rows).
    for (std::size_t r = 0; r < m; ++r) {
        if (tab.basis[r] >= n) {
            std::size_t pc = n;
            for (std::size_t cidx = 0; cidx < n; ++cidx) {
                if (std::fabs(tab.t[r][cidx]) > kPivotTol) { pc = cidx; break; }
            }
            if (pc < n) tab.pivot(r, pc);
        }
    }

    // Phase 2 objective (reduced against the current basis), artificials frozen.
    for (std::size_t cidx = 0; cidx <= tab.cols; ++cidx) {
        double v = (cidx < n) ? c[cidx] : 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            if (tab.basis[r] < n) v -= c[tab.basis[r]] * tab.t[r][cidx];
        }
        tab.t[m][cidx] = v;
    }
    if (!tab.optimize(n)) return {LpStatus::Unbounded, 0.0, {}};

    LpResult res;
    res.status = LpStatus::Optimal;
    res.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (tab.basis[r] < n) res.x[tab.basis[r]] = tab.t[r][tab.cols];
    }
    res.objective = 0.0;
    for (std::size_t cidx = 0; cidx < n; ++cidx) res.objective += c[cidx] * res.x[cidx];
    return res;
}

}  // namespace noisyauth
