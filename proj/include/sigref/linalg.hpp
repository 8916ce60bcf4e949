#pragma once

#include "sigref/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace sigref {

// maximize c.x  subject to  A x = b, x >= 0.
struct LinearProgram {
    std::vector<std::vector<rat>> A;
    std::vector<rat> b;
    std::vector<rat> c;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
    LPStatus status = LPStatus::Infeasible;
    rat objective;
    std::vector<rat> x;
};

namespace detail {

// Exact primal simplex on a dense tableau with Bland's rule, so it terminates
// on degenerate instances. Sizes here are tiny (beliefs over <= 5 types).
class SimplexTableau {
public:
    SimplexTableau(const LinearProgram& lp, std::size_t n_artificial)
        : rows_(lp.A.size()), cols_(lp.c.size() + n_artificial) {
        tab_.assign(rows_ + 1, std::vector<rat>(cols_ + 1, rat(0)));
        basis_.assign(rows_, 0);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < lp.c.size(); ++j) tab_[i][j] = lp.A[i][j];
            tab_[i][cols_] = lp.b[i];
            if (tab_[i][cols_] < 0)
                for (auto& v : tab_[i]) v = -v;
        }
    }

    std::vector<std::vector<rat>> tab_;
    std::vector<std::size_t> basis_;
    std::size_t rows_, cols_;

    void set_objective(const std::vector<rat>& c) {
        for (std::size_t j = 0; j <= cols_; ++j) tab_[rows_][j] = j < c.size() ? -c[j] : rat(0);
        for (std::size_t i = 0; i < rows_; ++i) {
            const rat coeff = basis_[i] < c.size() ? c[basis_[i]] : rat(0);
            if (coeff == 0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) tab_[rows_][j] += coeff * tab_[i][j];
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const rat piv = tab_[row][col];
        for (auto& v : tab_[row]) v /= piv;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == row || tab_[i][col] == 0) continue;
            const rat factor = tab_[i][col];
            for (std::size_t j = 0; j <= cols_; ++j) tab_[i][j] -= factor * tab_[row][j];
        }
        basis_[row] = col;
    }

    // Returns false when unbounded. allowed(j) gates entering columns.
    template <typename Allowed>
    bool run(Allowed allowed) {
        for (;;) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < cols_; ++j)
                if (allowed(j) && tab_[rows_][j] < 0) { enter = j; break; }
            if (enter == cols_) return true;
            std::size_t leave = rows_;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (tab_[i][enter] <= 0) continue;
                if (leave == rows_) { leave = i; continue; }
                const rat lhs = tab_[i][cols_] * tab_[leave][enter];
                const rat rhs = tab_[leave][cols_] * tab_[i][enter];
                if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
            }
            if (leave == rows_) return false;
            pivot(leave, enter);
        }
    }
};

} // namespace detail

inline LPResult solve_lp(const LinearProgram& lp) {
    const std::size_t m = lp.A.size();
    const std::size_t n = lp.c.size();
    detail::SimplexTableau t(lp, m);
    // Phase 1: artificial variable per row, minimize their sum.
    std::vector<rat> phase1(n + m, rat(0));
    for (std::size_t i = 0; i < m; ++i) {
        t.tab_[i][n + i] = 1;
        t.basis_[i] = n + i;
        phase1[n + i] = -1;
    }
    t.set_objective(phase1);
    t.run([](std::size_t) { return true; });
    if (t.tab_[m][t.cols_] != 0) return {LPStatus::Infeasible, rat(0), {}};
    // Drive any artificial still basic (at zero) out of the basis.
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis_[i] < n) continue;
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j)
            if (t.tab_[i][j] != 0) { col = j; break; }
        if (col < n) t.pivot(i, col);
        // else the row is all-zero over real variables: redundant constraint.
    }
    // Phase 2 over the real columns only.
    std::vector<rat> phase2(lp.c);
    phase2.resize(n + m, rat(0));
    t.set_objective(phase2);
    const bool bounded = t.run([n](std::size_t j) { return j < n; });
    LPResult result;
    if (!bounded) {
        result.status = LPStatus::Unbounded;
        return result;
    }
    result.status = LPStatus::Optimal;
    result.x.assign(n, rat(0));
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis_[i] < n) result.x[t.basis_[i]] = t.tab_[i][t.cols_];
    result.objective = t.tab_[m][t.cols_];
    return result;
}

// Feasibility of { A_eq x = b_eq, A_ge x >= b_ge, x >= 0 }; slack variables
// turn the inequalities into equalities.
inline std::optional<std::vector<rat>> feasible_point(std::vector<std::vector<rat>> a_eq,
                                                      std::vector<rat> b_eq,
                                                      const std::vector<std::vector<rat>>& a_ge,
                                                      const std::vector<rat>& b_ge) {
    const std::size_t n = a_eq.empty() ? (a_ge.empty() ? 0 : a_ge[0].size()) : a_eq[0].size();
    const std::size_t slacks = a_ge.size();
    LinearProgram lp;
    lp.c.assign(n + slacks, rat(0));
    for (auto& row : a_eq) row.resize(n + slacks, rat(0));
    lp.A = std::move(a_eq);
    lp.b = std::move(b_eq);
    for (std::size_t i = 0; i < a_ge.size(); ++i) {
        std::vector<rat> row(a_ge[i]);
        row.resize(n + slacks, rat(0));
        row[n + i] = -1;
        lp.A.push_back(std::move(row));
        lp.b.push_back(b_ge[i]);
    }
    LPResult r = solve_lp(lp);
    if (r.status != LPStatus::Optimal) return std::nullopt;
    r.x.resize(n);
    return r.x;
}

enum class LinearSolveStatus { Unique, Underdetermined, Inconsistent };

struct LinearSolveResult {
    LinearSolveStatus status = LinearSolveStatus::Inconsistent;
    std::vector<rat> x;
};

// Exact Gaussian elimination for small square-ish systems A x = b.
inline LinearSolveResult solve_linear_system(std::vector<std::vector<rat>> a, std::vector<rat> b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a[0].size();
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t sel = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (a[i][c] != 0) { sel = i; break; }
        if (sel == rows) continue;
        std::swap(a[sel], a[r]);
        std::swap(b[sel], b[r]);
        const rat piv = a[r][c];
        for (auto& v : a[r]) v /= piv;
        b[r] /= piv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            const rat f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return {LinearSolveStatus::Inconsistent, {}};
    LinearSolveResult result;
    result.x.assign(cols, rat(0));
    for (std::size_t i = 0; i < pivot_col.size(); ++i) result.x[pivot_col[i]] = b[i];
    result.status = pivot_col.size() == cols ? LinearSolveStatus::Unique : LinearSolveStatus::Underdetermined;
    return result;
}

} // namespace sigref
