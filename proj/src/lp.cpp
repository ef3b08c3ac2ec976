#include "brl/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace brl {

SimplexLp::SimplexLp(std::vector<std::vector<double>> a, std::vector<double> b,
                     std::vector<double> c, double eps)
    : m_(static_cast<int>(b.size())), n_(static_cast<int>(c.size())), eps_(eps),
      nonbasic_(n_ + 1), basic_(m_),
      tab_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    if (a.size() != b.size()) throw std::invalid_argument("SimplexLp: A and b row counts differ");
    for (int i = 0; i < m_; ++i) {
        if (a[i].size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("SimplexLp: A column count does not match c");
        for (int j = 0; j < n_; ++j) tab_[i][j] = a[i][j];
        basic_[i] = n_ + i;
        tab_[i][n_] = -1.0;      // artificial column for phase one
        tab_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
        nonbasic_[j] = j;
        tab_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    tab_[m_ + 1][n_] = 1.0;
}

void SimplexLp::pivot(int row, int col) {
    auto& prow = tab_[row];
    const double inv = 1.0 / prow[col];
    for (int i = 0; i < m_ + 2; ++i) {
        if (i == row || std::fabs(tab_[i][col]) <= eps_) continue;
        auto& irow = tab_[i];
        const double factor = irow[col] * inv;
        for (int j = 0; j < n_ + 2; ++j) irow[j] -= prow[j] * factor;
        irow[col] = prow[col] * factor;
    }
    for (int j = 0; j < n_ + 2; ++j)
        if (j != col) prow[j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
        if (i != row) tab_[i][col] *= -inv;
    prow[col] = inv;
    std::swap(basic_[row], nonbasic_[col]);
}

bool SimplexLp::run(int phase) {
    const int obj = m_ + phase - 1;
    for (;;) {
        int col = -1;
        for (int j = 0; j < n_ + 1; ++j) {
            // The artificial variable only participates in the feasibility phase.
            if (phase == 1 && nonbasic_[j] == -1) continue;
            if (col == -1 || std::make_pair(tab_[obj][j], nonbasic_[j]) <
                                 std::make_pair(tab_[obj][col], nonbasic_[col]))
                col = j;
        }
        if (col == -1 || tab_[obj][col] >= -eps_) return true;
        int row = -1;
        for (int i = 0; i < m_; ++i) {
            if (tab_[i][col] <= eps_) continue;
            if (row == -1 ||
                std::make_pair(tab_[i][n_ + 1] / tab_[i][col], basic_[i]) <
                    std::make_pair(tab_[row][n_ + 1] / tab_[row][col], basic_[row]))
                row = i;
        }
        if (row == -1) return false; // unbounded in the improving direction
        pivot(row, col);
    }
}

LpSolution SimplexLp::solve() {
    LpSolution out;
    int worst = 0;
    for (int i = 1; i < m_; ++i)
        if (tab_[i][n_ + 1] < tab_[worst][n_ + 1]) worst = i;
    if (m_ > 0 && tab_[worst][n_ + 1] < -eps_) {
        pivot(worst, n_);
        if (!run(2) || tab_[m_ + 1][n_ + 1] < -eps_) {
            out.status = LpStatus::infeasible;
            return out;
        }
        for (int i = 0; i < m_; ++i) {
            if (basic_[i] != -1) continue;
            // Drive the artificial variable out of the basis.
            int col = 0;
            for (int j = 1; j < n_ + 1; ++j)
                if (std::make_pair(tab_[i][j], nonbasic_[j]) <
                    std::make_pair(tab_[i][col], nonbasic_[col]))
                    col = j;
            pivot(i, col);
        }
    }
    const bool bounded = run(1);
    if (!bounded) {
        out.status = LpStatus::unbounded;
        return out;
    }
    out.status = LpStatus::optimal;
    out.objective = tab_[m_][n_ + 1];
    out.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
        if (basic_[i] >= 0 && basic_[i] < n_) out.x[basic_[i]] = tab_[i][n_ + 1];
    return out;
}

} // namespace brl
