#pragma once

#include <vector>

namespace brl {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;      // max value of c'x
    std::vector<double> x;       // primal solution when optimal
};

/// Dense two-phase simplex for small tableaus:
///
///     maximize c'x  subject to  A x <= b,  x >= 0.
///
/// Pivots are chosen by a (value, index) ordering, which breaks ties by
/// variable id and avoids cycling on the degenerate tableaus produced by
/// the diagnostics module. Sizes here are tens of variables, so the O(m n)
/// per-pivot cost is irrelevant.
class SimplexLp {
public:
    SimplexLp(std::vector<std::vector<double>> a, std::vector<double> b,
              std::vector<double> c, double eps = 1e-9);

    LpSolution solve();

private:
    bool run(int phase);
    void pivot(int row, int col);

    int m_, n_;
    double eps_;
    std::vector<int> nonbasic_, basic_;
    std::vector<std::vector<double>> tab_;
};

} // namespace brl
