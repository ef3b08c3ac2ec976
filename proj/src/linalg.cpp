#include "brl/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace brl {

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n) {
    if (n <= 0) throw std::invalid_argument("solve_dense: n must be positive");
    if (a.size() != static_cast<std::size_t>(n) * n || b.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("solve_dense: shape mismatch");

    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::fabs(at(col, col));
        for (int row = col + 1; row < n; ++row) {
            const double v = std::fabs(at(row, col));
            if (v > best) { best = v; pivot = row; }
        }
        if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        if (pivot != col) {
            for (int j = col; j < n; ++j) std::swap(at(pivot, j), at(col, j));
            std::swap(b[pivot], b[col]);
        }
        for (int row = col + 1; row < n; ++row) {
            const double factor = at(row, col) / at(col, col);
            if (factor == 0.0) continue;
            at(row, col) = 0.0;
            for (int j = col + 1; j < n; ++j) at(row, j) -= factor * at(col, j);
            b[row] -= factor * b[col];
        }
    }

    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= at(i, j) * x[j];
        x[i] = acc / at(i, i);
    }
    return x;
}

double solve_residual(const std::vector<double>& a, const std::vector<double>& x,
                      const std::vector<double>& b, int n) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        double acc = -b[i];
        for (int j = 0; j < n; ++j) acc += a[static_cast<std::size_t>(i) * n + j] * x[j];
        worst = std::max(worst, std::fabs(acc));
    }
    return worst;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

namespace {

// Subtracts the projection of v onto each basis row, twice for stability.
void orthogonalize_against(const std::vector<std::vector<double>>& basis, std::vector<double>& v) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) {
            const double c = dot(q, v);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
        }
    }
}

} // namespace

RowBasis orthonormal_row_basis(const std::vector<std::vector<double>>& rows, double tol) {
    RowBasis out;
    for (const auto& row : rows) {
        std::vector<double> v = row;
        const double scale = std::max(1.0, norm2(row));
        orthogonalize_against(out.basis, v);
        const double rn = norm2(v);
        if (rn > tol * scale) {
            for (auto& x : v) x /= rn;
            out.basis.push_back(std::move(v));
            ++out.rank;
        }
    }
    return out;
}

std::vector<double> project_coordinates(const RowBasis& basis, const std::vector<double>& v) {
    std::vector<double> coords(basis.basis.size());
    for (std::size_t i = 0; i < basis.basis.size(); ++i) coords[i] = dot(basis.basis[i], v);
    return coords;
}

double projection_residual(const RowBasis& basis, const std::vector<double>& v) {
    std::vector<double> r = v;
    orthogonalize_against(basis.basis, r);
    return norm2(r);
}

} // namespace brl
