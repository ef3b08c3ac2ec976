#pragma once

#include <vector>

namespace brl {

/// Dense row-major n x n linear solve by Gaussian elimination with partial
/// pivoting. Throws std::runtime_error on a (numerically) singular matrix.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n);

/// max_i |(A x - b)_i| for a row-major n x n system.
double solve_residual(const std::vector<double>& a, const std::vector<double>& x,
                      const std::vector<double>& b, int n);

struct RowBasis {
    std::vector<std::vector<double>> basis; // orthonormal rows spanning the input rows
    int rank = 0;
};

/// Orthonormal basis of the row space via modified Gram-Schmidt with
/// re-orthogonalization. A row whose residual norm falls below
/// tol * max(1, ||row||) contributes nothing to the rank.
RowBasis orthonormal_row_basis(const std::vector<std::vector<double>>& rows, double tol = 1e-8);

/// Coordinates of v in the given orthonormal basis.
std::vector<double> project_coordinates(const RowBasis& basis, const std::vector<double>& v);

/// Euclidean norm of v minus its projection onto the basis.
double projection_residual(const RowBasis& basis, const std::vector<double>& v);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

} // namespace brl
