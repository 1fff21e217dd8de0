#pragma once

#include <cstddef>
#include <vector>

namespace roadfirst {

struct LeastSquaresResult {
    std::vector<double> coef;  // basic solution; columns beyond the detected rank get 0
    double ssr = 0.0;          // squared residual norm
    std::size_t rank = 0;
};

// Minimum ||A x - b|| via Householder QR with column pivoting. Rank is
// detected by comparing pivot column norms against rank_tol times the first
// pivot norm. `a` is column-major (n rows, p columns) and is consumed.
// Near-collinear systems are the expected input here; this is why the
// solver is orthogonal-factorization based rather than normal equations.
LeastSquaresResult solve_least_squares(std::vector<double> a, std::size_t n, std::size_t p,
                                       std::vector<double> b, double rank_tol = 1e-10);

}  // namespace roadfirst
