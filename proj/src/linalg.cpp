#include "linalg.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace roadfirst {

LeastSquaresResult solve_least_squares(std::vector<double> a, std::size_t n, std::size_t p,
                                       std::vector<double> b, double rank_tol) {
    if (a.size() != n * p || b.size() != n)
        throw InvalidArgument("solve_least_squares: inconsistent dimensions");
    if (n == 0 || p == 0) throw InvalidArgument("solve_least_squares: empty system");

    auto col = [&](std::size_t j) { return a.data() + j * n; };

    std::vector<std::size_t> piv(p);
    for (std::size_t j = 0; j < p; ++j) piv[j] = j;

    const std::size_t kmax = std::min(n, p);
    std::vector<double> rdiag(kmax, 0.0);
    double first_pivot_norm = 0.0;
    std::size_t rank = 0;

    for (std::size_t k = 0; k < kmax; ++k) {
        // Pivot: largest remaining column norm; ties keep the leftmost.
        std::size_t best = k;
        double best_norm2 = 0.0;
        for (std::size_t j = k; j < p; ++j) {
            double s = 0.0;
            const double* cj = col(j);
            for (std::size_t i = k; i < n; ++i) s += cj[i] * cj[i];
            if (s > best_norm2) {
                best_norm2 = s;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < n; ++i) std::swap(col(k)[i], col(best)[i]);
            std::swap(piv[k], piv[best]);
        }

        const double normx = std::sqrt(best_norm2);
        if (k == 0) first_pivot_norm = normx;
        if (normx <= rank_tol * first_pivot_norm || normx == 0.0) break;
        rank = k + 1;

        double* ck = col(k);
        const double alpha = ck[k] >= 0.0 ? -normx : normx;
        ck[k] -= alpha;  // ck[k..] now holds the Householder vector v
        double vtv = 0.0;
        for (std::size_t i = k; i < n; ++i) vtv += ck[i] * ck[i];

        for (std::size_t j = k + 1; j < p; ++j) {
            double* cj = col(j);
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += ck[i] * cj[i];
            const double s = 2.0 * dot / vtv;
            for (std::size_t i = k; i < n; ++i) cj[i] -= s * ck[i];
        }
        {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += ck[i] * b[i];
            const double s = 2.0 * dot / vtv;
            for (std::size_t i = k; i < n; ++i) b[i] -= s * ck[i];
        }
        rdiag[k] = alpha;
        // Column k above the diagonal already holds R entries; clear below.
        for (std::size_t i = k + 1; i < n; ++i) ck[i] = 0.0;
        ck[k] = alpha;
    }

    // Residual of the truncated solution lives in the transformed tail of b.
    double ssr = 0.0;
    for (std::size_t i = rank; i < n; ++i) ssr += b[i] * b[i];

    // Back substitution on the leading rank-by-rank triangle.
    std::vector<double> y(rank, 0.0);
    for (std::size_t kk = rank; kk-- > 0;) {
        double s = b[kk];
        for (std::size_t j = kk + 1; j < rank; ++j) s -= col(j)[kk] * y[j];
        y[kk] = s / rdiag[kk];
    }

    LeastSquaresResult out;
    out.coef.assign(p, 0.0);
    for (std::size_t j = 0; j < rank; ++j) out.coef[piv[j]] = y[j];
    out.ssr = ssr;
    out.rank = rank;
    return out;
}

}  // namespace roadfirst
