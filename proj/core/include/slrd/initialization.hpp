#ifndef SLRD_INITIALIZATION_HPP
#define SLRD_INITIALIZATION_HPP

//
// data-driven initialization: noise-scale estimation, row/column
// screening, truncated SVD of the screened matrix, rank selection, and
// the iteration budgets derived from the screened spectrum
//

#include "slrd/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace slrd {

struct SigmaEstimate {
    double value = 0.0;
    // set when the scaled median absolute deviation collapses to zero
    bool degenerate = false;
};

// robust noise scale 1.4826 * median(|X_ij - median(X)|); a zero result
// is returned as-is with the degenerate flag set
SigmaEstimate estimate_sigma(const Matrix& X);

struct InitConfig {
    double alpha = 4.0;          // screening constant
    double beta = 4.0;           // threshold-level constant
    std::optional<Index> rank;   // factor rank; absent selects the rank from data
};

// throws InvalidInput on non-positive constants; returns a warning when
// beta is below the theoretically supported 4
std::vector<std::string> validate(const InitConfig& config);

struct ScreeningSets {
    IndexSet rows;  // indices i with |X_{i*}|^2 >= sigma^2 (n + alpha sqrt(n log n))
    IndexSet cols;  // indices j with |X_{*j}|^2 >= sigma^2 (m + alpha sqrt(m log m))
};

// energy cutoffs used by the screening rule, {row_cutoff, col_cutoff}
std::pair<double, double> screening_cutoffs(Index m, Index n, double sigma, double alpha);

ScreeningSets select_screening_sets(const Matrix& X, double sigma, double alpha);

// copy of X with all entries outside rows x cols zeroed
Matrix build_screened_matrix(const Matrix& X, const IndexSet& rows, const IndexSet& cols);

// singular value cutoff for rank selection on an i x j screened block of
// an m x n matrix:
//   sqrt(i) + sqrt(j) + sqrt(2 i log(e m / i) + 2 j log(e n / j) + 8 log m)
double rank_cutoff_delta(Index i, Index j, Index m, Index n);

// largest s with s-th singular value of X restricted to rows x cols at
// least sigma * rank_cutoff_delta; 0 when either set is empty or no
// singular value clears the cutoff
Index select_rank(const Matrix& X, const IndexSet& rows, const IndexSet& cols, double sigma);

struct InitResult {
    Matrix U0;          // m x r, orthonormal columns, zero rows outside i0
    Matrix V0;          // n x r, orthonormal columns, zero rows outside j0
    Index r_hat = 0;    // data-selected rank, also reported when a rank was given
    double d_r0 = 0.0;  // r-th singular value of the screened matrix (0 when r = 0)
    double sigma_hat = 0.0;  // noise level the initializer was run with
    IndexSet i0;
    IndexSet j0;
};

// screening followed by a truncated SVD of the screened matrix; factor
// supports stay inside the screening sets exactly and column signs are
// canonicalized (largest-magnitude entry positive, ties to the lowest
// index).  Uses config.rank when present, the data-selected rank
// otherwise; a selected rank of 0 yields empty factors.  Throws
// EmptyScreen when a positive rank is requested but a screening set is
// empty, InitRankDeficient when the screened matrix cannot support the
// requested rank.
InitResult initialize(const Matrix& X, double sigma, const InitConfig& config);

struct IterationBudget {
    int steps = 1;
    // set when the signal proxy does not clear the threshold level and
    // the budget formula is vacuous; steps is 1 in that case
    bool low_signal = false;
};

// data-driven iteration budget; d_r0 is the r-th singular value of the
// screened matrix and gamma the working threshold level:
//   ceil((1.1 / 2) (log2 m + log(d_r0^2 / gamma^2)))
IterationBudget compute_T_hat(double d_r0, double gamma, Index m);

// oracle budget from the true r-th singular value and supports:
//   ceil((1.01 / 2) (log2 m + log(d_r^2 / max(k gamma_u^2, l gamma_v^2))))
IterationBudget compute_T_oracle(double d_r, Index k, Index l, double gamma_u,
                                 double gamma_v, Index m);

} // namespace slrd

#endif
