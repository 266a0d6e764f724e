#ifndef SLRD_SPECTRAL_HPP
#define SLRD_SPECTRAL_HPP

//
// spectral utilities: Schatten norms and losses, truncated SVD with a
// deterministic sign convention, principal angle (sin-theta) distances,
// and the rate/rescaling formulas used to calibrate simulation tables
//

#include "slrd/types.hpp"

namespace slrd {

// singular values of a dense matrix, non-increasing
Vector singular_values(const Matrix& matrix);

// number of singular values above rel_tol times the largest one
Index numerical_rank(const Matrix& matrix, double rel_tol = 1e-9);

// max |W^T W - I|; zero for exactly orthonormal columns
double orthonormality_error(const Matrix& W);

// flips each column so its entry of largest absolute value is positive,
// ties broken by the lowest row index; zero columns are left alone
void canonicalize_column_signs(Matrix& W);

// Schatten-q norm, q in [1, infinity]; pass
// std::numeric_limits<double>::infinity() for the operator norm
double schatten_norm(const Matrix& matrix, double q);

// squared Schatten-q distance |estimate - truth|_{S_q}^2, q in [1, 2]
double loss_Lq(const Matrix& estimate, const Matrix& truth, double q);

struct Svd {
    Matrix U;  // left singular vectors, one column per retained triple
    Vector d;  // retained singular values, non-increasing
    Matrix V;  // right singular vectors
};

// r leading singular triples; U's column signs are canonicalized and V
// follows so that U diag(d) V^T stays the best rank-r approximation;
// throws InvalidInput unless 1 <= r <= min(rows, cols)
Svd truncated_svd(const Matrix& matrix, Index r);

struct SinTheta {
    double frobenius = 0.0;  // (1/sqrt(2)) |W1 W1^T - W2 W2^T|_F
    double op = 0.0;         // |W1 W1^T - W2 W2^T|_op = sin of the largest angle
};

// principal angle distances between two column spaces; inputs must have
// equal shape and orthonormal columns (checked to 1e-8)
SinTheta sin_theta(const Matrix& W1, const Matrix& W2);

// minimax risk scale for squared Schatten-q loss over m x n signals of
// rank r supported on k rows and l columns:
//   r^{2/q} (k + l) + r^{2/q - 1} (k log(e m / k) + l log(e n / l))
double rate_psi_q(double m, double n, double k, double l, double r, double q);

// simulation-table rescaling r^{2/q - 1} (r + log m)(k + l)
double table2_rescale(double q, double r, double m, double k, double l);

} // namespace slrd

#endif
