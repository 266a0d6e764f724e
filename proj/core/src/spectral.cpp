#include "slrd/spectral.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace slrd {

Vector singular_values(const Matrix& matrix)
{
    return Eigen::BDCSVD<Matrix>(matrix).singularValues();
}

Index numerical_rank(const Matrix& matrix, double rel_tol)
{
    if (matrix.size() == 0)
        return 0;
    const Vector sv = singular_values(matrix);
    if (sv.size() == 0 || sv(0) <= 0.0)
        return 0;
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > rel_tol * sv(0))
        ++rank;
    return rank;
}

double orthonormality_error(const Matrix& W)
{
    return (W.transpose() * W - Matrix::Identity(W.cols(), W.cols())).cwiseAbs().maxCoeff();
}

void canonicalize_column_signs(Matrix& W)
{
    for (Index s = 0; s < W.cols(); ++s) {
        Index arg = 0;
        double best = 0.0;
        for (Index i = 0; i < W.rows(); ++i) {
            const double mag = std::abs(W(i, s));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (best > 0.0 && W(arg, s) < 0.0)
            W.col(s) = -W.col(s);
    }
}

double schatten_norm(const Matrix& matrix, double q)
{
    if (!(q >= 1.0))
        throw InvalidInput("Schatten exponent must lie in [1, infinity]");

    const Vector sv = singular_values(matrix);
    if (sv.size() == 0 || sv(0) <= 0.0)
        return 0.0;
    if (std::isinf(q))
        return sv(0);

    // factor out the leading value so large exponents cannot overflow
    double sum = 0.0;
    for (Index s = 0; s < sv.size(); ++s)
        sum += std::pow(sv(s) / sv(0), q);
    return sv(0) * std::pow(sum, 1.0 / q);
}

double loss_Lq(const Matrix& estimate, const Matrix& truth, double q)
{
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw InvalidInput("loss operands must have equal shape");
    if (!(q >= 1.0 && q <= 2.0))
        throw InvalidInput("loss exponent must lie in [1, 2]");

    if (q == 2.0)
        return (estimate - truth).squaredNorm();
    const double norm = schatten_norm(estimate - truth, q);
    return norm * norm;
}

Svd truncated_svd(const Matrix& matrix, Index r)
{
    if (r < 1 || r > std::min(matrix.rows(), matrix.cols()))
        throw InvalidInput("truncation rank " + std::to_string(r) +
                           " out of range for a " + std::to_string(matrix.rows()) + " x " +
                           std::to_string(matrix.cols()) + " matrix");

    Eigen::BDCSVD<Matrix> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Svd out;
    out.U = svd.matrixU().leftCols(r);
    out.d = svd.singularValues().head(r);
    out.V = svd.matrixV().leftCols(r);

    // pin the sign with U's dominant entry and flip V along so the
    // product is unchanged
    for (Index s = 0; s < r; ++s) {
        Index arg = 0;
        double best = 0.0;
        for (Index i = 0; i < out.U.rows(); ++i) {
            const double mag = std::abs(out.U(i, s));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (best > 0.0 && out.U(arg, s) < 0.0) {
            out.U.col(s) = -out.U.col(s);
            out.V.col(s) = -out.V.col(s);
        }
    }
    return out;
}

namespace {

// strict coefficient-wise order; used to pick a canonical operand order
bool column_major_less(const Matrix& a, const Matrix& b)
{
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (a(i, j) != b(i, j))
                return a(i, j) < b(i, j);
    return false;
}

} // namespace

SinTheta sin_theta(const Matrix& W1, const Matrix& W2)
{
    if (W1.rows() != W2.rows() || W1.cols() != W2.cols())
        throw InvalidInput("sin-theta operands must have equal shape");
    if (orthonormality_error(W1) > 1e-8 || orthonormality_error(W2) > 1e-8)
        throw InvalidInput("sin-theta operands must have orthonormal columns");

    SinTheta out;
    if (W1.cols() == 0)
        return out;

    // canonical operand order makes the distance exactly symmetric
    const bool flip = column_major_less(W2, W1);
    const Matrix& A = flip ? W2 : W1;
    const Matrix& B = flip ? W1 : W2;

    // singular values of (I - A A^T) B are the sines of the principal
    // angles; unlike a projector-difference norm this stays accurate to
    // machine precision when the angles are near zero
    const Matrix S = B - A * (A.transpose() * B);
    const Vector sv = singular_values(S);

    out.frobenius = std::min(S.norm(), std::sqrt(static_cast<double>(A.cols())));
    out.op = std::clamp(sv(0), 0.0, 1.0);
    return out;
}

double rate_psi_q(double m, double n, double k, double l, double r, double q)
{
    if (!(m >= 1.0 && n >= 1.0 && k >= 1.0 && l >= 1.0 && r >= 1.0))
        throw InvalidInput("rate parameters must be at least 1");
    if (!(k <= m && l <= n && r <= std::min(k, l)))
        throw InvalidInput("rate parameters must satisfy r <= min(k, l), k <= m, l <= n");
    if (!(q >= 1.0 && q <= 2.0))
        throw InvalidInput("rate exponent must lie in [1, 2]");

    const double head = std::pow(r, 2.0 / q) * (k + l);
    const double tail = std::pow(r, 2.0 / q - 1.0) *
                        (k * (1.0 + std::log(m / k)) + l * (1.0 + std::log(n / l)));
    return head + tail;
}

double table2_rescale(double q, double r, double m, double k, double l)
{
    if (!(q >= 1.0 && q <= 2.0))
        throw InvalidInput("rescale exponent must lie in [1, 2]");
    if (!(r >= 1.0 && k >= 1.0 && l >= 1.0 && m > 1.0))
        throw InvalidInput("rescale parameters out of range");

    return std::pow(r, 2.0 / q - 1.0) * (r + std::log(m)) * (k + l);
}

} // namespace slrd
