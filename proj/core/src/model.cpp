#include "slrd/model.hpp"

#include "slrd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace slrd {

namespace {

void check_support(const IndexSet& support, Index bound, Index expected_size,
                   const char* label)
{
    if (static_cast<Index>(support.size()) != expected_size)
        throw InvalidInput(std::string(label) + " has " + std::to_string(support.size()) +
                           " indices, factor declares " + std::to_string(expected_size));
    Index prev = -1;
    for (Index idx : support) {
        if (idx < 0 || idx >= bound)
            throw InvalidInput(std::string(label) + " index " + std::to_string(idx) +
                               " out of range");
        if (idx <= prev)
            throw InvalidInput(std::string(label) + " is not sorted and duplicate-free");
        prev = idx;
    }
}

void check_factor(const Matrix& W, const IndexSet& support, const char* label)
{
    const double gram_error = (W.transpose() * W - Matrix::Identity(W.cols(), W.cols()))
                                  .cwiseAbs()
                                  .maxCoeff();
    if (gram_error > 1e-8)
        throw InvalidInput(std::string(label) + " columns are not orthonormal (max Gram " +
                           "deviation " + std::to_string(gram_error) + ")");

    auto next = support.begin();
    for (Index i = 0; i < W.rows(); ++i) {
        const bool in_support = next != support.end() && *next == i;
        if (in_support)
            ++next;
        else if ((W.row(i).array() != 0.0).any())
            throw InvalidInput(std::string(label) + " row " + std::to_string(i) +
                               " is nonzero outside the declared support");
    }
}

} // namespace

void validate(const ParamSpaceSpec& spec)
{
    if (spec.m < 1 || spec.n < 1)
        throw InvalidInput("matrix dimensions must be positive");
    if (spec.k < 1 || spec.k > spec.m || spec.l < 1 || spec.l > spec.n)
        throw InvalidInput("support sizes must satisfy 1 <= k <= m and 1 <= l <= n");
    if (spec.r < 1 || spec.r > std::min(spec.k, spec.l))
        throw InvalidInput("rank must satisfy 1 <= r <= min(k, l)");
}

void validate(const SignalFactors& factors)
{
    const Index r = factors.d.size();
    if (r < 1)
        throw InvalidInput("signal factors need at least one singular value");
    if (factors.U.cols() != r || factors.V.cols() != r)
        throw InvalidInput("factor column counts disagree with the singular value count");
    if (factors.U.rows() < r || factors.V.rows() < r)
        throw InvalidInput("factors must have at least as many rows as columns");

    for (Index s = 0; s < r; ++s) {
        if (!(factors.d(s) > 0.0))
            throw InvalidInput("singular values must be positive");
        if (s > 0 && factors.d(s) > factors.d(s - 1))
            throw InvalidInput("singular values must be non-increasing");
    }

    check_support(factors.row_support, factors.U.rows(),
                  static_cast<Index>(factors.row_support.size()), "row_support");
    check_support(factors.col_support, factors.V.rows(),
                  static_cast<Index>(factors.col_support.size()), "col_support");
    check_factor(factors.U, factors.row_support, "U");
    check_factor(factors.V, factors.col_support, "V");
}

Matrix compose_signal(const SignalFactors& factors)
{
    validate(factors);
    return factors.U * factors.d.asDiagonal() * factors.V.transpose();
}

Matrix add_noise(const Matrix& signal, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0))
        throw InvalidInput("noise level must be non-negative");

    Rng rng = Rng::child(seed, 0);
    Matrix out(signal.rows(), signal.cols());
    // fixed column-major draw order makes the stream layout-deterministic
    for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i)
            out(i, j) = signal(i, j) + sigma * rng.normal();
    return out;
}

} // namespace slrd
