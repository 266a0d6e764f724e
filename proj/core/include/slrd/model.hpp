#ifndef SLRD_MODEL_HPP
#define SLRD_MODEL_HPP

//
// data model for simultaneously row/column-sparse and low-rank signals
//
// A signal M = U diag(d) V^T has orthonormal factors whose nonzero rows
// are confined to a small row support I (|I| = k) and column support J
// (|J| = l).  Observations are X = M + sigma * Z with Z i.i.d. standard
// normal.
//

#include "slrd/types.hpp"

#include <cstdint>

namespace slrd {

using ObservedMatrix = Matrix;

// dimensions of the sparse low-rank class: m x n signals of rank r with
// at most k nonzero rows and l nonzero columns
struct ParamSpaceSpec {
    Index m = 0;
    Index n = 0;
    Index k = 0;
    Index l = 0;
    Index r = 0;
};

// throws InvalidInput unless 1 <= r <= min(k, l), k <= m, l <= n
void validate(const ParamSpaceSpec& spec);

struct SignalFactors {
    Matrix U;              // m x r, orthonormal columns, zero rows outside row_support
    Vector d;              // r positive singular values, non-increasing
    Matrix V;              // n x r, orthonormal columns, zero rows outside col_support
    IndexSet row_support;  // sorted indices of the k rows carrying signal
    IndexSet col_support;  // sorted indices of the l columns carrying signal
};

// throws InvalidInput on shape mismatch, non-orthonormal factors
// (tolerance 1e-8 on max |U^T U - I|), a non-positive or increasing d,
// malformed supports, or factor rows outside the declared supports
void validate(const SignalFactors& factors);

// M = U diag(d) V^T; validates the factors first
Matrix compose_signal(const SignalFactors& factors);

// X = signal + sigma * Z with Z i.i.d. standard normal drawn from the
// child stream of `seed`; identical inputs give bit-identical output
Matrix add_noise(const Matrix& signal, double sigma, std::uint64_t seed);

} // namespace slrd

#endif
