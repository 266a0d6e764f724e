#ifndef SLRD_DENOISER_HPP
#define SLRD_DENOISER_HPP

//
// two-way iterative thresholding denoiser
//
// Starting from an initial right factor V0, each sweep multiplies the
// observation into the current subspace, zeroes rows whose energy is at
// or below the working threshold, and re-orthonormalizes:
//   U_t <- orth(threshold_rows(X V_{t-1}, sigma gamma_u))
//   V_t <- orth(threshold_rows(X^T U_t,  sigma gamma_v))
// The final estimate is the two-sided projection U (U^T X V) V^T.
//

#include "slrd/initialization.hpp"
#include "slrd/thresholding.hpp"
#include "slrd/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace slrd {

// threshold level for rank r and the larger dimension m:
//   gamma^2 = 1.01 (r + 2 sqrt(r beta log m) + 2 beta log m)
// the working thresholds are sigma * gamma on both sides
double compute_gamma(Index r, double beta, Index m);

struct StoppingPolicy {
    enum class Mode { FixedSteps, Tolerance, Combined };

    Mode mode = Mode::Combined;
    int steps = 1;       // sweep budget, used by FixedSteps and Combined
    double eps = 1e-10;  // subspace-movement tolerance, used by Tolerance and Combined

    static StoppingPolicy fixed_steps(int steps);
    static StoppingPolicy tolerance(double eps);
    static StoppingPolicy combined(int steps, double eps);
};

struct DenoiseConfig {
    Index rank = 1;
    double sigma = 1.0;
    // noise-free threshold levels, typically both compute_gamma(...);
    // zero disables thresholding and leaves pure orthogonal iteration
    double gamma_u = 0.0;
    double gamma_v = 0.0;
    ThresholdSpec threshold;
    StoppingPolicy stopping;
    int max_iterations = 1000;
};

void validate(const DenoiseConfig& config);

// orthonormalizes the columns of a tall matrix while keeping its zero
// rows exactly zero (QR runs on the nonzero rows only); throws
// RankCollapse when fewer than cols nonzero rows remain or the QR
// diagonal reveals a rank deficit
Matrix orthonormalize_keeping_zero_rows(const Matrix& A);

struct IterationRecord {
    int step = 0;
    // squared Frobenius distance between consecutive orthogonal
    // projectors; the first sweep has no previous U and records the
    // distance from the zero projector, i.e. the rank
    double u_subspace_delta = 0.0;
    double v_subspace_delta = 0.0;
    Index u_rows_kept = 0;
    Index v_rows_kept = 0;
    double u_gram_error = 0.0;  // max |U^T U - I| after orthonormalization
    double v_gram_error = 0.0;
};

struct StepResult {
    Matrix U;
    Matrix V;
    IterationRecord record;
};

// one sweep; pass the previous U (if any) so the record can report its
// subspace movement
StepResult denoise_step(const Matrix& X, const Matrix& V_prev, const DenoiseConfig& config,
                        int step = 1, const Matrix* U_prev = nullptr);

struct DenoiseResult {
    Matrix estimate;        // U core V^T
    Matrix U;               // m x rank, orthonormal columns
    Matrix V;               // n x rank
    Matrix core;            // rank x rank, U^T X V
    IndexSet row_support;   // nonzero rows of U
    IndexSet col_support;   // nonzero rows of V
    std::vector<IterationRecord> trace;
    int iterations_run = 0;
    bool tolerance_met = false;    // subspace movement fell to eps or below
    bool completed_budget = false; // ran the full fixed-step budget
    bool hit_iteration_cap = false;
    double max_gram_error = 0.0;   // worst orthonormality deviation seen
};

// runs sweeps from V0 (n x rank, orthonormal) until the stopping policy
// or the iteration cap fires
DenoiseResult denoise(const Matrix& X, const DenoiseConfig& config, const Matrix& V0);

//
// end-to-end pipeline: noise-scale estimation, screening, spectral
// initialization, rank and threshold selection, then the iteration.
// Inputs with fewer rows than columns are transposed internally and all
// outputs are mapped back to the original orientation.
//

struct PipelineOptions {
    std::optional<double> sigma;  // known noise level; absent estimates it
    std::optional<Index> rank;    // known rank; absent selects it from data
    double alpha = 4.0;
    double beta = 4.0;
    ThresholdSpec threshold;
    StoppingPolicy::Mode stop = StoppingPolicy::Mode::Combined;
    double eps = 1e-10;
    int max_iterations = 1000;
};

struct PipelineResult {
    DenoiseResult denoised;
    InitResult init;
    double sigma_used = 0.0;
    bool sigma_estimated = false;
    Index rank_used = 0;
    double gamma = 0.0;  // noise-free threshold level
    IterationBudget budget;
    bool transposed = false;
    std::vector<std::string> warnings;
};

// throws InvalidInput when the noise-scale estimate degenerates to zero;
// a data-selected rank of 0 yields a zero estimate with a warning
PipelineResult auto_denoise(const Matrix& X, const PipelineOptions& options);

} // namespace slrd

#endif
