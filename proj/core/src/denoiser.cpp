#include "slrd/denoiser.hpp"

#include "slrd/spectral.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace slrd {

double compute_gamma(Index r, double beta, Index m)
{
    if (r < 1)
        throw InvalidInput("threshold level needs a positive rank");
    if (!(beta > 0.0))
        throw InvalidInput("threshold level needs a positive beta");
    if (m < 2)
        throw InvalidInput("threshold level needs m >= 2");

    const double rd = static_cast<double>(r);
    const double lm = std::log(static_cast<double>(m));
    return std::sqrt(1.01 * (rd + 2.0 * std::sqrt(rd * beta * lm) + 2.0 * beta * lm));
}

StoppingPolicy StoppingPolicy::fixed_steps(int steps)
{
    return {Mode::FixedSteps, steps, 0.0};
}

StoppingPolicy StoppingPolicy::tolerance(double eps)
{
    return {Mode::Tolerance, 1, eps};
}

StoppingPolicy StoppingPolicy::combined(int steps, double eps)
{
    return {Mode::Combined, steps, eps};
}

void validate(const DenoiseConfig& config)
{
    if (config.rank < 1)
        throw InvalidInput("denoiser rank must be at least 1");
    if (!(config.sigma > 0.0))
        throw InvalidInput("denoiser needs a positive sigma");
    if (!(config.gamma_u >= 0.0) || !(config.gamma_v >= 0.0))
        throw InvalidInput("threshold levels must be non-negative");
    validate(config.threshold);
    if (config.max_iterations < 1)
        throw InvalidInput("iteration cap must be at least 1");

    const bool uses_steps = config.stopping.mode != StoppingPolicy::Mode::Tolerance;
    const bool uses_eps = config.stopping.mode != StoppingPolicy::Mode::FixedSteps;
    if (uses_steps && config.stopping.steps < 1)
        throw InvalidInput("step budget must be at least 1");
    if (uses_eps && !(config.stopping.eps > 0.0))
        throw InvalidInput("stopping tolerance must be positive");
}

Matrix orthonormalize_keeping_zero_rows(const Matrix& A)
{
    const Index r = A.cols();
    IndexSet live;
    live.reserve(static_cast<std::size_t>(A.rows()));
    for (Index i = 0; i < A.rows(); ++i)
        if ((A.row(i).array() != 0.0).any())
            live.push_back(i);

    const Index s = static_cast<Index>(live.size());
    if (s < r)
        throw RankCollapse("only " + std::to_string(s) + " nonzero rows remain for rank " +
                           std::to_string(r));

    Matrix B(s, r);
    for (Index p = 0; p < s; ++p)
        B.row(p) = A.row(live[static_cast<std::size_t>(p)]);

    Eigen::HouseholderQR<Matrix> qr(B);
    const Vector diag = qr.matrixQR().diagonal().head(r).cwiseAbs();
    const double max_diag = diag.maxCoeff();
    if (!(max_diag > 0.0) || (diag.array() <= 1e-12 * max_diag).any())
        throw RankCollapse("thresholded factor lost column rank " + std::to_string(r));

    const Matrix thin_q = qr.householderQ() * Matrix::Identity(s, r);
    Matrix out = Matrix::Zero(A.rows(), r);
    for (Index p = 0; p < s; ++p)
        out.row(live[static_cast<std::size_t>(p)]) = thin_q.row(p);
    return out;
}

namespace {

// |P_new - P_old|_F^2 via the Gram matrix; never forms the projectors
double projector_delta_sq(const Matrix& W_new, const Matrix& W_old)
{
    const double cross = (W_old.transpose() * W_new).squaredNorm();
    const double delta =
        static_cast<double>(W_new.cols()) + static_cast<double>(W_old.cols()) - 2.0 * cross;
    return std::max(0.0, delta);
}

Index count_nonzero_rows(const Matrix& A)
{
    Index count = 0;
    for (Index i = 0; i < A.rows(); ++i)
        if ((A.row(i).array() != 0.0).any())
            ++count;
    return count;
}

IndexSet nonzero_rows(const Matrix& A)
{
    IndexSet out;
    for (Index i = 0; i < A.rows(); ++i)
        if ((A.row(i).array() != 0.0).any())
            out.push_back(i);
    return out;
}

} // namespace

StepResult denoise_step(const Matrix& X, const Matrix& V_prev, const DenoiseConfig& config,
                        int step, const Matrix* U_prev)
{
    validate(config);
    if (V_prev.rows() != X.cols() || V_prev.cols() != config.rank)
        throw InvalidInput("V factor shape disagrees with the observation and rank");
    if (orthonormality_error(V_prev) > 1e-8)
        throw InvalidInput("V factor must have orthonormal columns");

    const double tau_u = config.sigma * config.gamma_u;
    const double tau_v = config.sigma * config.gamma_v;

    StepResult out;
    try {
        const Matrix U_thr = threshold_rows(X * V_prev, tau_u, config.threshold);
        out.U = orthonormalize_keeping_zero_rows(U_thr);
        const Matrix V_thr = threshold_rows(X.transpose() * out.U, tau_v, config.threshold);
        out.V = orthonormalize_keeping_zero_rows(V_thr);
    } catch (const RankCollapse& failure) {
        throw RankCollapse("sweep " + std::to_string(step) + ": " + failure.what());
    }

    out.record.step = step;
    out.record.u_subspace_delta = U_prev ? projector_delta_sq(out.U, *U_prev)
                                         : static_cast<double>(config.rank);
    out.record.v_subspace_delta = projector_delta_sq(out.V, V_prev);
    out.record.u_rows_kept = count_nonzero_rows(out.U);
    out.record.v_rows_kept = count_nonzero_rows(out.V);
    out.record.u_gram_error = orthonormality_error(out.U);
    out.record.v_gram_error = orthonormality_error(out.V);
    return out;
}

DenoiseResult denoise(const Matrix& X, const DenoiseConfig& config, const Matrix& V0)
{
    validate(config);
    if (config.rank > std::min(X.rows(), X.cols()))
        throw InvalidInput("rank exceeds the smaller matrix dimension");
    if (V0.rows() != X.cols() || V0.cols() != config.rank)
        throw InvalidInput("V0 must be cols(X) x rank");
    if (orthonormality_error(V0) > 1e-8)
        throw InvalidInput("V0 must have orthonormal columns");

    const StoppingPolicy& stop = config.stopping;
    const bool uses_steps = stop.mode != StoppingPolicy::Mode::Tolerance;
    const bool uses_eps = stop.mode != StoppingPolicy::Mode::FixedSteps;

    DenoiseResult out;
    Matrix V = V0;
    Matrix U;
    for (int t = 1;; ++t) {
        StepResult step = denoise_step(X, V, config, t, t == 1 ? nullptr : &U);
        U = std::move(step.U);
        V = std::move(step.V);
        out.iterations_run = t;
        out.max_gram_error = std::max({out.max_gram_error, step.record.u_gram_error,
                                       step.record.v_gram_error});
        out.trace.push_back(step.record);

        // the first sweep has no U movement to compare, so the
        // tolerance can fire from the second sweep on
        if (uses_eps && t >= 2 &&
            std::max(step.record.u_subspace_delta, step.record.v_subspace_delta) <=
                stop.eps) {
            out.tolerance_met = true;
            break;
        }
        if (uses_steps && t >= stop.steps) {
            out.completed_budget = true;
            break;
        }
        if (t >= config.max_iterations) {
            out.hit_iteration_cap = true;
            break;
        }
    }

    out.U = std::move(U);
    out.V = std::move(V);
    out.core = out.U.transpose() * (X * out.V);
    out.estimate = out.U * out.core * out.V.transpose();
    out.row_support = nonzero_rows(out.U);
    out.col_support = nonzero_rows(out.V);
    return out;
}

namespace {

void transpose_in_place(DenoiseResult& result)
{
    result.estimate.transposeInPlace();
    result.core.transposeInPlace();
    std::swap(result.U, result.V);
    std::swap(result.row_support, result.col_support);
    for (IterationRecord& record : result.trace) {
        std::swap(record.u_subspace_delta, record.v_subspace_delta);
        std::swap(record.u_rows_kept, record.v_rows_kept);
        std::swap(record.u_gram_error, record.v_gram_error);
    }
}

void transpose_in_place(PipelineResult& result)
{
    transpose_in_place(result.denoised);
    std::swap(result.init.U0, result.init.V0);
    std::swap(result.init.i0, result.init.j0);
    result.transposed = true;
}

// pipeline body for the tall orientation (rows >= cols)
PipelineResult run_pipeline(const Matrix& X, const PipelineOptions& options)
{
    if (options.sigma && !(*options.sigma > 0.0))
        throw InvalidInput("a known sigma must be positive");
    if (!(options.eps > 0.0))
        throw InvalidInput("stopping tolerance must be positive");
    if (options.max_iterations < 1)
        throw InvalidInput("iteration cap must be at least 1");
    validate(options.threshold);

    PipelineResult out;
    if (options.sigma) {
        out.sigma_used = *options.sigma;
    } else {
        const SigmaEstimate estimate = estimate_sigma(X);
        if (estimate.degenerate)
            throw InvalidInput("noise-scale estimate degenerated to zero; "
                               "pass a known sigma instead");
        out.sigma_used = estimate.value;
        out.sigma_estimated = true;
    }

    InitConfig init_config;
    init_config.alpha = options.alpha;
    init_config.beta = options.beta;
    init_config.rank = options.rank;
    out.warnings = validate(init_config);

    out.init = initialize(X, out.sigma_used, init_config);
    out.rank_used = options.rank.value_or(out.init.r_hat);
    if (out.rank_used == 0) {
        out.warnings.push_back("no rank cleared the selection cutoff; returning the zero "
                               "estimate");
        out.denoised.estimate = Matrix::Zero(X.rows(), X.cols());
        out.denoised.U = Matrix::Zero(X.rows(), 0);
        out.denoised.V = Matrix::Zero(X.cols(), 0);
        out.denoised.core = Matrix::Zero(0, 0);
        return out;
    }

    out.gamma = compute_gamma(out.rank_used, options.beta, X.rows());
    out.budget = compute_T_hat(out.init.d_r0, out.sigma_used * out.gamma, X.rows());
    if (out.budget.low_signal)
        out.warnings.push_back("screened spectrum sits at or below the working threshold; "
                               "iteration budget fell back to a single sweep");

    DenoiseConfig config;
    config.rank = out.rank_used;
    config.sigma = out.sigma_used;
    config.gamma_u = out.gamma;
    config.gamma_v = out.gamma;
    config.threshold = options.threshold;
    config.max_iterations = options.max_iterations;
    switch (options.stop) {
        case StoppingPolicy::Mode::FixedSteps:
            config.stopping = StoppingPolicy::fixed_steps(out.budget.steps);
            break;
        case StoppingPolicy::Mode::Tolerance:
            config.stopping = StoppingPolicy::tolerance(options.eps);
            break;
        case StoppingPolicy::Mode::Combined:
            config.stopping = StoppingPolicy::combined(out.budget.steps, options.eps);
            break;
    }

    out.denoised = denoise(X, config, out.init.V0);
    return out;
}

} // namespace

PipelineResult auto_denoise(const Matrix& X, const PipelineOptions& options)
{
    if (X.rows() < 2 || X.cols() < 2)
        throw InvalidInput("pipeline needs at least a 2 x 2 observation");
    if (X.rows() >= X.cols())
        return run_pipeline(X, options);

    PipelineResult out = run_pipeline(X.transpose(), options);
    transpose_in_place(out);
    return out;
}

} // namespace slrd
