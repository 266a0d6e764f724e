#include "slrd/initialization.hpp"

#include "slrd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace slrd {

namespace {

// median with the even-count convention (mean of the two central order
// statistics); consumes the buffer
double median_destructive(std::vector<double>& values)
{
    const std::size_t n = values.size();
    const std::size_t hi = n / 2;
    std::nth_element(values.begin(), values.begin() + hi, values.end());
    const double upper = values[hi];
    if (n % 2 == 1)
        return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + hi);
    return 0.5 * (lower + upper);
}

Matrix submatrix(const Matrix& X, const IndexSet& rows, const IndexSet& cols)
{
    Matrix S(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (Index p = 0; p < S.rows(); ++p)
        for (Index q = 0; q < S.cols(); ++q)
            S(p, q) = X(rows[static_cast<std::size_t>(p)], cols[static_cast<std::size_t>(q)]);
    return S;
}

} // namespace

SigmaEstimate estimate_sigma(const Matrix& X)
{
    if (X.size() == 0)
        throw InvalidInput("cannot estimate a noise level from an empty matrix");

    std::vector<double> buffer(X.data(), X.data() + X.size());
    const double center = median_destructive(buffer);
    for (double& v : buffer)
        v = std::abs(v - center);
    const double mad = median_destructive(buffer);

    SigmaEstimate out;
    out.value = 1.4826 * mad;
    out.degenerate = out.value == 0.0;
    return out;
}

std::vector<std::string> validate(const InitConfig& config)
{
    if (!(config.alpha > 0.0))
        throw InvalidInput("screening constant must be positive");
    if (!(config.beta > 0.0))
        throw InvalidInput("threshold constant must be positive");
    if (config.rank && *config.rank < 1)
        throw InvalidInput("requested rank must be positive");

    std::vector<std::string> warnings;
    if (config.beta < 4.0)
        warnings.push_back("threshold constant beta = " + std::to_string(config.beta) +
                           " is below the supported minimum of 4; proceeding anyway");
    return warnings;
}

std::pair<double, double> screening_cutoffs(Index m, Index n, double sigma, double alpha)
{
    if (m < 2 || n < 2)
        throw InvalidInput("screening needs at least two rows and columns");
    if (!(sigma > 0.0) || !(alpha > 0.0))
        throw InvalidInput("screening needs positive sigma and alpha");

    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double row_cutoff = sigma * sigma * (nd + alpha * std::sqrt(nd * std::log(nd)));
    const double col_cutoff = sigma * sigma * (md + alpha * std::sqrt(md * std::log(md)));
    return {row_cutoff, col_cutoff};
}

ScreeningSets select_screening_sets(const Matrix& X, double sigma, double alpha)
{
    const auto [row_cutoff, col_cutoff] = screening_cutoffs(X.rows(), X.cols(), sigma, alpha);

    ScreeningSets out;
    for (Index i = 0; i < X.rows(); ++i)
        if (X.row(i).squaredNorm() >= row_cutoff)
            out.rows.push_back(i);
    for (Index j = 0; j < X.cols(); ++j)
        if (X.col(j).squaredNorm() >= col_cutoff)
            out.cols.push_back(j);
    return out;
}

Matrix build_screened_matrix(const Matrix& X, const IndexSet& rows, const IndexSet& cols)
{
    Matrix out = Matrix::Zero(X.rows(), X.cols());
    for (Index i : rows)
        for (Index j : cols)
            out(i, j) = X(i, j);
    return out;
}

double rank_cutoff_delta(Index i, Index j, Index m, Index n)
{
    if (i < 1 || j < 1 || i > m || j > n)
        throw InvalidInput("screened block sizes out of range");

    const double id = static_cast<double>(i);
    const double jd = static_cast<double>(j);
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double inner = 2.0 * id * (1.0 + std::log(md / id)) +
                         2.0 * jd * (1.0 + std::log(nd / jd)) + 8.0 * std::log(md);
    return std::sqrt(id) + std::sqrt(jd) + std::sqrt(inner);
}

Index select_rank(const Matrix& X, const IndexSet& rows, const IndexSet& cols, double sigma)
{
    if (!(sigma > 0.0))
        throw InvalidInput("rank selection needs a positive sigma");
    if (rows.empty() || cols.empty())
        return 0;

    const Vector sv = singular_values(submatrix(X, rows, cols));
    const double cutoff = sigma * rank_cutoff_delta(static_cast<Index>(rows.size()),
                                                    static_cast<Index>(cols.size()),
                                                    X.rows(), X.cols());
    Index r_hat = 0;
    while (r_hat < sv.size() && sv(r_hat) >= cutoff)
        ++r_hat;
    return r_hat;
}

InitResult initialize(const Matrix& X, double sigma, const InitConfig& config)
{
    validate(config);
    if (!(sigma > 0.0))
        throw InvalidInput("initialization needs a positive sigma");

    const ScreeningSets screen = select_screening_sets(X, sigma, config.alpha);

    InitResult out;
    out.sigma_hat = sigma;
    out.i0 = screen.rows;
    out.j0 = screen.cols;
    out.r_hat = select_rank(X, screen.rows, screen.cols, sigma);

    const Index rank = config.rank.value_or(out.r_hat);
    if (rank == 0) {
        out.U0 = Matrix::Zero(X.rows(), 0);
        out.V0 = Matrix::Zero(X.cols(), 0);
        return out;
    }
    if (screen.rows.empty() || screen.cols.empty())
        throw EmptyScreen("screening kept no rows or no columns, cannot initialize rank " +
                          std::to_string(rank));
    if (rank > static_cast<Index>(std::min(screen.rows.size(), screen.cols.size())))
        throw InitRankDeficient("screened block is " + std::to_string(screen.rows.size()) +
                                " x " + std::to_string(screen.cols.size()) +
                                ", too small for rank " + std::to_string(rank));

    // the screened matrix is zero outside the screening block, so its
    // SVD is the block SVD scattered back onto the full index range;
    // scattering keeps rows outside the screening sets exactly zero
    const Svd block = truncated_svd(submatrix(X, screen.rows, screen.cols), rank);
    if (!(block.d(rank - 1) > 1e-12 * block.d(0)))
        throw InitRankDeficient("screened matrix has numerical rank below " +
                                std::to_string(rank));

    out.U0 = Matrix::Zero(X.rows(), rank);
    for (std::size_t p = 0; p < screen.rows.size(); ++p)
        out.U0.row(screen.rows[p]) = block.U.row(static_cast<Index>(p));
    out.V0 = Matrix::Zero(X.cols(), rank);
    for (std::size_t q = 0; q < screen.cols.size(); ++q)
        out.V0.row(screen.cols[q]) = block.V.row(static_cast<Index>(q));

    canonicalize_column_signs(out.U0);
    canonicalize_column_signs(out.V0);
    out.d_r0 = block.d(rank - 1);
    return out;
}

namespace {

IterationBudget budget_from(double constant, double log_term, Index m)
{
    IterationBudget out;
    const double steps =
        constant * (std::log2(static_cast<double>(m)) + log_term);
    out.steps = std::max(1, static_cast<int>(std::ceil(steps)));
    return out;
}

} // namespace

IterationBudget compute_T_hat(double d_r0, double gamma, Index m)
{
    if (m < 2)
        throw InvalidInput("iteration budget needs m >= 2");
    if (!(gamma > 0.0))
        throw InvalidInput("iteration budget needs a positive threshold level");

    if (!(d_r0 > gamma))
        return {1, true};
    return budget_from(1.1 / 2.0, 2.0 * std::log(d_r0 / gamma), m);
}

IterationBudget compute_T_oracle(double d_r, Index k, Index l, double gamma_u,
                                 double gamma_v, Index m)
{
    if (m < 2)
        throw InvalidInput("iteration budget needs m >= 2");
    if (k < 1 || l < 1)
        throw InvalidInput("iteration budget needs positive support sizes");
    if (!(gamma_u > 0.0) || !(gamma_v > 0.0))
        throw InvalidInput("iteration budget needs positive threshold levels");

    const double floor_sq = std::max(static_cast<double>(k) * gamma_u * gamma_u,
                                     static_cast<double>(l) * gamma_v * gamma_v);
    if (!(d_r * d_r > floor_sq))
        return {1, true};
    return budget_from(1.01 / 2.0, std::log(d_r * d_r / floor_sq), m);
}

} // namespace slrd
