#include "slrd/denoiser.hpp"
#include "slrd/experiments.hpp"
#include "slrd/initialization.hpp"
#include "slrd/rng.hpp"
#include "slrd/spectral.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace slrd;

namespace {

Matrix random_matrix(Index rows, Index cols, Rng& rng)
{
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            out(i, j) = rng.normal();
    return out;
}

// cutoff formulas evaluated in extended precision, independent of the
// implementation
double row_cutoff_reference(long double m, long double n, long double sigma, long double alpha)
{
    (void)m;
    return static_cast<double>(sigma * sigma * (n + alpha * std::sqrt(n * std::log(n))));
}

double col_cutoff_reference(long double m, long double n, long double sigma, long double alpha)
{
    (void)n;
    return static_cast<double>(sigma * sigma * (m + alpha * std::sqrt(m * std::log(m))));
}

double delta_reference(long double i, long double j, long double m, long double n)
{
    const long double inner = 2.0L * i * (1.0L + std::log(m / i)) +
                              2.0L * j * (1.0L + std::log(n / j)) + 8.0L * std::log(m);
    return static_cast<double>(std::sqrt(i) + std::sqrt(j) + std::sqrt(inner));
}

} // namespace

TEST_CASE("noise scale from the median absolute deviation")
{
    CHECK(estimate_sigma(Matrix::Constant(3, 3, 5.0)).value == 0.0);
    CHECK(estimate_sigma(Matrix::Constant(3, 3, 5.0)).degenerate);

    Matrix odd(1, 5);
    odd << 1.0, 2.0, 3.0, 4.0, 100.0;
    const SigmaEstimate from_odd = estimate_sigma(odd);
    CHECK(from_odd.value == 1.4826);
    CHECK(!from_odd.degenerate);

    // even count: median 2.5, deviations {1.5, 0.5, 0.5, 1.5}, MAD 1
    Matrix even(2, 2);
    even << 1.0, 3.0, 2.0, 4.0;
    CHECK(estimate_sigma(even).value == 1.4826);
}

TEST_CASE("noise scale is consistent for standard normal entries")
{
    Rng rng(42);
    const Matrix X = random_matrix(500, 500, rng);
    const SigmaEstimate est = estimate_sigma(X);
    CHECK(!est.degenerate);
    CHECK(est.value >= 0.95);
    CHECK(est.value <= 1.05);
}

TEST_CASE("screening cutoffs")
{
    const auto [row_cutoff, col_cutoff] = screening_cutoffs(2000, 1000, 1.0, 4.0);
    CHECK(row_cutoff == doctest::Approx(1332.451627253822).epsilon(1e-12));
    CHECK(col_cutoff == doctest::Approx(2493.1823990222549).epsilon(1e-12));

    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const Index m = static_cast<Index>(2 + rng.uniform_below(5000));
        const Index n = static_cast<Index>(2 + rng.uniform_below(5000));
        const double sigma = 0.1 + 3.0 * rng.uniform();
        const double alpha = 1.0 + 5.0 * rng.uniform();
        const auto [rc, cc] = screening_cutoffs(m, n, sigma, alpha);
        CHECK(rc == doctest::Approx(row_cutoff_reference(m, n, sigma, alpha)).epsilon(1e-12));
        CHECK(cc == doctest::Approx(col_cutoff_reference(m, n, sigma, alpha)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(screening_cutoffs(1, 10, 1.0, 4.0), InvalidInput);
    CHECK_THROWS_AS(screening_cutoffs(10, 10, 0.0, 4.0), InvalidInput);
}

TEST_CASE("screening keeps exactly the high-energy rows and columns")
{
    const ScreeningSets empty = select_screening_sets(Matrix::Zero(6, 5), 1.0, 4.0);
    CHECK(empty.rows.empty());
    CHECK(empty.cols.empty());

    // one entry carrying twice the row cutoff lifts its row and column
    // above both cutoffs
    const auto [row_cutoff, col_cutoff] = screening_cutoffs(6, 5, 1.0, 4.0);
    Matrix X = Matrix::Zero(6, 5);
    X(2, 0) = std::sqrt(2.0 * std::max(row_cutoff, col_cutoff));
    const ScreeningSets sets = select_screening_sets(X, 1.0, 4.0);
    CHECK(sets.rows == IndexSet{2});
    CHECK(sets.cols == IndexSet{0});
}

TEST_CASE("screening shrinks as alpha grows")
{
    Rng rng(11);
    const Matrix X = 2.0 * random_matrix(40, 30, rng);
    IndexSet prev_rows;
    IndexSet prev_cols;
    bool first = true;
    for (double alpha : {1.0, 2.5, 4.0, 6.0}) {
        const ScreeningSets sets = select_screening_sets(X, 1.0, alpha);
        if (!first) {
            CHECK(std::includes(prev_rows.begin(), prev_rows.end(), sets.rows.begin(),
                                sets.rows.end()));
            CHECK(std::includes(prev_cols.begin(), prev_cols.end(), sets.cols.begin(),
                                sets.cols.end()));
        }
        prev_rows = sets.rows;
        prev_cols = sets.cols;
        first = false;
    }
}

TEST_CASE("screened matrix masking")
{
    Rng rng(13);
    const Matrix X = random_matrix(3, 3, rng);

    IndexSet all_rows{0, 1, 2};
    IndexSet all_cols{0, 1, 2};
    CHECK(build_screened_matrix(X, all_rows, all_cols) == X);

    CHECK(build_screened_matrix(X, IndexSet{}, all_cols) == Matrix::Zero(3, 3));

    const Matrix masked = build_screened_matrix(X, IndexSet{1}, IndexSet{2});
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j)
            CHECK(masked(i, j) == ((i == 1 && j == 2) ? X(1, 2) : 0.0));

    const Matrix twice = build_screened_matrix(masked, IndexSet{1}, IndexSet{2});
    CHECK(twice == masked);
}

TEST_CASE("rank selection cutoff")
{
    CHECK(rank_cutoff_delta(50, 50, 2000, 1000) ==
          doctest::Approx(44.626039449244004).epsilon(1e-12));

    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const Index m = static_cast<Index>(2 + rng.uniform_below(5000));
        const Index n = static_cast<Index>(2 + rng.uniform_below(5000));
        const Index i = static_cast<Index>(1 + rng.uniform_below(static_cast<std::uint64_t>(m)));
        const Index j = static_cast<Index>(1 + rng.uniform_below(static_cast<std::uint64_t>(n)));
        CHECK(rank_cutoff_delta(i, j, m, n) ==
              doctest::Approx(delta_reference(i, j, m, n)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(rank_cutoff_delta(0, 5, 10, 10), InvalidInput);
    CHECK_THROWS_AS(rank_cutoff_delta(11, 5, 10, 10), InvalidInput);
}

TEST_CASE("rank selection counts singular values above the cutoff")
{
    CHECK(select_rank(Matrix::Zero(10, 8), IndexSet{}, IndexSet{0, 1}, 1.0) == 0);

    // plant a diagonal block whose singular values straddle the cutoff
    const Index m = 40;
    const Index n = 30;
    IndexSet rows{0, 1, 2, 3};
    IndexSet cols{0, 1, 2, 3};
    const double delta = rank_cutoff_delta(4, 4, m, n);
    Matrix X = Matrix::Zero(m, n);
    X(0, 0) = 2.0 * delta;
    X(1, 1) = 1.5 * delta;
    X(2, 2) = 1.2 * delta;
    X(3, 3) = 0.8 * delta;
    CHECK(select_rank(X, rows, cols, 1.0) == 3);

    // scale consistency: (cX, c sigma) selects the same rank
    CHECK(select_rank(Matrix(5.0 * X), rows, cols, 5.0) == 3);

    X(0, 0) = 0.5 * delta;
    X(1, 1) = 0.4 * delta;
    X(2, 2) = 0.3 * delta;
    X(3, 3) = 0.2 * delta;
    CHECK(select_rank(X, rows, cols, 1.0) == 0);
}

TEST_CASE("initializer recovers a noiseless block exactly")
{
    // rank-one signal on rows {0,1} x cols {0,1}, no noise
    Vector u = Vector::Zero(8);
    u(0) = 3.0 / 5.0;
    u(1) = 4.0 / 5.0;
    Vector v = Vector::Zero(6);
    v(0) = 1.0 / std::sqrt(2.0);
    v(1) = 1.0 / std::sqrt(2.0);
    const Matrix X = 50.0 * u * v.transpose();

    const InitResult init = initialize(X, 0.01, InitConfig{});
    CHECK(init.r_hat == 1);
    CHECK(init.i0 == IndexSet{0, 1});
    CHECK(init.j0 == IndexSet{0, 1});
    CHECK(init.d_r0 == doctest::Approx(50.0).epsilon(1e-12));

    CHECK(sin_theta(init.V0, Matrix(v)).frobenius <= 1e-8);
    CHECK(sin_theta(init.U0, Matrix(u)).frobenius <= 1e-8);

    // support containment is exact, not approximate
    for (Index i = 2; i < 8; ++i)
        CHECK(init.U0(i, 0) == 0.0);
    for (Index j = 2; j < 6; ++j)
        CHECK(init.V0(j, 0) == 0.0);
}

TEST_CASE("initializer degenerate and deficient inputs")
{
    InitConfig want_one;
    want_one.rank = 1;
    CHECK_THROWS_AS(initialize(Matrix::Zero(8, 6), 1.0, want_one), EmptyScreen);

    const InitResult empty = initialize(Matrix::Zero(8, 6), 1.0, InitConfig{});
    CHECK(empty.r_hat == 0);
    CHECK(empty.U0.cols() == 0);
    CHECK(empty.V0.cols() == 0);

    // a strong rank-one block cannot support a rank-two request
    Matrix X = Matrix::Zero(8, 6);
    X.topLeftCorner(2, 2).setConstant(40.0);
    InitConfig want_two;
    want_two.rank = 2;
    CHECK_THROWS_AS(initialize(X, 1.0, want_two), InitRankDeficient);

    CHECK_THROWS_AS(initialize(X, 0.0, InitConfig{}), InvalidInput);
    InitConfig zero_rank;
    zero_rank.rank = 0;
    CHECK_THROWS_AS(initialize(X, 1.0, zero_rank), InvalidInput);
    InitConfig bad_alpha;
    bad_alpha.alpha = -1.0;
    CHECK_THROWS_AS(initialize(X, 1.0, bad_alpha), InvalidInput);
}

TEST_CASE("initializer output is bit-stable and sign-canonical")
{
    GeneratorSpec spec;
    spec.m = 60;
    spec.n = 40;
    spec.k = 8;
    spec.l = 8;
    spec.r = 3;
    spec.singular_values = Vector::LinSpaced(3, 60.0, 40.0);
    spec.seed = 99;
    const Instance instance = generate_instance(spec);

    const InitResult a = initialize(instance.observed, 1.0, InitConfig{});
    const InitResult b = initialize(instance.observed, 1.0, InitConfig{});
    CHECK(a.U0 == b.U0);
    CHECK(a.V0 == b.V0);
    CHECK(a.r_hat == b.r_hat);

    Matrix pinned = a.U0;
    canonicalize_column_signs(pinned);
    CHECK(pinned == a.U0);
    pinned = a.V0;
    canonicalize_column_signs(pinned);
    CHECK(pinned == a.V0);
}

TEST_CASE("config validation warns below the supported threshold constant")
{
    InitConfig config;
    CHECK(validate(config).empty());
    config.beta = 3.0;
    CHECK(validate(config).size() == 1);
    config.beta = 0.0;
    CHECK_THROWS_AS(validate(config), InvalidInput);
}

TEST_CASE("first-step budget from the screened spectrum")
{
    const double gamma = compute_gamma(10, 3.0, 2000);
    CHECK(gamma * gamma == doctest::Approx(86.664610904911918).epsilon(1e-12));

    const IterationBudget nine = compute_T_hat(110.0, gamma, 2000);
    CHECK(nine.steps == 9);
    CHECK(!nine.low_signal);

    // log2(2) + log(e^2) = 3, times 0.55, ceiled
    const IterationBudget two = compute_T_hat(2.0 * std::exp(1.0), 2.0, 2);
    CHECK(two.steps == 2);
    CHECK(!two.low_signal);

    const IterationBudget vacuous = compute_T_hat(gamma, gamma, 2000);
    CHECK(vacuous.steps == 1);
    CHECK(vacuous.low_signal);

    CHECK_THROWS_AS(compute_T_hat(110.0, 0.0, 2000), InvalidInput);
    CHECK_THROWS_AS(compute_T_hat(110.0, 9.0, 1), InvalidInput);
}

TEST_CASE("budget matches an extended-precision reference on random tuples")
{
    Rng rng(23);
    int compared = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const Index m = static_cast<Index>(2 + rng.uniform_below(4000));
        const double gamma = 0.5 + 20.0 * rng.uniform();
        const double d = gamma * (1.0 + 1000.0 * rng.uniform());
        const long double raw =
            0.55L * (std::log2(static_cast<long double>(m)) +
                     2.0L * std::log(static_cast<long double>(d) / gamma));
        // skip tuples landing within rounding distance of an integer
        if (std::abs(raw - std::nearbyint(raw)) < 1e-9)
            continue;
        ++compared;
        CHECK(compute_T_hat(d, gamma, m).steps == static_cast<int>(std::ceil(raw)));
    }
    CHECK(compared >= 60);
}

TEST_CASE("oracle budget from true signal strength")
{
    const double gamma = compute_gamma(10, 3.0, 2000);
    const IterationBudget seven = compute_T_oracle(110.0, 50, 50, gamma, gamma, 2000);
    CHECK(seven.steps == 7);
    CHECK(!seven.low_signal);

    // the floor is the larger of the two support terms
    const IterationBudget lop = compute_T_oracle(400.0, 10, 90, 2.0, 2.0, 2000);
    const IterationBudget sym = compute_T_oracle(400.0, 90, 90, 2.0, 2.0, 2000);
    CHECK(lop.steps == sym.steps);

    const IterationBudget vacuous =
        compute_T_oracle(std::sqrt(50.0) * gamma, 50, 50, gamma, gamma, 2000);
    CHECK(vacuous.steps == 1);
    CHECK(vacuous.low_signal);
}

TEST_CASE("initializer lands close to the true right factor under noise")
{
    GeneratorSpec spec = bench_base_spec(BenchScale::Full);
    int close = 0;
    const int reps = 50;
    for (int rep = 0; rep < reps; ++rep) {
        spec.seed = derive_seed(2026, static_cast<std::uint64_t>(rep));
        const Instance instance = generate_instance(spec);
        const InitResult init = initialize(instance.observed, 1.0, InitConfig{});
        if (init.V0.cols() != spec.r)
            continue;
        const SinTheta angle = sin_theta(init.V0, instance.factors.V);
        if (angle.op < 1.0 / 3.0 && angle.frobenius < 0.6)
            ++close;
    }
    CHECK(close >= 48);
}
