#include "slrd/model.hpp"
#include "slrd/spectral.hpp"

#include <doctest.h>

#include <cmath>

using namespace slrd;

namespace {

SignalFactors rank_one_corner(Index m, Index n, double d)
{
    SignalFactors f;
    f.U = Matrix::Zero(m, 1);
    f.U(0, 0) = 1.0;
    f.V = Matrix::Zero(n, 1);
    f.V(0, 0) = 1.0;
    f.d = Vector::Constant(1, d);
    f.row_support = {0};
    f.col_support = {0};
    return f;
}

} // namespace

TEST_CASE("param space bounds")
{
    CHECK_NOTHROW(validate(ParamSpaceSpec{6, 5, 3, 2, 2}));
    CHECK_THROWS_AS(validate(ParamSpaceSpec{6, 5, 3, 2, 3}), InvalidInput);
    CHECK_THROWS_AS(validate(ParamSpaceSpec{6, 5, 7, 2, 2}), InvalidInput);
    CHECK_THROWS_AS(validate(ParamSpaceSpec{6, 5, 3, 0, 1}), InvalidInput);
}

TEST_CASE("rank-one corner signal")
{
    const Matrix m = compose_signal(rank_one_corner(2, 2, 3.0));
    Matrix expected(2, 2);
    expected << 3, 0, 0, 0;
    CHECK((m - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rank-one signal with a spread left factor")
{
    SignalFactors f;
    const double s = 1.0 / std::sqrt(2.0);
    f.U = Matrix(2, 1);
    f.U << s, s;
    f.V = Matrix::Zero(2, 1);
    f.V(0, 0) = 1.0;
    f.d = Vector::Constant(1, 2.0);
    f.row_support = {0, 1};
    f.col_support = {0};

    const Matrix m = compose_signal(f);
    CHECK(m(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(m(1, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(m(0, 1) == 0.0);
    CHECK(m(1, 1) == 0.0);
}

TEST_CASE("random factors compose to the declared rank and energy")
{
    // orthonormalize two fixed vectors on rows {1, 3, 4} of a 6 x 5 signal
    SignalFactors f;
    f.U = Matrix::Zero(6, 2);
    f.U(1, 0) = 0.6;
    f.U(3, 0) = 0.8;
    f.U(1, 1) = -0.8;
    f.U(3, 1) = 0.6;
    f.V = Matrix::Zero(5, 2);
    f.V(0, 0) = 1.0;
    f.V(4, 1) = 1.0;
    f.d = Vector(2);
    f.d << 5.0, 2.0;
    f.row_support = {1, 3};
    f.col_support = {0, 4};

    const Matrix m = compose_signal(f);
    CHECK(numerical_rank(m) == 2);
    const double energy = f.d.squaredNorm();
    CHECK(m.squaredNorm() == doctest::Approx(energy).epsilon(1e-10));

    // nonzeros confined to the declared supports
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if ((i != 1 && i != 3) || (j != 0 && j != 4))
                CHECK(m(i, j) == 0.0);
}

TEST_CASE("factor validation rejects broken inputs")
{
    SignalFactors f = rank_one_corner(3, 3, 2.0);

    SignalFactors bad = f;
    bad.U(0, 0) = 2.0;
    CHECK_THROWS_AS(compose_signal(bad), InvalidInput);

    bad = f;
    bad.d(0) = -1.0;
    CHECK_THROWS_AS(compose_signal(bad), InvalidInput);

    bad = f;
    bad.U(2, 0) = 1e-9;  // nonzero outside the declared support
    CHECK_THROWS_AS(compose_signal(bad), InvalidInput);

    bad = f;
    bad.row_support = {0, 0};
    CHECK_THROWS_AS(compose_signal(bad), InvalidInput);

    SignalFactors increasing;
    increasing.U = Matrix::Identity(3, 2);
    increasing.V = Matrix::Identity(3, 2);
    increasing.d = Vector(2);
    increasing.d << 1.0, 2.0;
    increasing.row_support = {0, 1};
    increasing.col_support = {0, 1};
    CHECK_THROWS_AS(compose_signal(increasing), InvalidInput);
}

TEST_CASE("zero-sigma noise returns the signal exactly")
{
    const Matrix signal = compose_signal(rank_one_corner(4, 3, 2.5));
    const Matrix noisy = add_noise(signal, 0.0, 99);
    CHECK((noisy - signal).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unit noise has standard sample moments")
{
    const Matrix zero = Matrix::Zero(200, 200);
    const Matrix x = add_noise(zero, 1.0, 2024);
    const double mean = x.mean();
    const double var = (x.array() - mean).square().sum() / (x.size() - 1.0);
    CHECK(std::abs(mean) < 0.05);
    CHECK(var > 0.9);
    CHECK(var < 1.1);
}

TEST_CASE("noise is bit-identical across calls and seed-sensitive")
{
    const Matrix signal = Matrix::Constant(8, 9, 0.5);
    const Matrix a = add_noise(signal, 2.0, 7);
    const Matrix b = add_noise(signal, 2.0, 7);
    const Matrix c = add_noise(signal, 2.0, 8);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}
