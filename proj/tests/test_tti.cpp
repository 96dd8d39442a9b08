#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qtti/construct.hpp"
#include "qtti/errors.hpp"
#include "qtti/tti.hpp"
#include "test_support.hpp"

using namespace qtti;
using qtti::testing::dense_convolution;
using qtti::testing::max_abs;
using qtti::testing::max_abs_diff;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> samples(std::size_t n, auto&& f) {
    std::vector<double> v(std::size_t{1} << n);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(static_cast<double>(i) / static_cast<double>(v.size()));
    return v;
}

TensorTrain qtt(const std::vector<double>& v) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < v.size()) ++n;
    return tt_from_dense(DenseTensor(std::vector<std::size_t>(n, 2), v));
}

std::vector<double> random_values(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<double> v(count);
    for (double& x : v) x = normal(gen);
    return v;
}

std::vector<Kernel> all_kernels() {
    return {linear_kernel(), keys_cubic(), bspline_cubic(), cubic_sixpoint(), lagrange_kernel(2),
            lagrange_kernel(3), lagrange_kernel(5), mitchell_netravali(1.0 / 3, 1.0 / 3), nearest_kernel()};
}

} // namespace

TEST(Tti1d, DenseOracleEquivalencePeriodic) {
    for (const auto& kernel : all_kernels()) {
        for (std::size_t n : {4u, 5u}) {
            const auto f = random_values(std::size_t{1} << n, 17 + n);
            for (std::size_t m : {1u, 2u, 3u}) {
                const auto op = build_tti_1d(kernel, n, m);
                const auto fine = tt_to_dense(apply_tti(op, qtt(f), Tolerance::exact())).values;
                EXPECT_LE(max_abs_diff(fine, dense_convolution(f, kernel, m)), 1e-12)
                    << kernel.name << " n=" << n << " m=" << m;
            }
        }
    }
}

TEST(Tti1d, StructuralRankBounds) {
    for (const auto& kernel : all_kernels()) {
        for (std::size_t n : {3u, 4u, 6u}) {
            for (std::size_t m : {1u, 2u, 4u}) {
                for (auto boundary : {Boundary::periodic, Boundary::clamped}) {
                    TTIOptions o;
                    o.boundary = boundary;
                    const auto op = build_tti_1d(kernel, n, m, o);
                    for (std::size_t r : op.coarse_ranks()) EXPECT_LE(r, kernel.support_points + 1) << kernel.name;
                    for (std::size_t r : op.fine_ranks()) EXPECT_LE(r, kernel.degree + 1) << kernel.name;
                }
            }
        }
    }
    const auto keys = build_tti_1d(keys_cubic(), 5, 3);
    for (std::size_t r : keys.coarse_ranks()) EXPECT_LE(r, 5u);
    for (std::size_t r : keys.fine_ranks()) EXPECT_LE(r, 4u);
}

TEST(Tti1d, LinearReproducesRampInterior) {
    const std::size_t n = 3, m = 2;
    const auto f = samples(n, [](double x) { return x; });
    const auto fine = tt_to_dense(apply_tti(build_tti_1d(linear_kernel(), n, m), qtt(f), {})).values;
    // The last cell wraps to f_0 periodically; every other point is exact.
    for (std::size_t i = 0; i < 28; ++i) EXPECT_NEAR(fine[i], i / 32.0, 1e-14);
}

TEST(Tti1d, LinearSingleScaleIsMidpointRule) {
    const auto f = random_values(16, 3);
    const auto fine = tt_to_dense(apply_tti(build_tti_1d(linear_kernel(), 4, 1), qtt(f), {})).values;
    for (std::size_t a = 0; a < 16; ++a) {
        EXPECT_NEAR(fine[2 * a], f[a], 1e-14);
        EXPECT_NEAR(fine[2 * a + 1], 0.5 * (f[a] + f[(a + 1) % 16]), 1e-14);
    }
}

TEST(Tti1d, KeysSineMatchesConvolution) {
    const auto f = samples(5, [](double x) { return std::sin(2 * kPi * x); });
    const auto op = build_tti_1d(keys_cubic(), 5, 3);
    const auto fine = tt_to_dense(apply_tti(op, qtt(f), Tolerance::exact())).values;
    EXPECT_EQ(fine.size(), 256u);
    EXPECT_LE(max_abs_diff(fine, dense_convolution(f, keys_cubic(), 3)), 1e-12);
}

TEST(Tti1d, DerivativeOfSine) {
    for (std::size_t n : {6u, 7u}) {
        const auto f = samples(n, [](double x) { return std::sin(2 * kPi * x); });
        TTIOptions o;
        o.derivative = 1;
        const auto op = build_tti_1d(keys_cubic(), n, 3, o);
        const auto fine = tt_to_dense(apply_tti(op, qtt(f), Tolerance::exact())).values;
        const double h = 1.0 / static_cast<double>(f.size());
        const auto ref = dense_convolution(f, keys_cubic(), 3, 1, h);
        EXPECT_LE(max_abs_diff(fine, ref), 1e-9);
        double err = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i)
            err = std::max(err, std::abs(fine[i] - 2 * kPi * std::cos(2 * kPi * i / double(fine.size()))));
        EXPECT_LT(err, 60.0 * h * h * std::pow(2 * kPi, 3));
    }
}

TEST(Tti1d, SecondDerivativeBspline) {
    const std::size_t n = 6;
    const auto f = samples(n, [](double x) { return std::cos(2 * kPi * x); });
    TTIOptions o;
    o.derivative = 2;
    const auto fine = tt_to_dense(apply_tti(build_tti_1d(bspline_cubic(), n, 2, o), qtt(f), {})).values;
    EXPECT_LE(max_abs_diff(fine, dense_convolution(f, bspline_cubic(), 2, 2, 1.0 / 64)), 1e-8);
}

TEST(Tti1d, NodeConsistencyForInterpolatingKernels) {
    const auto f = random_values(32, 5);
    for (const auto& kernel : {linear_kernel(), keys_cubic(), cubic_sixpoint(), lagrange_kernel(4)}) {
        const auto fine = tt_to_dense(apply_tti(build_tti_1d(kernel, 5, 3), qtt(f), {})).values;
        for (std::size_t a = 0; a < 32; ++a) EXPECT_NEAR(fine[a * 8], f[a], 1e-13) << kernel.name;
    }
}

TEST(Tti1d, CompositionOfLinearRefinements) {
    const auto f = random_values(16, 8);
    const auto once = apply_tti(build_tti_1d(linear_kernel(), 4, 3), qtt(f), {});
    const auto twice = apply_tti(build_tti_1d(linear_kernel(), 5, 2),
                                 apply_tti(build_tti_1d(linear_kernel(), 4, 1), qtt(f), {}), {});
    EXPECT_LT(max_abs_diff(tt_to_dense(once).values, tt_to_dense(twice).values), 1e-13);
    // Cubic: two-step differs from one-step by at most the interpolation error.
    const auto g = samples(6, [](double x) { return std::sin(2 * kPi * x); });
    const auto k1 = apply_tti(build_tti_1d(keys_cubic(), 6, 3), qtt(g), {});
    const auto k2 = apply_tti(build_tti_1d(keys_cubic(), 7, 2), apply_tti(build_tti_1d(keys_cubic(), 6, 1), qtt(g), {}), {});
    EXPECT_LT(max_abs_diff(tt_to_dense(k1).values, tt_to_dense(k2).values), 1e-4);
}

TEST(Tti1d, FineRanksAfterApply) {
    const auto f = random_values(64, 2);
    const auto out = apply_tti(build_tti_1d(keys_cubic(), 6, 5), qtt(f), Tolerance::relative(1e-12));
    const auto r = out.ranks();
    for (std::size_t k = 7; k < out.order(); ++k) EXPECT_LE(r[k], 4u);
}

TEST(Tti1d, Preconditions) {
    EXPECT_THROW(build_tti_1d(cubic_sixpoint(), 2, 1), DimensionError);
    TTIOptions o;
    o.derivative = 2;
    EXPECT_THROW(build_tti_1d(keys_cubic(), 4, 1, o), ConfigError);
    const auto op = build_tti_1d(keys_cubic(), 4, 1);
    EXPECT_THROW(apply_tti(op, qtt(random_values(32, 1)), {}), DimensionError);
}

TEST(Tti1d, ZeroExtraScalesIsIdentityForInterpolatingKernels) {
    const auto f = random_values(16, 4);
    const auto out = tt_to_dense(apply_tti(build_tti_1d(keys_cubic(), 4, 0), qtt(f), {})).values;
    EXPECT_LT(max_abs_diff(out, f), 1e-13);
}

TEST(Clamped, CorrectionMatchesDenseEdgeClamp) {
    const std::size_t n = 4, m = 2;
    const auto f = samples(n, [](double x) { return x; });
    TTIOptions o;
    o.boundary = Boundary::clamped;
    const auto op = build_tti_1d(keys_cubic(), n, m, o);
    const auto base = apply_tti(op, qtt(f), Tolerance::exact());
    const auto corr = clamped_boundary_correction(op, qtt(f));
    EXPECT_LE(corr.max_rank(), 4u);
    const auto total = tt_to_dense(add(base, corr)).values;
    const auto ref = dense_convolution(f, keys_cubic(), m, 0, 1.0, Boundary::clamped, GhostFill::edge);
    EXPECT_EQ(total.size(), 64u);
    EXPECT_LT(max_abs_diff(total, ref), 1e-13);
}

TEST(Clamped, GhostFillsAndFoldedOperator) {
    for (const auto& kernel : {keys_cubic(), cubic_sixpoint(), bspline_cubic(), linear_kernel()}) {
        for (auto fill : {GhostFill::edge, GhostFill::reflect, GhostFill::zero}) {
            const auto f = random_values(32, 6);
            TTIOptions o;
            o.boundary = Boundary::clamped;
            o.ghost = fill;
            const auto ref = dense_convolution(f, kernel, 3, 0, 1.0, Boundary::clamped, fill);
            const auto op = build_tti_1d(kernel, 5, 3, o);
            const auto corr = clamped_boundary_correction(op, qtt(f));
            EXPECT_LE(corr.max_rank(), kernel.support_points);
            const auto split = tt_to_dense(add(apply_tti(op, qtt(f), {}), corr)).values;
            EXPECT_LT(max_abs_diff(split, ref), 1e-12) << kernel.name;
            o.fold_boundary = true;
            const auto folded = build_tti_1d(kernel, 5, 3, o);
            EXPECT_LT(max_abs_diff(tt_to_dense(apply_tti(folded, qtt(f), {})).values, ref), 1e-12) << kernel.name;
            EXPECT_EQ(norm2(clamped_boundary_correction(folded, qtt(f))), 0.0);
        }
    }
}

TEST(Clamped, PeriodicCorrectionIsZero) {
    const auto op = build_tti_1d(keys_cubic(), 4, 2);
    EXPECT_EQ(norm2(clamped_boundary_correction(op, qtt(random_values(16, 1)))), 0.0);
}

TEST(Interleaved, SeparableProductMatchesOuterProduct) {
    const std::size_t n = 3, m = 2;
    const auto fx = random_values(8, 1), gy = random_values(8, 2);
    DenseTensor f2({8, 8});
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) f2.values[i * 8 + j] = fx[i] * gy[j];
    const auto op = build_tti_multidim_interleaved(linear_kernel(), 2, n, m, {0, 0});
    const auto out = deinterleave(apply_tti(op, interleave(f2), {}), 2).values;
    const auto rx = dense_convolution(fx, linear_kernel(), m), ry = dense_convolution(gy, linear_kernel(), m);
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(out[i * 32 + j], rx[i] * ry[j], 1e-13);
}

TEST(Interleaved, KeysOnGaussianMatchesSequentialDense) {
    const std::size_t n = 4, m = 2;
    DenseTensor f2({16, 16});
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) {
            const double x = i / 16.0 - 0.5, y = j / 16.0 - 0.5;
            f2.values[i * 16 + j] = std::exp(-(x * x + 0.8 * x * y + y * y) / 0.04);
        }
    for (auto boundary : {Boundary::periodic, Boundary::clamped}) {
        TTIOptions o;
        o.boundary = boundary;
        const auto op = build_tti_multidim_interleaved(keys_cubic(), 2, n, m, {0, 0}, o);
        for (std::size_t r : op.coarse_ranks()) EXPECT_LE(r, boundary == Boundary::periodic ? 25u : 64u);
        for (std::size_t r : op.fine_ranks()) EXPECT_LE(r, 16u);
        const auto out = deinterleave(apply_tti(op, interleave(f2), {}), 2).values;
        const auto ref = qtti::testing::dense_convolution_2d(f2.values, 16, 16, keys_cubic(), m, boundary);
        EXPECT_LT(max_abs_diff(out, ref), 1e-12);
    }
}

TEST(Interleaved, DeltaKernelWithoutExtensionIsIdentity) {
    const auto op = build_tti_multidim_interleaved(nearest_kernel(), 2, 2, 0, {0, 0});
    const auto m = op_to_dense(op.op).values;
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(m[i * 16 + j], i == j ? 1.0 : 0.0, 1e-14);
}

TEST(Interleaved, ThreeDimensionalRankBound) {
    const auto op = build_tti_multidim_interleaved(keys_cubic(), 3, 3, 2, {0, 0, 0});
    for (std::size_t r : op.fine_ranks()) EXPECT_LE(r, 64u);
    for (std::size_t r : op.coarse_ranks()) EXPECT_LE(r, 125u);
}

TEST(TuckerTti, SeparableSinesMatchPerAxisDense) {
    const std::size_t n = 3, m = 2;
    std::vector<std::vector<double>> axes;
    for (int k = 0; k < 3; ++k) axes.push_back(samples(n, [k](double x) { return std::sin(2 * kPi * (k + 1) * x + k); }));
    DenseTensor f({8, 8, 8});
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            for (std::size_t l = 0; l < 8; ++l) f.values[(i * 8 + j) * 8 + l] = axes[0][i] * axes[1][j] * axes[2][l];
    const auto t = apply_tti_tucker(to_tucker(f), keys_cubic(), m, {0, 0, 0}, Tolerance::exact());
    const auto out = tucker_to_dense(t).values;
    std::vector<std::vector<double>> ref;
    for (const auto& a : axes) ref.push_back(dense_convolution(a, keys_cubic(), m));
    for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < 32; ++j)
            for (std::size_t l = 0; l < 32; ++l)
                ASSERT_NEAR(out[(i * 32 + j) * 32 + l], ref[0][i] * ref[1][j] * ref[2][l], 1e-12);
}

TEST(TuckerTti, TailRanksIndependentOfDimension) {
    for (std::size_t d : {2u, 3u}) {
        std::vector<std::size_t> dims(d, 16);
        DenseTensor f(dims);
        std::mt19937_64 gen(d);
        std::normal_distribution<double> normal;
        for (double& x : f.values) x = normal(gen);
        const auto t = apply_tti_tucker(to_tucker(f), keys_cubic(), 4, std::vector<int>(d, 0), Tolerance::relative(1e-12));
        for (const auto& factor : t.factors) {
            const auto r = factor.ranks();
            for (std::size_t k = 6; k < factor.order(); ++k) EXPECT_LE(r[k], 4u);
        }
    }
}

TEST(TuckerTti, OneDimensionalEqualsPlainApply) {
    const auto f = random_values(32, 12);
    const auto plain = tt_to_dense(apply_tti(build_tti_1d(keys_cubic(), 5, 3), qtt(f), {})).values;
    const auto t = apply_tti_tucker(to_tucker(DenseTensor({32}, f)), keys_cubic(), 3, {0}, Tolerance::exact());
    EXPECT_LT(max_abs_diff(tucker_to_dense(t).values, plain), 1e-12);
}
