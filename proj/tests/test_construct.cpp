#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qtti/construct.hpp"
#include "qtti/errors.hpp"
#include "test_support.hpp"

using namespace qtti;
using qtti::testing::max_abs_diff;

namespace {

// Definitional dense matrices, row a (output) and column a' (input).
double shift_entry(ShiftKind kind, std::size_t k, std::size_t N, std::size_t a, std::size_t ap) {
    const std::size_t full = std::size_t{1} << N;
    switch (kind) {
    case ShiftKind::cyclic: return a == (ap + full - k) % full ? 1.0 : 0.0;
    case ShiftKind::right: return a == ap + k && a < full ? 1.0 : 0.0;
    case ShiftKind::left: return ap == a + k && ap < full ? 1.0 : 0.0;
    }
    return 0.0;
}

std::vector<double> dense_poly(const Polynomial& p, std::size_t N) {
    std::vector<double> v(std::size_t{1} << N);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p(std::ldexp(static_cast<double>(i), -int(N)));
    return v;
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += a[i * n + k] * b[k * n + j];
    return c;
}

} // namespace

TEST(ShiftMpo, ExhaustiveDenseMatch) {
    for (std::size_t N = 1; N <= 6; ++N) {
        const std::size_t full = std::size_t{1} << N;
        for (auto kind : {ShiftKind::cyclic, ShiftKind::right, ShiftKind::left}) {
            for (std::size_t k = 0; k < full; ++k) {
                const auto op = shift_mpo(kind, k, N);
                EXPECT_LE(op.max_rank(), 2u);
                const auto m = op_to_dense(op).values;
                for (std::size_t a = 0; a < full; ++a)
                    for (std::size_t ap = 0; ap < full; ++ap)
                        ASSERT_EQ(m[a * full + ap], shift_entry(kind, k, N, a, ap))
                            << "N=" << N << " k=" << k << " kind=" << int(kind);
            }
        }
    }
}

TEST(ShiftMpo, ZeroShiftIsIdentity) {
    const auto m = op_to_dense(shift_mpo(ShiftKind::cyclic, 0, 4)).values;
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(m[i * 16 + j], i == j ? 1.0 : 0.0);
}

TEST(ShiftMpo, CyclicSuccessorOnBasisVector) {
    // (S^(1) e_0)_a = (e_0)_{a+1}: the one lands at a = 2^N - 1.
    std::vector<double> e0(8, 0.0);
    e0[0] = 1.0;
    const auto v = tt_from_dense(DenseTensor({2, 2, 2}, e0));
    const auto w = tt_to_dense(apply_operator(shift_mpo(ShiftKind::cyclic, 1, 3), v, {})).values;
    for (std::size_t a = 0; a < 8; ++a) EXPECT_NEAR(w[a], a == 7 ? 1.0 : 0.0, 1e-14);
}

TEST(ShiftMpo, GroupLawAndTranspose) {
    for (std::size_t N = 2; N <= 5; ++N) {
        const std::size_t full = std::size_t{1} << N;
        for (std::size_t k1 = 0; k1 < full; ++k1) {
            const auto l = op_to_dense(shift_mpo(ShiftKind::left, k1, N)).values;
            const auto r = op_to_dense(shift_mpo(ShiftKind::right, k1, N)).values;
            for (std::size_t i = 0; i < full; ++i)
                for (std::size_t j = 0; j < full; ++j) ASSERT_EQ(l[i * full + j], r[j * full + i]);
            for (std::size_t k2 = 0; k1 + k2 < full; ++k2) {
                const auto prod = matmul(op_to_dense(shift_mpo(ShiftKind::cyclic, k1, N)).values,
                                         op_to_dense(shift_mpo(ShiftKind::cyclic, k2, N)).values, full);
                ASSERT_EQ(prod, op_to_dense(shift_mpo(ShiftKind::cyclic, k1 + k2, N)).values);
            }
        }
    }
}

TEST(ShiftMpo, OutOfRange) {
    EXPECT_THROW(shift_mpo(ShiftKind::cyclic, 16, 4), DimensionError);
}

TEST(PolynomialQtt, ConstantIsRankOne) {
    const auto tt = round(polynomial_qtt({{2.5}}, 6), Tolerance::exact());
    EXPECT_EQ(tt.max_rank(), 1u);
    for (double v : tt_to_dense(tt).values) EXPECT_NEAR(v, 2.5, 1e-14);
}

TEST(PolynomialQtt, LinearRampExactInBothBases) {
    for (auto basis : {PolynomialBasis::monomial, PolynomialBasis::abel}) {
        const auto tt = polynomial_qtt({{0.0, 1.0}}, 10, basis);
        const auto v = tt_to_dense(tt).values;
        for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], i / 1024.0, 1e-15);
    }
}

TEST(PolynomialQtt, MatchesDirectEvaluation) {
    const Polynomial q{{1.0, -3.0, 3.0}};
    for (auto basis : {PolynomialBasis::monomial, PolynomialBasis::abel}) {
        EXPECT_LT(max_abs_diff(tt_to_dense(polynomial_qtt(q, 6, basis)).values, dense_poly(q, 6)),
                  1e-13);
    }
    const Polynomial quintic{{0.3, -1.0, 2.0, 0.5, -4.0, 1.25}};
    for (std::size_t N = 2; N <= 10; ++N) {
        for (auto basis : {PolynomialBasis::monomial, PolynomialBasis::abel}) {
            const auto tt = polynomial_qtt(quintic, N, basis);
            EXPECT_LE(tt.max_rank(), 6u);
            const auto ref = dense_poly(quintic, N);
            EXPECT_LT(max_abs_diff(tt_to_dense(tt).values, ref), 1e-12 * qtti::testing::max_abs(ref));
        }
    }
}

TEST(PolynomialQtt, AdditionHomomorphism) {
    const Polynomial p{{1.0, 2.0, -1.0}}, q{{0.5, 0.0, 3.0, 1.0}};
    const Polynomial s{{1.5, 2.0, 2.0, 1.0}};
    for (std::size_t N = 2; N <= 8; ++N) {
        const auto lhs = tt_to_dense(polynomial_qtt(s, N)).values;
        const auto rhs = tt_to_dense(add(polynomial_qtt(p, N), polynomial_qtt(q, N))).values;
        EXPECT_LT(max_abs_diff(lhs, rhs), 1e-13);
    }
}

TEST(PolynomialQtt, SingleCoreInternalVariant) {
    const Polynomial q{{1.0, 2.0}};
    const auto v = tt_to_dense(detail::polynomial_qtt_any(q, 1, PolynomialBasis::monomial)).values;
    EXPECT_EQ(v, (std::vector<double>{1.0, 2.0}));
    EXPECT_THROW(polynomial_qtt(q, 1), DimensionError);
}

TEST(AbelBasis, CoefficientTransformReproducesPolynomial) {
    const Polynomial q{{0.2, -1.0, 0.7, 2.0}};
    const double a = abel_parameter(7);
    const auto d = abel_coefficients(q, a);
    for (double x : {0.0, 0.1, 0.5, 0.93}) {
        double y = 0.0;
        for (std::size_t n = 0; n < d.size(); ++n) y += d[n] * abel_polynomial(n, a, x);
        EXPECT_NEAR(y, q(x), 1e-12);
    }
}

TEST(DerivativeMpo, ConstantLinearAndSine) {
    const std::size_t N = 8;
    const double h = 1.0 / 256.0;
    const auto D = derivative_mpo(N, h);
    EXPECT_LE(D.max_rank(), 4u);
    const auto c = tt_to_dense(apply_operator(D, TensorTrain::qtt_constant(N, 3.0), {})).values;
    for (double v : c) EXPECT_NEAR(v, 0.0, 1e-12);
    const auto ramp = tt_to_dense(apply_operator(D, polynomial_qtt({{0.0, 1.0}}, N), {})).values;
    for (std::size_t i = 1; i + 1 < ramp.size(); ++i) EXPECT_NEAR(ramp[i], 1.0, 1e-11);
    const auto s = tt_to_dense(apply_operator(
        D, tt_from_dense(DenseTensor(std::vector<std::size_t>(N, 2), [&] {
            std::vector<double> v(256);
            for (std::size_t i = 0; i < 256; ++i) v[i] = std::sin(2 * std::numbers::pi * i * h);
            return v;
        }())),
        {})).values;
    for (std::size_t i = 0; i < 256; ++i) {
        const double exact = 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * i * h);
        EXPECT_NEAR(s[i], exact, 2 * std::pow(2 * std::numbers::pi, 3) * h * h);
    }
}
