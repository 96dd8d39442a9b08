#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qtti/errors.hpp"
#include "qtti/rng.hpp"
#include "qtti/turbulence.hpp"
#include "test_support.hpp"

using namespace qtti;
using namespace qtti::testing;

namespace {

DenseTensor lattice(const StreamTerm& t, Layout layout, std::size_t j) {
    return layout == Layout::interleaved ? deinterleave(t.interleaved[j], 3) : tucker_to_dense(t.tucker[j]);
}

} // namespace

TEST(Cascade, KolmogorovWeights) {
    CascadeSpec spec;
    EXPECT_DOUBLE_EQ(spec.weight(3), 0.0625);
    EXPECT_NEAR(spec.weight(2), std::pow(2.0, -8.0 / 3.0), 1e-15);
}

TEST(Cascade, Validation) {
    CascadeSpec spec;
    spec.scales = 3;
    EXPECT_THROW(turbulence_cascade(spec), DimensionError);
    spec.scales = 5;
    spec.first_scale = 1;
    EXPECT_THROW(turbulence_cascade(spec), ConfigError);
    spec.first_scale = 2;
    spec.layout = Layout::plain;
    EXPECT_THROW(turbulence_cascade(spec), ConfigError);
}

TEST(Cascade, SingleScaleMatchesDenseCurl) {
    for (Layout layout : {Layout::interleaved, Layout::tucker}) {
        CascadeSpec spec;
        spec.scales = 4;
        spec.first_scale = spec.last_scale = 2;
        spec.layout = layout;
        spec.seed = 3;
        const auto v = turbulence_cascade(spec);
        ASSERT_EQ(v.terms.size(), 1u);
        const auto& term = v.terms[0];
        const double h = 0.25;
        // d_i A_j on the 16^3 grid, and the mixed second derivatives for the divergence.
        std::array<std::array<std::vector<double>, 3>, 3> grad;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                std::array<int, 3> o{};
                o[i] = 1;
                grad[i][j] = dense_refine_3d(lattice(term, layout, j).values, 4, bspline_cubic(), 2, o, h);
            }
        const double w = term.weight;
        std::array<std::vector<double>, 3> ref;
        for (auto& r : ref) r.assign(4096, 0.0);
        for (std::size_t p = 0; p < 4096; ++p) {
            ref[0][p] = w * (grad[1][2][p] - grad[2][1][p]);
            ref[1][p] = w * (grad[2][0][p] - grad[0][2][p]);
            ref[2][p] = w * (grad[0][1][p] - grad[1][0][p]);
        }
        for (std::size_t k = 0; k < 3; ++k)
            EXPECT_LE(max_abs_diff(v.component_dense(k).values, ref[k]), 1e-10 * max_abs(ref[k]));

        std::vector<double> div(4096, 0.0);
        const std::array<std::array<std::size_t, 3>, 6> eps{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
        for (std::size_t t = 0; t < 6; ++t) {
            const auto [k, i, j] = eps[t];
            std::array<int, 3> o{};
            o[k] += 1;
            o[i] += 1;
            const auto d2 = dense_refine_3d(lattice(term, layout, j).values, 4, bspline_cubic(), 2, o, h);
            for (std::size_t p = 0; p < 4096; ++p) div[p] += (t < 3 ? w : -w) * d2[p];
        }
        EXPECT_LE(max_abs(div), 1e-10);
    }
}

TEST(Cascade, TtMatchesAnalyticSplineModel) {
    CascadeSpec spec;
    spec.scales = 5;
    spec.layout = Layout::tucker;
    spec.seed = 8;
    const auto v = turbulence_cascade(spec);
    Stream s(1, {stream_tag::sampling});
    double scale = 0.0, err = 0.0;
    for (int n = 0; n < 50; ++n) {
        const std::array<std::size_t, 3> idx{s.next_u64() % 32, s.next_u64() % 32, s.next_u64() % 32};
        const auto u = velocity_at(v, {idx[0] / 32.0, idx[1] / 32.0, idx[2] / 32.0});
        for (std::size_t k = 0; k < 3; ++k) {
            err = std::max(err, std::abs(v.component_at(k, idx) - u[k]));
            scale = std::max(scale, std::abs(u[k]));
        }
    }
    EXPECT_LT(err, 1e-8 * scale);
}

TEST(Cascade, SampledDivergenceVanishes) {
    for (Layout layout : {Layout::interleaved, Layout::tucker}) {
        CascadeSpec spec;
        spec.scales = 5;
        spec.layout = layout;
        const auto v = turbulence_cascade(spec);
        Stream s(4, {stream_tag::sampling});
        double worst = 0.0, vsq = 0.0;
        for (int n = 0; n < 1000; ++n) {
            const std::array<double, 3> x{s.uniform(), s.uniform(), s.uniform()};
            worst = std::max(worst, std::abs(divergence_at(v, x)));
            const auto u = velocity_at(v, x);
            vsq += u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        }
        EXPECT_LE(worst, 1e-8 * std::sqrt(vsq / 1000));
    }
}

TEST(Cascade, DeterministicPerSeed) {
    CascadeSpec spec;
    spec.scales = 5;
    spec.layout = Layout::tucker;
    const auto a = turbulence_cascade(spec), b = turbulence_cascade(spec);
    for (std::size_t k = 0; k < 3; ++k)
        EXPECT_EQ(a.component_dense(k).values, b.component_dense(k).values);
    spec.seed = 2;
    EXPECT_NE(turbulence_cascade(spec).component_dense(0).values, a.component_dense(0).values);
}

TEST(Cascade, TuckerRanksGrowLinearly) {
    std::vector<std::size_t> ranks;
    for (std::size_t M = 4; M <= 7; ++M) {
        CascadeSpec spec;
        spec.scales = M;
        spec.layout = Layout::tucker;
        ranks.push_back(turbulence_cascade(spec).max_rank());
    }
    for (std::size_t i = 0; i + 1 < ranks.size(); ++i) {
        EXPECT_GT(ranks[i + 1], ranks[i]);
        EXPECT_LE(ranks[i + 1] - ranks[i], 3 * CascadeSpec{}.chi);
    }
}
