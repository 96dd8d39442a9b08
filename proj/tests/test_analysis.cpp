#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qtti/analysis.hpp"
#include "qtti/errors.hpp"
#include "qtti/rng.hpp"
#include "test_support.hpp"

using namespace qtti;
using namespace qtti::testing;

namespace {
constexpr double kPi = std::numbers::pi;

DenseTensor cube(std::size_t n, const std::function<double(double, double, double)>& f) {
    DenseTensor t({n, n, n});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                t.values[(i * n + j) * n + k] = f(double(i) / n, double(j) / n, double(k) / n);
    return t;
}
} // namespace

TEST(Rmse, ExactAndOffset) {
    const auto tt = random_tt({2, 2, 2, 2, 2, 2}, 3, 1);
    const auto dense = tt_to_dense(tt);
    const IndexFunction exact = [&](std::span<const std::size_t> idx) { return dense.at(idx); };
    EXPECT_LE(rmse_sampled(tt, exact, 1000, 1), 1e-12);
    const IndexFunction shifted = [&](std::span<const std::size_t> idx) { return dense.at(idx) + 0.3; };
    EXPECT_NEAR(rmse_sampled(tt, shifted, 1000, 1), 0.3, 1e-12);
    EXPECT_THROW(rmse_sampled(tt, exact, 0, 1), ConfigError);
}

TEST(Rmse, SampledConvergesToDense) {
    const auto grid = GridDescriptor::unit(1, 10);
    const Field f = [](std::span<const double> x) { return std::sin(2 * kPi * x[0]); };
    const auto tt = encode_qtt(f, grid);
    const Field g = [](std::span<const double> x) { return std::sin(2 * kPi * x[0]) + 0.1 * std::cos(6 * kPi * x[0]); };
    const double dense = 0.1 / std::sqrt(2.0);
    const std::size_t n = 4000;
    EXPECT_NEAR(rmse_sampled(tt, grid, g, n, 3), dense, 3 * dense / std::sqrt(double(n)));
    EXPECT_LE(rmse_sampled(tt, grid, f, n, 3), 1e-12);
}

TEST(Spectrum, SingleModeIsConcentrated) {
    const std::size_t n = 32;
    const auto vx = cube(n, [](double, double y, double) { return std::sin(2 * kPi * 5 * y); });
    const auto zero = cube(n, [](double, double, double) { return 0.0; });
    const auto s = energy_spectrum({vx, zero, zero});
    EXPECT_GT(s.energy[5] / s.total(), 0.99);
    EXPECT_NEAR(s.total(), 0.25, 1e-12); // half of the mean square 1/2
}

TEST(Spectrum, ParsevalAndNonNegative) {
    const std::size_t n = 16;
    Stream st(5, {0});
    std::vector<DenseTensor> comps;
    double ms = 0.0;
    for (int c = 0; c < 3; ++c) {
        DenseTensor t({n, n, n});
        for (double& x : t.values) {
            x = st.normal();
            ms += x * x;
        }
        comps.push_back(std::move(t));
    }
    ms /= double(n * n * n);
    const auto s = energy_spectrum(comps);
    for (double e : s.energy) EXPECT_GE(e, 0.0);
    EXPECT_NEAR(s.total(), 0.5 * ms, 1e-10 * ms);
    const auto r = s.resolved();
    EXPECT_EQ(r.k.front(), 1.0);
    EXPECT_EQ(r.k.back(), 8.0);
}

TEST(Spectrum, SlopeOfPowerLaw) {
    Spectrum s;
    for (int k = 0; k < 40; ++k) {
        s.k.push_back(k);
        s.energy.push_back(k == 0 ? 0.0 : std::pow(double(k), -5.0 / 3.0));
    }
    EXPECT_NEAR(spectrum_slope(s, 4, 32), -5.0 / 3.0, 1e-12);
}

TEST(Flatness, GaussianIsThree) {
    const std::size_t n = 48;
    Stream st(9, {1});
    std::vector<DenseTensor> comps;
    for (int c = 0; c < 3; ++c) {
        DenseTensor t({n, n, n});
        for (double& x : t.values) x = st.normal();
        comps.push_back(std::move(t));
    }
    const std::size_t r[] = {1, 4};
    for (double f : flatness(comps, r)) EXPECT_NEAR(f, 3.0, 0.3);
    for (double f : flatness(comps, r, IncrementKind::full)) EXPECT_NEAR(f, 3.0, 0.3);
}

TEST(Flatness, LinearFieldIsOne) {
    const std::size_t n = 8;
    const auto vx = cube(n, [](double x, double, double) { return x; });
    const auto vy = cube(n, [](double, double y, double) { return y; });
    const auto vz = cube(n, [](double, double, double z) { return z; });
    const std::size_t r[] = {1, 3};
    for (double f : flatness({vx, vy, vz}, r)) EXPECT_NEAR(f, 1.0, 1e-12);
    const auto zero = cube(n, [](double, double, double) { return 0.0; });
    EXPECT_EQ(flatness({zero, zero, zero}, r)[0], 0.0);
    const std::size_t big[] = {8};
    EXPECT_THROW(flatness({vx, vy, vz}, big), DimensionError);
}

TEST(RankStats, RankOneAndCompression) {
    const auto ones = TensorTrain::qtt_constant(20, 1.0);
    const auto s = rank_stats(ones);
    EXPECT_EQ(s.max_rank, 1u);
    EXPECT_EQ(s.parameter_count, 40u);
    EXPECT_NEAR(s.compression_ratio, 40.0 / std::ldexp(1.0, 20), 1e-18);
    const auto tt = random_tt({2, 3, 4, 2}, 3, 1);
    std::size_t expected = 0;
    const auto r = tt.ranks(), d = tt.dims();
    for (std::size_t k = 0; k < d.size(); ++k) expected += r[k] * d[k] * r[k + 1];
    EXPECT_EQ(rank_stats(tt).parameter_count, expected);
}

TEST(Convergence, KernelOrders) {
    const auto f = [](double x) { return std::sin(2 * kPi * x); };
    const std::size_t ns[] = {5, 6, 7, 8};
    EXPECT_NEAR(convergence_study(keys_cubic(), f, ns, 3).slope, 3.0, 0.3);
    EXPECT_NEAR(convergence_study(cubic_sixpoint(), f, ns, 3).slope, 4.0, 0.3);
    EXPECT_NEAR(convergence_study(bspline_cubic(), f, ns, 3).slope, 2.0, 0.3);
    EXPECT_NEAR(convergence_study(linear_kernel(), f, ns, 3).slope, 2.0, 0.3);
}

TEST(Reports, CsvAndJson) {
    MetricReport r;
    r.name = "demo";
    r.scalars["rmse"] = 0.5;
    r.columns = {"k", "E"};
    r.rows = {{1, 0.25}, {2, 0.125}};
    std::stringstream csv, json;
    write_csv(csv, r);
    EXPECT_EQ(csv.str(), "k,E\n1,0.25\n2,0.125\n");
    write_json_summary(json, r);
    EXPECT_NE(json.str().find("\"rmse\": 0.5"), std::string::npos);
    EXPECT_NE(json.str().find("\"name\": \"demo\""), std::string::npos);
}
