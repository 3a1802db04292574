#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "volocc/density.hpp"
#include "volocc/simulate.hpp"

using namespace volocc;

namespace {

OccupationCurve curve_of(std::vector<double> levels, std::vector<double> weights,
                         double total) {
    return OccupationCurve(std::move(levels), std::move(weights), total);
}

std::function<double(double)> as_function(const OccupationCurve& curve,
                                          const KernelSpec& spec) {
    return [curve, spec](double x) {
        const std::vector<double> pt{x};
        return kernel_density(curve, spec, pt)[0];
    };
}

}  // namespace

TEST(KernelDensity, GaussianPeakAtSingleLevel) {
    const auto curve = curve_of({2.0}, {3.0}, 3.0);
    KernelSpec spec{KernelType::gaussian, 0.25};
    const std::vector<double> x{2.0};
    const double expected = 3.0 / (0.25 * std::sqrt(2.0 * std::numbers::pi));
    EXPECT_NEAR(kernel_density(curve, spec, x)[0], expected, 1e-12);
}

TEST(KernelDensity, MassEqualsTotalTime) {
    const auto curve = curve_of({0.4, 0.9, 1.7, 2.2}, {0.5, 1.0, 0.25, 0.75}, 2.5);
    for (auto kernel : {KernelType::gaussian, KernelType::epanechnikov_c1}) {
        for (double h : {0.05, 0.3, 1.5}) {
            KernelSpec spec{kernel, h};
            const double mass =
                integrate_adaptive(as_function(curve, spec), curve.levels().front() - 10 * h,
                                   curve.levels().back() + 10 * h, 1e-9);
            EXPECT_NEAR(mass, 2.5, 1e-6) << "h = " << h;
        }
    }
}

TEST(KernelDensity, FarTailDecays) {
    const auto curve = curve_of({0.5, 5.0}, {1.0, 1.0}, 2.0);
    KernelSpec spec{KernelType::gaussian, 0.1};
    const std::vector<double> x{2.75};
    EXPECT_LE(kernel_density(curve, spec, x)[0], 1e-10);
}

TEST(KernelDensity, TranslationEquivariance) {
    const auto curve = curve_of({0.4, 1.1, 1.8}, {1.0, 0.5, 0.5}, 2.0);
    const double s = 0.7;
    const auto shifted = curve_of({0.4 + s, 1.1 + s, 1.8 + s}, {1.0, 0.5, 0.5}, 2.0);
    KernelSpec spec{KernelType::gaussian, 0.2};
    for (double x : {0.3, 0.9, 1.5, 2.0}) {
        const std::vector<double> a{x}, b{x + s};
        EXPECT_NEAR(kernel_density(curve, spec, a)[0],
                    kernel_density(shifted, spec, b)[0], 1e-12);
    }
}

TEST(KernelDensity, BandwidthLimits) {
    const auto curve = curve_of({0.8, 1.2}, {1.0, 1.0}, 2.0);
    KernelSpec wide{KernelType::gaussian, 100.0};
    const auto grid = default_eval_grid(curve, 0.5, 101);
    double sup_wide = 0.0;
    for (double f : kernel_density(curve, wide, grid)) sup_wide = std::max(sup_wide, f);
    EXPECT_LT(sup_wide, 0.01);

    KernelSpec narrow{KernelType::gaussian, 1e-4};
    const std::vector<double> at_level{0.8};
    EXPECT_GT(kernel_density(curve, narrow, at_level)[0], 1000.0);
}

TEST(KernelDensity, RejectsNonPositiveBandwidth) {
    const auto curve = curve_of({1.0}, {1.0}, 1.0);
    KernelSpec spec{KernelType::gaussian, 0.0};
    const std::vector<double> x{1.0};
    EXPECT_THROW(kernel_density(curve, spec, x), std::invalid_argument);
}

TEST(Kernels, SmoothedEpanechnikovIsAC1Density) {
    // integrates to one, vanishes with zero slope at the support edges
    const double mass = integrate_adaptive(
        [](double u) { return kernel_value(KernelType::epanechnikov_c1, u); }, -1.5, 1.5);
    EXPECT_NEAR(mass, 1.0, 1e-9);
    EXPECT_EQ(kernel_value(KernelType::epanechnikov_c1, 1.0), 0.0);
    EXPECT_EQ(kernel_value(KernelType::epanechnikov_c1, -1.0), 0.0);
    const double eps = 1e-6;
    const double slope =
        (kernel_value(KernelType::epanechnikov_c1, 1.0 - eps) - 0.0) / eps;
    EXPECT_LT(std::abs(slope), 1e-4);
}

TEST(DefaultBandwidth, FollowsRateRule) {
    SamplingGrid grid{22.0, 80, 1};
    EXPECT_NEAR(default_bandwidth(grid, 0.5), std::pow(1.0 / 80.0, 0.1), 1e-15);
}

TEST(WeightedL1, ZeroForIdenticalFunctions) {
    auto f = [](double x) { return std::exp(-x * x); };
    EXPECT_NEAR(weighted_l1_distance(f, f, nullptr, -2.0, 2.0), 0.0, 1e-12);
}

TEST(WeightedL1, ConstantOffset) {
    auto f = [](double x) { return x * x; };
    auto g = [](double x) { return x * x + 0.3; };
    EXPECT_NEAR(weighted_l1_distance(f, g, nullptr, 0.0, 2.0), 0.3 * 2.0, 1e-7);
    auto w = [](double) { return 2.0; };
    EXPECT_NEAR(weighted_l1_distance(f, g, w, 0.0, 2.0), 2.0 * 0.3 * 2.0, 1e-7);
    EXPECT_THROW(weighted_l1_distance(f, g, nullptr, 1.0, 1.0), std::invalid_argument);
}

TEST(WeightedL1, EstimateTracksOracleDirection) {
    // one replicate: the estimated density lands within a factor of the truth
    const auto path = simulate_cir(CirSpec{0.03, 1.0, 0.2}, 1.0,
                                   SamplingGrid{22.0, 400, 2}, 21);
    const auto series =
        spot_variance_blocks(path.x_obs, path.grid, BlockSpec{40}, TruncDailyBv{});
    const auto curve = occupation_curve(series, Estimate::truncated);
    KernelSpec spec{KernelType::gaussian, default_bandwidth(path.grid)};
    const auto xs = default_eval_grid(curve, spec.bandwidth, 200);
    const auto fh = kernel_density(curve, spec, xs);
    double mass = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        mass += 0.5 * (fh[i] + fh[i - 1]) * (xs[i] - xs[i - 1]);
    EXPECT_NEAR(mass, path.grid.t_days, 0.01 * path.grid.t_days);
}
