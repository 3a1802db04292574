#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "volocc/oracle.hpp"
#include "volocc/simulate.hpp"

using namespace volocc;

namespace {

// V_t = t on [0, 1]
std::vector<double> ramp_path(const SamplingGrid& grid) {
    std::vector<double> v(grid.n_fine() + 1);
    for (long k = 0; k <= grid.n_fine(); ++k) v[k] = k * grid.fine_step();
    return v;
}

}  // namespace

TEST(OracleOccupation, ConstantPath) {
    SamplingGrid grid{3.0, 10, 2};
    std::vector<double> v(grid.n_fine() + 1, 1.0);
    EXPECT_DOUBLE_EQ(oracle_occupation(v, grid, 2.0), 3.0);
    EXPECT_DOUBLE_EQ(oracle_occupation(v, grid, 0.5), 0.0);
    EXPECT_DOUBLE_EQ(oracle_occupation(v, grid, 1.0), 3.0);
    std::vector<double> bad(5, 1.0);
    EXPECT_THROW(oracle_occupation(bad, grid, 1.0), std::invalid_argument);
}

TEST(OracleOccupation, RampPath) {
    SamplingGrid grid{1.0, 50, 4};
    const auto v = ramp_path(grid);
    EXPECT_NEAR(oracle_occupation(v, grid, 0.5), 0.5, 1.0000001 * grid.fine_step());
}

TEST(OracleQuantile, ConstantAndRamp) {
    SamplingGrid grid{2.0, 25, 2};
    std::vector<double> c(grid.n_fine() + 1, 0.7);
    for (double a : {0.1, 0.5, 0.9}) EXPECT_DOUBLE_EQ(oracle_quantile(c, grid, a), 0.7);

    SamplingGrid unit{1.0, 50, 4};
    const auto v = ramp_path(unit);
    EXPECT_NEAR(oracle_quantile(v, unit, 0.25), 0.25, 1.0000001 * unit.fine_step());
    EXPECT_THROW(oracle_quantile(v, unit, 0.0), std::invalid_argument);
    EXPECT_THROW(oracle_quantile(v, unit, 1.0), std::invalid_argument);
}

TEST(OracleQuantile, AgreesWithOccupationInverse) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    SamplingGrid grid{1.0, 20, 3};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(grid.n_fine() + 1);
        for (auto& x : v) x = u(rng);
        std::uniform_real_distribution<double> ua(0.05, 0.95);
        const double a = ua(rng);
        const double q = oracle_quantile(v, grid, a);
        EXPECT_GE(oracle_occupation(v, grid, q) + 1e-12, a * grid.t_days);
        const double below = std::nextafter(q, -1.0);
        EXPECT_LT(oracle_occupation(v, grid, below), a * grid.t_days + 1e-12);
    }
}

TEST(OracleDensity, ConstantPathGaussianBump) {
    SamplingGrid grid{4.0, 20, 2};
    std::vector<double> v(grid.n_fine() + 1, 1.3);
    KernelSpec spec{KernelType::gaussian, 0.2};
    const std::vector<double> at{1.3};
    EXPECT_NEAR(oracle_density(v, grid, spec, at)[0],
                4.0 / (0.2 * std::sqrt(2.0 * std::numbers::pi)), 1e-10);

    // normalization by trapezoid over a wide padded grid
    std::vector<double> xs;
    for (int i = 0; i <= 800; ++i) xs.push_back(1.3 - 3.0 + 6.0 * i / 800.0);
    const auto f = oracle_density(v, grid, spec, xs);
    double mass = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        mass += 0.5 * (f[i] + f[i - 1]) * (xs[i] - xs[i - 1]);
    EXPECT_NEAR(mass, 4.0, 1e-6);
}

TEST(OracleDensity, MatchesCentralDifferenceOfOccupation) {
    // Lebesgue-differentiation cross-check: the eps-central difference of the
    // occupation time is the boxcar smoothing of the occupation measure;
    // compare against the kernel oracle run at the variance-matched bandwidth.
    const auto path = simulate_cir(CirSpec{0.03, 1.0, 0.2}, 1.0,
                                   SamplingGrid{22.0, 80, 10}, 77);
    const auto& grid = path.grid;
    const double eps = 0.01;
    KernelSpec spec{KernelType::gaussian, eps / std::sqrt(3.0)};
    for (double x : {0.8, 1.0, 1.2}) {
        const double fd = (oracle_occupation(path.v_fine, grid, x + eps) -
                           oracle_occupation(path.v_fine, grid, x - eps)) /
                          (2.0 * eps);
        const std::vector<double> at{x};
        const double kd = oracle_density(path.v_fine, grid, spec, at)[0];
        EXPECT_NEAR(fd, kd, 0.10 * std::max(fd, kd)) << "x = " << x;
    }
}

TEST(RateBound, ReferenceDisplays) {
    RateParams cont;
    cont.gamma = 0.5;
    cont.iota = 0.01;
    cont.varpi = 0.3;
    cont.continuous_x = true;
    EXPECT_NEAR(rate_bound(cont, RateKind::a_n), 0.24, 1e-12);

    RateParams low;
    low.r = 0.5;
    low.varpi = 0.45;
    low.gamma = 0.5;
    low.iota = 0.01;
    low.continuous_x = false;
    EXPECT_NEAR(rate_bound(low, RateKind::a_n), 0.175, 1e-12);

    RateParams dnp;
    dnp.r_tilde = 1.0;
    dnp.gamma = 0.5;
    dnp.iota = 0.01;
    dnp.varpi = 0.3;
    dnp.continuous_x = true;
    EXPECT_NEAR(rate_bound(dnp, RateKind::d_n), 0.24, 1e-12);
}

TEST(RateBound, HighActivityBranch) {
    RateParams q;
    q.r = 1.5;
    q.theta = 1e-4;
    q.varpi = 0.45;  // allowed: lower endpoint (1.5-1)/(2*1.5-1.5) = 1/3
    q.gamma = 0.9;   // allowed: lower endpoint 0.675 + 0.15 = 0.825
    q.iota = 0.01;
    q.continuous_x = false;
    const double expected =
        std::min({0.9 / 1.5 - (1.0 - 0.45) - 0.01, 0.45 - 0.01, 0.05 - 0.01});
    EXPECT_NEAR(rate_bound(q, RateKind::a_n), expected, 1e-12);
}

TEST(RateBound, NamesViolatedInequality) {
    RateParams q;
    q.varpi = 0.6;
    try {
        rate_bound(q, RateKind::a_n);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("varpi"), std::string::npos);
    }
    RateParams g;
    g.gamma = 0.2;  // below r varpi + (1 v r)(1 - 2 varpi) for varpi = 0.3
    g.varpi = 0.3;
    try {
        rate_bound(g, RateKind::a_n);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("gamma"), std::string::npos);
    }
}

TEST(RateBound, PositiveOnValidParameterGrid) {
    for (double r : {0.0, 0.3, 0.7, 1.0, 1.3, 1.7}) {
        const double rmax = std::max(1.0, r);
        const double w_lo = (rmax - 1.0) / (2.0 * rmax - r);
        const double varpi = 0.5 * (w_lo + 0.5);
        const double g_lo = r * varpi + rmax * (1.0 - 2.0 * varpi);
        const double gamma = 0.5 * (g_lo + 1.0);
        for (bool cont : {true, false}) {
            RateParams q;
            q.r = r;
            q.varpi = varpi;
            q.gamma = gamma;
            q.iota = 1e-3;
            q.theta = r > 1.0 ? 1e-4 : 0.0;
            q.continuous_x = cont;
            for (auto kind : {RateKind::a_n, RateKind::d_n, RateKind::a_bar_n})
                EXPECT_GT(rate_bound(q, kind), 0.0)
                    << "r=" << r << " cont=" << cont << " kind=" << static_cast<int>(kind);
        }
    }
}

TEST(EvtNormalization, ClosedForms) {
    const auto n = evt_normalization(100);
    EXPECT_NEAR(n.m_n, 2.36625, 1e-4);
    EXPECT_NEAR(n.c_n, 0.329506, 1e-6);
    EXPECT_THROW(evt_normalization(1), std::invalid_argument);
    EXPECT_NEAR(gumbel_type_cdf(0.0), std::exp(-2.0), 1e-15);
    // median of the limit law: -log(log 2 / 2)
    EXPECT_NEAR(gumbel_type_cdf(-std::log(std::log(2.0) / 2.0)), 0.5, 1e-15);
}

TEST(EvtNormalization, LocationIncreasesWithBlockCount) {
    double prev = 0.0;
    for (long b = 10; b <= 1000000; b = b * 13 / 10 + 1) {
        const auto n = evt_normalization(b);
        EXPECT_GT(n.m_n, prev);
        prev = n.m_n;
    }
}
