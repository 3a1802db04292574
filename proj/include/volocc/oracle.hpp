#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "volocc/density.hpp"
#include "volocc/grid.hpp"

namespace volocc {

// ---------------------------------------------------------------------------
// Ground truth from the simulated fine-grid variance path. Occupation uses
// left-endpoint Riemann sums; the quantile is the matching order statistic, so
// the pair satisfies the inversion identities exactly on the grid.
// ---------------------------------------------------------------------------

inline double oracle_occupation(std::span<const double> v_fine,
                                const SamplingGrid& grid, double x) {
    const long n = grid.n_fine();
    if (static_cast<long>(v_fine.size()) != n + 1)
        throw std::invalid_argument("oracle_occupation: path does not cover [0, T]");
    long count = 0;
    for (long k = 0; k < n; ++k)
        if (v_fine[k] <= x) ++count;
    return static_cast<double>(count) * grid.fine_step();
}

inline double oracle_quantile(std::span<const double> v_fine,
                              const SamplingGrid& grid, double alpha_frac) {
    if (!(alpha_frac > 0.0 && alpha_frac < 1.0))
        throw std::invalid_argument("oracle_quantile: alpha_frac outside (0,1)");
    const long n = grid.n_fine();
    if (static_cast<long>(v_fine.size()) != n + 1)
        throw std::invalid_argument("oracle_quantile: path does not cover [0, T]");
    std::vector<double> vals(v_fine.begin(), v_fine.begin() + n);
    const long rank = static_cast<long>(std::ceil(alpha_frac * static_cast<double>(n)));
    const long idx = std::clamp<long>(rank, 1, n) - 1;
    std::nth_element(vals.begin(), vals.begin() + idx, vals.end());
    return vals[idx];
}

// Kernel density of the true path with a reference bandwidth (default
// fine_step^{1/5}); the comparison target for the block-based estimator.
inline std::vector<double> oracle_density(std::span<const double> v_fine,
                                          const SamplingGrid& grid,
                                          const KernelSpec& spec,
                                          std::span<const double> eval_points) {
    const long n = grid.n_fine();
    if (static_cast<long>(v_fine.size()) != n + 1)
        throw std::invalid_argument("oracle_density: path does not cover [0, T]");
    if (!(spec.bandwidth > 0.0))
        throw std::invalid_argument("oracle_density: bandwidth must be positive");
    const double w = grid.fine_step();
    std::vector<double> out(eval_points.size(), 0.0);
    for (std::size_t j = 0; j < eval_points.size(); ++j) {
        double acc = 0.0;
        for (long k = 0; k < n; ++k)
            acc += kernel_value(spec.kernel, (v_fine[k] - eval_points[j]) / spec.bandwidth);
        out[j] = acc * w / spec.bandwidth;
    }
    return out;
}

inline double oracle_reference_bandwidth(const SamplingGrid& grid) {
    return std::pow(grid.fine_step(), 0.2);
}

// ---------------------------------------------------------------------------
// Rate-bound calculator: the exponent e with bound ~ delta_n^e for the uniform
// spot-variance recovery rate a_n, the occupation-time rate d_n, and the
// density rate a_bar_n.
// ---------------------------------------------------------------------------

struct RateParams {
    double r = 0.0;        // price-jump activity bound, in [0, 2]
    double r_tilde = 1.0;  // volatility-jump activity bound, in (0, 2]
    double gamma = 0.5;    // block exponent: k_n ~ delta_n^{-gamma}
    double varpi = 0.49;   // truncation exponent
    double iota = 0.01;    // slack
    double theta = 0.0;    // slack, 0 when r <= 1
    bool continuous_x = true;

    void validate() const {
        if (r < 0.0 || r > 2.0)
            throw std::invalid_argument("rate: r outside [0,2]");
        if (!(r_tilde > 0.0 && r_tilde <= 2.0))
            throw std::invalid_argument("rate: r_tilde outside (0,2]");
        if (!(iota > 0.0)) throw std::invalid_argument("rate: iota must be positive");
        if (theta < 0.0) throw std::invalid_argument("rate: theta must be >= 0");
        if (r > 1.0 && theta == 0.0)
            throw std::invalid_argument("rate: theta must be positive when r > 1");
        const double rmax = std::max(1.0, r);
        const double w_lo = (rmax - 1.0) / (2.0 * rmax - r);
        if (!(varpi > w_lo && varpi < 0.5))
            throw std::invalid_argument(
                "rate: varpi outside ((1 v r - 1)/(2(1 v r) - r), 1/2)");
        const double g_lo = r * varpi + rmax * (1.0 - 2.0 * varpi);
        if (!(gamma > g_lo && gamma < 1.0))
            throw std::invalid_argument(
                "rate: gamma outside (r varpi + (1 v r)(1 - 2 varpi), 1)");
    }
};

enum class RateKind { a_n, d_n, a_bar_n };

inline double rate_bound(const RateParams& q, RateKind kind) {
    q.validate();
    const double g = q.gamma;
    const double sampling = g / 2.0 - q.iota;
    const double discretization = (1.0 - g) / 2.0 - q.iota;

    double a_n;
    if (q.continuous_x) {
        a_n = std::min(sampling, discretization);
    } else if (q.r <= 1.0) {
        a_n = std::min({g - 1.0 + (2.0 - q.r) * q.varpi, sampling, discretization});
    } else {
        a_n = std::min({g / q.r - (1.0 - q.varpi) - q.iota, sampling, discretization});
    }

    switch (kind) {
        case RateKind::a_n:
            return a_n;
        case RateKind::d_n:
            return std::min(a_n, (1.0 - g) / (1.0 + q.r_tilde) - q.iota);
        case RateKind::a_bar_n: {
            const double star = std::min(g / 2.0, (1.0 - g) / 2.0);
            if (q.continuous_x) return star;
            const double rmax = std::max(1.0, q.r);
            const double extra =
                (1.0 - q.r * q.varpi - q.theta) / rmax - (1.0 - 2.0 * q.varpi);
            return std::min(star, extra);
        }
    }
    throw std::logic_error("rate_bound: unknown kind");
}

// ---------------------------------------------------------------------------
// Normalizing constants of the Gumbel-type limit of the maximum estimation
// error under constant volatility: c_n^{-1}(M_n - m_n) -> Lambda with c.d.f.
// exp(-2 exp(-x)), b_n the number of blocks.
// ---------------------------------------------------------------------------

struct EvtNorm {
    double m_n;
    double c_n;
};

inline EvtNorm evt_normalization(long b_n) {
    if (b_n < 2) throw std::invalid_argument("evt_normalization: b_n must be >= 2");
    const double lb = std::log(static_cast<double>(b_n));
    const double s = std::sqrt(2.0 * lb);
    return EvtNorm{s - (std::log(lb) + std::log(4.0 * std::numbers::pi)) / (2.0 * s),
                   1.0 / s};
}

inline double gumbel_type_cdf(double x) { return std::exp(-2.0 * std::exp(-x)); }

}  // namespace volocc
