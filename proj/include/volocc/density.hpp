#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "volocc/occupation.hpp"

namespace volocc {

// Both kernels are bounded, C^1 with bounded derivative and integrate to one.
// epanechnikov_c1 is the biweight (quartic) smoothing of the Epanechnikov
// kernel; the parabolic original is not C^1 at the support edges.
enum class KernelType { gaussian, epanechnikov_c1 };

inline double kernel_value(KernelType k, double u) {
    switch (k) {
        case KernelType::gaussian:
            return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
        case KernelType::epanechnikov_c1: {
            if (std::abs(u) >= 1.0) return 0.0;
            const double t = 1.0 - u * u;
            return 0.9375 * t * t;  // 15/16 (1 - u^2)^2
        }
    }
    throw std::logic_error("kernel_value: unknown kernel");
}

struct KernelSpec {
    KernelType kernel = KernelType::gaussian;
    double bandwidth = 0.1;
    // weight for the L1 norm; empty means w = 1
    std::function<double(double)> weight;
    double beta_hint = 0.5;  // Holder exponent used by rate tooling

    void validate() const {
        if (!(bandwidth > 0.0))
            throw std::invalid_argument("kernel: bandwidth must be positive");
    }
};

// h = delta_n^{1/(4(2+beta))}, the rate-optimal order for Holder exponent beta.
inline double default_bandwidth(const SamplingGrid& grid, double beta = 0.5) {
    return std::pow(grid.delta_n(), 1.0 / (4.0 * (2.0 + beta)));
}

// f(x) = sum_i w_i h^{-1} kappa((level_i - x)/h); integrates to T exactly.
inline std::vector<double> kernel_density(const OccupationCurve& curve,
                                          const KernelSpec& spec,
                                          std::span<const double> eval_points) {
    spec.validate();
    const auto& lv = curve.levels();
    const auto& wt = curve.weights();
    std::vector<double> out(eval_points.size(), 0.0);
    for (std::size_t j = 0; j < eval_points.size(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < lv.size(); ++i)
            acc += wt[i] * kernel_value(spec.kernel, (lv[i] - eval_points[j]) / spec.bandwidth);
        out[j] = acc / spec.bandwidth;
    }
    return out;
}

inline std::vector<double> kernel_density(const SpotVolSeries& series, Estimate which,
                                          const KernelSpec& spec,
                                          std::span<const double> eval_points) {
    return kernel_density(occupation_curve(series, which), spec, eval_points);
}

// 200 equispaced points spanning [min level - 4h, max level + 4h].
inline std::vector<double> default_eval_grid(const OccupationCurve& curve, double h,
                                             int n_points = 200) {
    if (n_points < 2) throw std::invalid_argument("eval grid: need >= 2 points");
    const double lo = curve.levels().front() - 4.0 * h;
    const double hi = curve.levels().back() + 4.0 * h;
    std::vector<double> xs(n_points);
    for (int i = 0; i < n_points; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
    return xs;
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb, double whole,
                               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double integrate_adaptive(const std::function<double(double)>& f, double a,
                                 double b, double tol = 1e-9, int max_depth = 32) {
    if (!(b > a)) throw std::invalid_argument("integrate: empty support");
    // seed with a few panels so narrow features are not missed
    const int panels = 16;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + (b - a) * i / panels;
        const double x1 = a + (b - a) * (i + 1) / panels;
        const double f0 = f(x0), f1 = f(x1), fm = f(0.5 * (x0 + x1));
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += detail::adaptive_simpson(f, x0, x1, f0, fm, f1, whole, tol / panels,
                                          max_depth);
    }
    return total;
}

// integral |f_a - f_b| w over [lo, hi].
inline double weighted_l1_distance(const std::function<double(double)>& f_a,
                                   const std::function<double(double)>& f_b,
                                   const std::function<double(double)>& w, double lo,
                                   double hi, double tol = 1e-9) {
    auto integrand = [&](double x) {
        const double wx = w ? w(x) : 1.0;
        return std::abs(f_a(x) - f_b(x)) * wx;
    };
    return integrate_adaptive(integrand, lo, hi, tol);
}

}  // namespace volocc
