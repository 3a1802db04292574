#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "volocc/spotvol.hpp"

namespace volocc {

enum class Estimate { truncated, untruncated };

// Occupation-time step function F(x) = time the spot-variance reconstruction
// spends at or below level x. Each full block carries mass u_n; the last block
// also carries the tail T - floor(T/u_n) u_n. Equal levels are merged.
class OccupationCurve {
  public:
    OccupationCurve(std::vector<double> levels, std::vector<double> weights,
                    double total_time)
        : total_time_(total_time) {
        if (levels.size() != weights.size() || levels.empty())
            throw std::invalid_argument("occupation curve: levels/weights mismatch");
        std::vector<std::size_t> idx(levels.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
        for (std::size_t i : idx) {
            if (!(weights[i] > 0.0))
                throw std::invalid_argument("occupation curve: weights must be positive");
            if (!levels_.empty() && levels[i] == levels_.back()) {
                weights_.back() += weights[i];  // merge ties into one atom
            } else {
                levels_.push_back(levels[i]);
                weights_.push_back(weights[i]);
            }
        }
        cum_.resize(weights_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            acc += weights_[i];
            cum_[i] = acc;
        }
    }

    const std::vector<double>& levels() const { return levels_; }
    const std::vector<double>& weights() const { return weights_; }
    double total_time() const { return total_time_; }

    // F(x): right-continuous, nondecreasing, 0 below the smallest level and
    // total_time at and above the largest.
    double evaluate(double x) const {
        const auto it = std::upper_bound(levels_.begin(), levels_.end(), x);
        if (it == levels_.begin()) return 0.0;
        return cum_[static_cast<std::size_t>(it - levels_.begin()) - 1];
    }

    // Left-continuous functional inverse Q(alpha) = inf{x : F(x) >= alpha} at
    // alpha = alpha_frac * T. alpha_frac = 1 returns the largest level.
    double quantile(double alpha_frac) const {
        if (!(alpha_frac > 0.0 && alpha_frac <= 1.0))
            throw std::invalid_argument("occupation quantile: alpha_frac outside (0,1]");
        // the tiny relief keeps ranks stable when alpha T lands exactly on an
        // accumulated-weight boundary up to rounding
        const double target = alpha_frac * total_time_ - 1e-9 * total_time_;
        const auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
        if (it == cum_.end()) return levels_.back();
        return levels_[static_cast<std::size_t>(it - cum_.begin())];
    }

    // integral g dF = sum_i w_i g(level_i), which equals the time integral of
    // g over the piecewise-constant variance reconstruction by construction.
    double integrate_against(const std::function<double(double)>& g) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < levels_.size(); ++i) acc += weights_[i] * g(levels_[i]);
        return acc;
    }

  private:
    std::vector<double> levels_;
    std::vector<double> weights_;
    std::vector<double> cum_;
    double total_time_;
};

inline const std::vector<double>& block_estimates(const SpotVolSeries& s, Estimate which) {
    return which == Estimate::truncated ? s.v_hat : s.v_hat_star;
}

inline OccupationCurve occupation_curve(const SpotVolSeries& series, Estimate which) {
    const auto& est = block_estimates(series, which);
    if (est.empty()) throw std::invalid_argument("occupation_curve: empty series");
    const double u_n = series.u_n();
    const double T = series.grid.t_days;
    std::vector<double> w(est.size(), u_n);
    w.back() += T - static_cast<double>(est.size()) * u_n;  // tail extension
    return OccupationCurve(est, std::move(w), T);
}

// Uniform distance between the piecewise-constant extension of the block
// estimates and the true variance path, over the fine grid.
inline double sup_error(const SpotVolSeries& series, Estimate which,
                        std::span<const double> v_fine) {
    const auto& est = block_estimates(series, which);
    const long n_fine = series.grid.n_fine();
    if (static_cast<long>(v_fine.size()) != n_fine + 1)
        throw std::invalid_argument("sup_error: v_fine does not cover [0, T]");
    const long nblk = series.n_blocks();
    const long per_block = static_cast<long>(series.block.k_n) * series.grid.substeps;
    double sup = 0.0;
    for (long k = 0; k <= n_fine; ++k) {
        const long b = std::min(k / per_block, nblk - 1);
        sup = std::max(sup, std::abs(est[b] - v_fine[k]));
    }
    return sup;
}

}  // namespace volocc
