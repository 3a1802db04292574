#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "volocc/grid.hpp"

namespace volocc {

// Non-overlapping estimation blocks of k_n forward increments; u_n = k_n * delta_n.
struct BlockSpec {
    int k_n = 20;
    std::optional<double> gamma_hint;  // block exponent used by rate tooling

    void validate() const {
        if (k_n < 2) throw std::invalid_argument("block: k_n must be >= 2");
    }
};

// Truncation threshold v_{n,t} = alpha_{n,t} * delta_n^varpi. The level process
// alpha_{n,t} is fixed, a global or per-day bipower scale, or a clamped local
// bipower scale. log_c turns on the slowly increasing multiplier sequence
// c_n = c (1 + 0.1 log(1/delta_n)/log 80).
struct TruncNone {};
struct TruncFixed {
    double alpha = 1.0;
    double varpi = 0.49;
    bool log_c = false;
};
struct TruncGlobalBv {
    double c = 3.0;
    double varpi = 0.49;
    bool log_c = false;
};
struct TruncDailyBv {
    double c = 3.0;
    double varpi = 0.49;
    bool log_c = false;
};
struct TruncLocalBipower {
    double c = 3.0;
    double varpi = 0.49;
    double clamp_C = 10.0;
    bool log_c = false;
};
using TruncationSpec =
    std::variant<TruncNone, TruncFixed, TruncGlobalBv, TruncDailyBv, TruncLocalBipower>;

inline void validate(const TruncationSpec& t) {
    struct V {
        void check(double varpi, double c) const {
            if (!(varpi > 0.0 && varpi < 0.5))
                throw std::invalid_argument("trunc: varpi must lie in (0, 1/2)");
            if (!(c > 0.0)) throw std::invalid_argument("trunc: level must be positive");
        }
        void operator()(const TruncNone&) const {}
        void operator()(const TruncFixed& s) const { check(s.varpi, s.alpha); }
        void operator()(const TruncGlobalBv& s) const { check(s.varpi, s.c); }
        void operator()(const TruncDailyBv& s) const { check(s.varpi, s.c); }
        void operator()(const TruncLocalBipower& s) const {
            check(s.varpi, s.c);
            if (!(s.clamp_C >= 1.0))
                throw std::invalid_argument("trunc: clamp_C must be >= 1");
        }
    };
    std::visit(V{}, t);
}

inline std::string truncation_name(const TruncationSpec& t) {
    struct V {
        std::string operator()(const TruncNone&) const { return "none"; }
        std::string operator()(const TruncFixed&) const { return "fixed"; }
        std::string operator()(const TruncGlobalBv&) const { return "global-bv"; }
        std::string operator()(const TruncDailyBv&) const { return "daily-bv"; }
        std::string operator()(const TruncLocalBipower&) const { return "local-bipower"; }
    };
    return std::visit(V{}, t);
}

// Block spot-variance estimates: v_hat_star without truncation, v_hat with the
// jump truncation applied; block b spans [b u_n, (b+1) u_n) and the final block
// also covers the tail [floor(T/u_n) u_n, T].
struct SpotVolSeries {
    BlockSpec block;
    SamplingGrid grid;
    std::vector<double> v_hat_star;
    std::vector<double> v_hat;
    std::vector<double> block_start_times;
    std::vector<double> threshold_used;  // threshold at each block's first increment

    long n_blocks() const { return static_cast<long>(v_hat.size()); }
    double u_n() const { return block.k_n * grid.delta_n(); }
};

inline std::vector<double> increments(std::span<const double> x_obs) {
    if (x_obs.size() < 2) throw std::invalid_argument("increments: need >= 2 observations");
    std::vector<double> d(x_obs.size() - 1);
    for (std::size_t i = 0; i + 1 < x_obs.size(); ++i) d[i] = x_obs[i + 1] - x_obs[i];
    return d;
}

inline long day_count(const SamplingGrid& grid) {
    return (grid.n_obs() + grid.n_per_day - 1) / grid.n_per_day;
}

// Bipower variation over calendar day j (1-based):
// BV_j = (pi/2) sum |dX_{i-1}| |dX_i| with both increments inside the day.
inline double bipower_daily(std::span<const double> x_obs, const SamplingGrid& grid,
                            long day_j) {
    if (day_j < 1 || day_j > day_count(grid))
        throw std::invalid_argument("bipower_daily: day outside horizon");
    const auto d = increments(x_obs);
    const long lo = (day_j - 1) * grid.n_per_day;
    const long hi = std::min<long>(day_j * grid.n_per_day, static_cast<long>(d.size()));
    if (hi - lo < 2)
        throw std::invalid_argument("bipower_daily: day has fewer than 3 observations");
    double s = 0.0;
    for (long i = lo + 1; i < hi; ++i) s += std::abs(d[i - 1]) * std::abs(d[i]);
    return 0.5 * std::numbers::pi * s;
}

// Localized bipower volatility scale over block b:
// sigma_hat = ((pi/2) u_n^{-1} sum_{j=1}^{k_n} |dX_{bk+j}| |dX_{bk+j+1}|)^{1/2}.
inline double local_bipower(std::span<const double> x_obs, const SamplingGrid& grid,
                            long block_index, int k_n) {
    const auto d = increments(x_obs);
    const long s = block_index * k_n;
    if (block_index < 0 || s + k_n + 1 > static_cast<long>(d.size()))
        throw std::invalid_argument("local_bipower: fewer than k_n+1 increments after block start");
    double acc = 0.0;
    for (int j = 1; j <= k_n; ++j) acc += std::abs(d[s + j - 1]) * std::abs(d[s + j]);
    const double u_n = k_n * grid.delta_n();
    return std::sqrt(0.5 * std::numbers::pi * acc / u_n);
}

namespace detail {

inline double trunc_log_factor(bool enabled, const SamplingGrid& grid) {
    if (!enabled) return 1.0;
    return 1.0 + 0.1 * std::log(1.0 / grid.delta_n()) / std::log(80.0);
}

}  // namespace detail

// Per-increment truncation thresholds; increment i gets the threshold of the
// day containing its left endpoint (daily variants) or of its block (local).
inline std::vector<double> truncation_levels(const TruncationSpec& trunc,
                                             std::span<const double> x_obs,
                                             const SamplingGrid& grid,
                                             const BlockSpec& block) {
    validate(trunc);
    block.validate();
    const long n = grid.n_obs();

    struct V {
        std::span<const double> x;
        const SamplingGrid& g;
        const BlockSpec& blk;
        long n;

        std::vector<double> operator()(const TruncNone&) const {
            return std::vector<double>(n, std::numeric_limits<double>::infinity());
        }
        std::vector<double> operator()(const TruncFixed& s) const {
            const double lvl = s.alpha * detail::trunc_log_factor(s.log_c, g) *
                               std::pow(g.delta_n(), s.varpi);
            return std::vector<double>(n, lvl);
        }
        std::vector<double> operator()(const TruncGlobalBv& s) const {
            const long days = day_count(g);
            double mean_bv = 0.0;
            for (long j = 1; j <= days; ++j) mean_bv += bipower_daily(x, g, j);
            mean_bv /= static_cast<double>(days);
            const double lvl = s.c * detail::trunc_log_factor(s.log_c, g) *
                               std::sqrt(mean_bv) * std::pow(g.delta_n(), s.varpi);
            return std::vector<double>(n, lvl);
        }
        std::vector<double> operator()(const TruncDailyBv& s) const {
            const long days = day_count(g);
            std::vector<double> per_day(days);
            const double f = s.c * detail::trunc_log_factor(s.log_c, g) *
                             std::pow(g.delta_n(), s.varpi);
            for (long j = 1; j <= days; ++j)
                per_day[j - 1] = f * std::sqrt(bipower_daily(x, g, j));
            std::vector<double> lv(n);
            for (long i = 0; i < n; ++i) lv[i] = per_day[i / g.n_per_day];
            return lv;
        }
        std::vector<double> operator()(const TruncLocalBipower& s) const {
            const long nblk = n / blk.k_n;
            if (nblk < 1) throw std::invalid_argument("trunc: no full block");
            const double f = s.c * detail::trunc_log_factor(s.log_c, g) *
                             std::pow(g.delta_n(), s.varpi);
            std::vector<double> per_block(nblk);
            double last = -1.0;
            for (long b = 0; b < nblk; ++b) {
                double sig;
                if ((b + 1) * blk.k_n + 1 <= n) {
                    sig = local_bipower(x, g, b, blk.k_n);
                } else if (last >= 0.0) {
                    sig = last;  // final block reuses the last computable scale
                } else {
                    throw std::invalid_argument("trunc: local bipower needs k_n+1 increments");
                }
                last = sig;
                const double clamped = std::min(std::max(sig, 1.0 / s.clamp_C), s.clamp_C);
                per_block[b] = f * clamped;
            }
            std::vector<double> lv(n);
            for (long i = 0; i < n; ++i) lv[i] = per_block[std::min(i / blk.k_n, nblk - 1)];
            return lv;
        }
    };
    return std::visit(V{x_obs, grid, block, n}, trunc);
}

// Truncated and untruncated block spot-variance estimates over the full blocks;
// observations past floor(T/u_n) k_n increments contribute no further block.
inline SpotVolSeries spot_variance_blocks(std::span<const double> x_obs,
                                          const SamplingGrid& grid,
                                          const BlockSpec& block,
                                          const TruncationSpec& trunc) {
    grid.validate();
    block.validate();
    const long n = grid.n_obs();
    if (block.k_n > n)
        throw std::invalid_argument("spot_variance_blocks: k_n exceeds the sample");
    if (static_cast<long>(x_obs.size()) != n + 1)
        throw std::invalid_argument("spot_variance_blocks: x_obs length mismatch");

    const auto d = increments(x_obs);
    const auto thr = truncation_levels(trunc, x_obs, grid, block);
    const long nblk = n / block.k_n;
    const double u_n = block.k_n * grid.delta_n();

    SpotVolSeries out;
    out.block = block;
    out.grid = grid;
    out.v_hat_star.resize(nblk);
    out.v_hat.resize(nblk);
    out.block_start_times.resize(nblk);
    out.threshold_used.resize(nblk);
    for (long b = 0; b < nblk; ++b) {
        double all = 0.0, kept = 0.0;
        for (int j = 0; j < block.k_n; ++j) {
            const long i = b * block.k_n + j;
            const double sq = d[i] * d[i];
            all += sq;
            if (std::abs(d[i]) <= thr[i]) kept += sq;
        }
        out.v_hat_star[b] = all / u_n;
        out.v_hat[b] = kept / u_n;
        out.block_start_times[b] = static_cast<double>(b) * u_n;
        out.threshold_used[b] = thr[b * block.k_n];
    }
    return out;
}

}  // namespace volocc
