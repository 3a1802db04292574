#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "volocc/occupation.hpp"
#include "volocc/oracle.hpp"
#include "volocc/simulate.hpp"
#include "volocc/spotvol.hpp"

namespace volocc {

// Static-stride worker pool. Results must be written into preallocated
// per-index slots; the reduction done by the caller is then independent of the
// worker count.
inline void parallel_for(long n, int workers, const std::function<void(long)>& fn) {
    if (workers <= 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<int>(std::min<long>(workers, std::max<long>(n, 1)));
    if (workers == 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex mtx;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (long i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mtx);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Monte Carlo study of the quantile estimator: per replica, simulate, estimate
// the spot variance, invert the occupation curve, and compare against the
// per-path oracle quantile.
// ---------------------------------------------------------------------------

struct McConfig {
    ModelSpec model = CirSpec{};
    SamplingGrid grid;
    BlockSpec block;
    TruncationSpec trunc = TruncDailyBv{};
    double start_quantile = 0.5;            // p0: invariant quantile the path starts from
    std::vector<double> alphas = {0.25, 0.5, 0.75};
    int n_replicas = 1000;
    std::uint64_t base_seed = 1;
    int workers = 0;  // 0 = hardware concurrency

    void validate() const {
        volocc::validate(model);
        grid.validate();
        block.validate();
        volocc::validate(trunc);
        if (!(start_quantile > 0.0 && start_quantile < 1.0))
            throw std::invalid_argument("mc: start_quantile outside (0,1)");
        if (n_replicas < 1) throw std::invalid_argument("mc: n_replicas must be >= 1");
        if (alphas.empty()) throw std::invalid_argument("mc: no quantile levels");
        for (double a : alphas)
            if (!(a > 0.0 && a < 1.0))
                throw std::invalid_argument("mc: alphas must lie in (0,1)");
    }
};

struct McCell {
    double alpha;
    double true_mean;  // mean over replicas of the per-path oracle quantile
    double bias;       // mean of Q_hat - Q_oracle
    double mad;        // mean of |Q_hat - Q_oracle|
    double mc_stderr;  // standard error of the bias
};

struct McReport {
    std::vector<McCell> cells;
    int n_replicas = 0;
    // configuration echo
    std::string model;
    std::string truncation;
    int n_per_day = 0;
    int k_n = 0;
    double t_days = 0.0;
    double start_quantile = 0.0;
    std::uint64_t base_seed = 0;
};

inline McReport run_mc(const McConfig& cfg) {
    cfg.validate();
    const double start_state = invariant_state_quantile(cfg.model, cfg.start_quantile);
    const long R = cfg.n_replicas;
    const std::size_t A = cfg.alphas.size();

    std::vector<double> q_hat(R * A), q_or(R * A);
    parallel_for(R, cfg.workers, [&](long i) {
        try {
            const auto path =
                simulate(cfg.model, start_state, cfg.grid, replica_seed(cfg.base_seed, i));
            const auto series =
                spot_variance_blocks(path.x_obs, cfg.grid, cfg.block, cfg.trunc);
            const auto curve = occupation_curve(series, Estimate::truncated);
            for (std::size_t a = 0; a < A; ++a) {
                q_hat[i * A + a] = curve.quantile(cfg.alphas[a]);
                q_or[i * A + a] = oracle_quantile(path.v_fine, cfg.grid, cfg.alphas[a]);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("replica " + std::to_string(i) + ": " + e.what());
        }
    });

    McReport rep;
    rep.n_replicas = cfg.n_replicas;
    rep.model = model_name(cfg.model);
    rep.truncation = truncation_name(cfg.trunc);
    rep.n_per_day = cfg.grid.n_per_day;
    rep.k_n = cfg.block.k_n;
    rep.t_days = cfg.grid.t_days;
    rep.start_quantile = cfg.start_quantile;
    rep.base_seed = cfg.base_seed;
    for (std::size_t a = 0; a < A; ++a) {
        double sum_or = 0.0, sum_d = 0.0, sum_ad = 0.0;
        for (long i = 0; i < R; ++i) {
            const double d = q_hat[i * A + a] - q_or[i * A + a];
            sum_or += q_or[i * A + a];
            sum_d += d;
            sum_ad += std::abs(d);
        }
        const double bias = sum_d / R;
        double var = 0.0;
        for (long i = 0; i < R; ++i) {
            const double d = q_hat[i * A + a] - q_or[i * A + a] - bias;
            var += d * d;
        }
        const double stderr_ = R > 1 ? std::sqrt(var / (R - 1) / R) : 0.0;
        rep.cells.push_back({cfg.alphas[a], sum_or / R, bias, sum_ad / R, stderr_});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Extreme-value experiment under constant volatility: the normalized maximum
// block error c_n^{-1}(M_n - m_n) is compared against the Gumbel-type limit
// exp(-2 exp(-x)) with a one-sample Kolmogorov-Smirnov distance.
// ---------------------------------------------------------------------------

// k_n = round(delta^{-1/2}) with the mesh measured relative to the whole
// observation window, i.e. k_n = round(sqrt(n_obs)).
inline int evt_block_size(const SamplingGrid& grid) {
    return static_cast<int>(std::lround(std::sqrt(static_cast<double>(grid.n_obs()))));
}

struct EvtResult {
    int k_n = 0;
    long b_n = 0;
    double m_n = 0.0;
    double c_n = 0.0;
    double ks = 0.0;                 // KS distance to exp(-2 exp(-x))
    std::vector<double> max_raw;     // M_n per replica
    std::vector<double> normalized;  // (M_n - m_n)/c_n per replica
};

inline double ks_distance_gumbel_type(std::vector<double> sample) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = gumbel_type_cdf(sample[i]);
        d = std::max(d, std::max((i + 1) / n - f, f - i / n));
    }
    return d;
}

inline EvtResult run_evt(const McConfig& cfg) {
    cfg.validate();
    const auto* cv = std::get_if<ConstVolSpec>(&cfg.model);
    if (!cv) throw std::invalid_argument("run_evt: requires a constant-volatility model");
    const double v = cv->v;
    const long nblk = cfg.grid.n_obs() / cfg.block.k_n;
    if (nblk < 10) throw std::invalid_argument("run_evt: needs at least 10 blocks");
    const bool use_trunc = !std::holds_alternative<TruncNone>(cfg.trunc);
    const double root_k = std::sqrt(static_cast<double>(cfg.block.k_n));

    EvtResult res;
    res.k_n = cfg.block.k_n;
    res.b_n = nblk;
    const auto norm = evt_normalization(nblk);
    res.m_n = norm.m_n;
    res.c_n = norm.c_n;
    res.max_raw.resize(cfg.n_replicas);
    res.normalized.resize(cfg.n_replicas);

    parallel_for(cfg.n_replicas, cfg.workers, [&](long i) {
        const auto path = simulate(cfg.model, v, cfg.grid, replica_seed(cfg.base_seed, i));
        const auto series = spot_variance_blocks(path.x_obs, cfg.grid, cfg.block, cfg.trunc);
        const auto& est = use_trunc ? series.v_hat : series.v_hat_star;
        double m = 0.0;
        for (double e : est)
            m = std::max(m, std::abs(root_k * (e - v) / (std::sqrt(2.0) * v)));
        res.max_raw[i] = m;
        res.normalized[i] = (m - norm.m_n) / norm.c_n;
    });
    res.ks = ks_distance_gumbel_type(res.normalized);
    return res;
}

// ---------------------------------------------------------------------------
// Rate study: mean uniform recovery error eta* across a ladder of sampling
// frequencies, with the fitted log-log slope against delta_n.
// ---------------------------------------------------------------------------

struct RateStudyResult {
    std::vector<int> ladder;       // observations per day
    std::vector<int> k_n;          // block size per rung
    std::vector<double> delta_n;
    std::vector<double> mean_eta;  // mean sup-error of the untruncated estimate
    double slope = 0.0;            // least-squares slope of log mean_eta on log delta_n
};

inline RateStudyResult run_rate_study(const ModelSpec& model, double t_days,
                                      int substeps, const std::vector<int>& ladder,
                                      double gamma, int replicas,
                                      std::uint64_t base_seed, int workers) {
    if (ladder.size() < 3)
        throw std::invalid_argument("rate study: ladder must have at least 3 rungs");
    if (std::holds_alternative<LevyOuLogVolSpec>(model))
        throw std::invalid_argument("rate study: requires a continuous-volatility model");
    if (replicas < 1) throw std::invalid_argument("rate study: replicas must be >= 1");

    RateStudyResult out;
    out.ladder = ladder;
    const double start = invariant_state_quantile(model, 0.5);
    for (std::size_t ni = 0; ni < ladder.size(); ++ni) {
        SamplingGrid grid{t_days, ladder[ni], substeps};
        grid.validate();
        // k_n = round(delta_n^{-gamma}) in day units; the small proportionality
        // constant keeps the block count high, where the log factor in the
        // maximum drags the measured slope least
        const int k_n = std::max<int>(
            2, static_cast<int>(std::lround(std::pow(static_cast<double>(grid.n_per_day), gamma))));
        const BlockSpec block{k_n, gamma};
        std::vector<double> eta(replicas);
        parallel_for(replicas, workers, [&](long i) {
            const auto path = simulate(model, start, grid,
                                       replica_seed(base_seed + 7919 * ni, i));
            const auto series = spot_variance_blocks(path.x_obs, grid, block, TruncNone{});
            eta[i] = sup_error(series, Estimate::untruncated, path.v_fine);
        });
        double mean = 0.0;
        for (double e : eta) mean += e;
        out.k_n.push_back(k_n);
        out.delta_n.push_back(grid.delta_n());
        out.mean_eta.push_back(mean / replicas);
    }

    double mx = 0.0, my = 0.0;
    const std::size_t m = out.delta_n.size();
    for (std::size_t i = 0; i < m; ++i) {
        mx += std::log(out.delta_n[i]);
        my += std::log(out.mean_eta[i]);
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dx = std::log(out.delta_n[i]) - mx;
        sxy += dx * (std::log(out.mean_eta[i]) - my);
        sxx += dx * dx;
    }
    out.slope = sxy / sxx;
    return out;
}

}  // namespace volocc
