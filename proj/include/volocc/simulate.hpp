#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "volocc/models.hpp"
#include "volocc/rng.hpp"

namespace volocc {

// ---------------------------------------------------------------------------
// BDLP of the Levy-driven OU log-variance model.
//
// Jumps >= eps_cut are sampled exactly as a compound Poisson process by
// splitting w(x) = A e^{-bx}(p x^{-1-p} + b x^{-p}) into a Pareto-proposal
// component thinned by e^{-bx} and a Gamma(1-p, 1/b) component thinned at
// eps_cut. Jumps below eps_cut are dropped and replaced by their mean, which
// cancels against the martingale compensator; the net drift subtracts only
// the mean of the simulated jumps, so every increment has mean exactly zero.
// ---------------------------------------------------------------------------
class BdlpSampler {
  public:
    explicit BdlpSampler(const LevyOuLogVolSpec& spec) : spec_(spec) {
        spec.validate();
        const double ts = spec.bdlp_unit_time ? 1.0 : spec.lambda;
        const double A = spec.jump_scale;
        const double b = spec.jump_tempering;
        const double p = spec.jump_index;
        const double eps = spec.eps_cut;
        gauss_rate_ = 2.0 * spec.gauss_var_marginal * ts;
        if (A > 0.0) {
            pareto_intensity_ = ts * A * std::pow(eps, -p);
            gamma_intensity_ = ts * A * std::pow(b, p) * boost::math::tgamma(1.0 - p);
            // mean of simulated jumps per unit time:
            //   integral_eps^inf x w(x) dx = A b^{p-1} [p G(1-p, b eps) + G(2-p, b eps)]
            const double m1 = A * std::pow(b, p - 1.0) *
                              (p * boost::math::tgamma(1.0 - p, b * eps) +
                               boost::math::tgamma(2.0 - p, b * eps));
            drift_rate_ = -ts * m1;
        }
    }

    double gauss_rate() const { return gauss_rate_; }
    double drift_rate() const { return drift_rate_; }

    // One BDLP increment over dt.
    double sample(double dt, std::mt19937_64& rng) const {
        if (!(dt > 0.0)) throw std::invalid_argument("bdlp: dt must be positive");
        double inc = drift_rate_ * dt;
        if (gauss_rate_ > 0.0) {
            std::normal_distribution<double> gauss(0.0, std::sqrt(gauss_rate_ * dt));
            inc += gauss(rng);
        }
        sample_jumps(dt, rng, [&](double x) { inc += x; });
        return inc;
    }

    // One increment of the stationary OU integral int_0^dt e^{-lambda(dt-s)} dL_s,
    // exact in distribution for any dt: jumps get the decay weight of their
    // uniform arrival time and the Gaussian/compensator terms integrate the
    // decay in closed form. Lets the invariant law be tabulated with long
    // coarse steps at zero discretization bias.
    double sample_ou_increment(double dt, double lambda, std::mt19937_64& rng) const {
        if (!(dt > 0.0)) throw std::invalid_argument("bdlp: dt must be positive");
        const double decay2 = -std::expm1(-2.0 * lambda * dt);  // 1 - e^{-2 lambda dt}
        const double decay1 = -std::expm1(-lambda * dt);        // 1 - e^{-lambda dt}
        double inc = drift_rate_ * decay1 / lambda;
        if (gauss_rate_ > 0.0) {
            std::normal_distribution<double> gauss(
                0.0, std::sqrt(gauss_rate_ * decay2 / (2.0 * lambda)));
            inc += gauss(rng);
        }
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        sample_jumps(dt, rng,
                     [&](double x) { inc += x * std::exp(-lambda * dt * unif(rng)); });
        return inc;
    }

  private:
    template <class OnJump>
    void sample_jumps(double dt, std::mt19937_64& rng, OnJump on_jump) const {
        const double b = spec_.jump_tempering;
        const double p = spec_.jump_index;
        const double eps = spec_.eps_cut;
        if (pareto_intensity_ > 0.0) {
            std::poisson_distribution<int> count(pareto_intensity_ * dt);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            const int n = count(rng);
            for (int i = 0; i < n; ++i) {
                const double x = eps * std::pow(unif(rng), -1.0 / p);
                if (unif(rng) < std::exp(-b * x)) on_jump(x);
            }
        }
        if (gamma_intensity_ > 0.0) {
            std::poisson_distribution<int> count(gamma_intensity_ * dt);
            std::gamma_distribution<double> size(1.0 - p, 1.0 / b);
            const int n = count(rng);
            for (int i = 0; i < n; ++i) {
                const double x = size(rng);
                if (x >= eps) on_jump(x);
            }
        }
    }

    LevyOuLogVolSpec spec_;
    double gauss_rate_ = 0.0;
    double pareto_intensity_ = 0.0;
    double gamma_intensity_ = 0.0;
    double drift_rate_ = 0.0;
};

inline double sample_bdlp_increment(double dt, const LevyOuLogVolSpec& spec,
                                    std::mt19937_64& rng) {
    return BdlpSampler(spec).sample(dt, rng);
}

// ---------------------------------------------------------------------------
// Simulators. All step the fine grid with the exact mean-reversion factor and
// an Euler treatment of the diffusion term (full truncation max(V,0) inside
// the square root for the CIR model). Per fine step the volatility innovation
// is drawn before the price innovation.
// ---------------------------------------------------------------------------

inline SamplePath simulate_cir(const CirSpec& spec, double v0,
                               const SamplingGrid& grid, std::uint64_t seed) {
    spec.validate();
    grid.validate();
    if (!(v0 > 0.0)) throw std::invalid_argument("simulate_cir: v0 must be positive");

    const long n_fine = grid.n_fine();
    const double dt = grid.fine_step();
    const double sqdt = std::sqrt(dt);
    const double decay = std::exp(-spec.kappa * dt);

    SamplePath path;
    path.grid = grid;
    path.seed = seed;
    path.v_fine.resize(n_fine + 1);
    path.x_obs.resize(grid.n_obs() + 1);

    auto rng = std::mt19937_64(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // The auxiliary state may cross zero on rare extreme draws; the variance
    // path is its positive part, which also feeds the drift and the diffusion.
    double v = v0;
    double x = 0.0;
    path.v_fine[0] = v;
    path.x_obs[0] = x;
    for (long k = 0; k < n_fine; ++k) {
        const double vplus = std::max(v, 0.0);
        const double zb = gauss(rng);
        const double zw = gauss(rng);
        const double vnext = spec.theta + (vplus - spec.theta) * decay +
                             spec.sigma_v * std::sqrt(vplus) * sqdt * zb;
        x += spec.drift_x * dt + std::sqrt(vplus) * sqdt * zw;
        v = vnext;
        path.v_fine[k + 1] = std::max(v, 0.0);
        if ((k + 1) % grid.substeps == 0) path.x_obs[(k + 1) / grid.substeps] = x;
    }
    return path;
}

inline SamplePath simulate_levy_ou_logvol(const LevyOuLogVolSpec& spec, double y0,
                                          const SamplingGrid& grid,
                                          std::uint64_t seed) {
    spec.validate();
    grid.validate();

    const long n_fine = grid.n_fine();
    const double dt = grid.fine_step();
    const double sqdt = std::sqrt(dt);
    const double decay = std::exp(-spec.lambda * dt);
    const BdlpSampler bdlp(spec);

    SamplePath path;
    path.grid = grid;
    path.seed = seed;
    path.v_fine.resize(n_fine + 1);
    path.x_obs.resize(grid.n_obs() + 1);

    auto rng = std::mt19937_64(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double y = y0;
    double x = 0.0;
    path.v_fine[0] = std::exp(y - 1.0);
    path.x_obs[0] = x;
    for (long k = 0; k < n_fine; ++k) {
        const double vol = std::exp(0.5 * (y - 1.0));  // sqrt of spot variance
        const double dl = bdlp.sample(dt, rng);
        const double zw = gauss(rng);
        y = y * decay + dl;
        x += vol * sqdt * zw;
        path.v_fine[k + 1] = std::exp(y - 1.0);
        if ((k + 1) % grid.substeps == 0) path.x_obs[(k + 1) / grid.substeps] = x;
    }
    return path;
}

inline SamplePath simulate_const_vol(const ConstVolSpec& spec,
                                     const SamplingGrid& grid, std::uint64_t seed) {
    spec.validate();
    grid.validate();

    const long n_fine = grid.n_fine();
    const double dt = grid.fine_step();
    const double sqdt = std::sqrt(dt) * std::sqrt(spec.v);

    SamplePath path;
    path.grid = grid;
    path.seed = seed;
    path.v_fine.assign(n_fine + 1, spec.v);
    path.x_obs.resize(grid.n_obs() + 1);

    auto rng = std::mt19937_64(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::poisson_distribution<int> njump(spec.jump_rate > 0.0 ? spec.jump_rate * dt : 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double x = 0.0;
    path.x_obs[0] = x;
    for (long k = 0; k < n_fine; ++k) {
        x += sqdt * gauss(rng);
        if (spec.jump_rate > 0.0) {
            const int n = njump(rng);
            for (int i = 0; i < n; ++i)
                x += (unif(rng) < 0.5 ? spec.jump_size : -spec.jump_size);
        }
        if ((k + 1) % grid.substeps == 0) path.x_obs[(k + 1) / grid.substeps] = x;
    }
    return path;
}

// ---------------------------------------------------------------------------
// Invariant distribution of the volatility state.
//
// CIR: Gamma(2 kappa theta / sigma_v^2, scale sigma_v^2 / (2 kappa)).
// Levy OU: quantiles of the OU state from one cached long-horizon simulation
// (deterministic seed), mapped through exp(y - 1) for variance quantiles.
// ---------------------------------------------------------------------------

namespace detail {

inline const std::vector<double>& levy_invariant_sample(const LevyOuLogVolSpec& spec) {
    static std::mutex mtx;
    static std::map<std::string, std::unique_ptr<std::vector<double>>> cache;

    std::ostringstream key;
    key.precision(17);
    key << spec.lambda << '|' << spec.gauss_var_marginal << '|' << spec.jump_scale
        << '|' << spec.jump_tempering << '|' << spec.jump_index << '|'
        << spec.eps_cut << '|' << spec.bdlp_unit_time;

    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key.str());
    if (it != cache.end()) return *it->second;

    // exact OU steps: long coarse steps carry no discretization bias, so the
    // horizon (and with it the quantile accuracy) is limited only by runtime
    const double dt = 1.0;
    const long n_steps = 6'000'000;
    const long burn_in = 20'000;  // ~600 relaxation times
    const double decay = std::exp(-spec.lambda * dt);
    const BdlpSampler bdlp(spec);
    auto rng = std::mt19937_64(splitmix64(0x1afcab1e));

    auto sample = std::make_unique<std::vector<double>>();
    sample->reserve(n_steps - burn_in);
    double y = 0.0;
    for (long k = 0; k < n_steps; ++k) {
        y = y * decay + bdlp.sample_ou_increment(dt, spec.lambda, rng);
        if (k >= burn_in) sample->push_back(y);
    }
    std::sort(sample->begin(), sample->end());
    return *cache.emplace(key.str(), std::move(sample)).first->second;
}

}  // namespace detail

// Quantile of the invariant law in the model's own state space (variance for
// CIR and constant-vol, the OU state Y for the log-variance model).
inline double invariant_state_quantile(const ModelSpec& model, double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("invariant quantile: prob must lie in (0,1)");
    struct V {
        double p;
        double operator()(const CirSpec& s) const {
            s.validate();
            if (s.sigma_v == 0.0) return s.theta;
            if (s.kappa == 0.0)
                throw std::invalid_argument("cir: no invariant law for kappa = 0");
            boost::math::gamma_distribution<double> g(
                2.0 * s.kappa * s.theta / (s.sigma_v * s.sigma_v),
                s.sigma_v * s.sigma_v / (2.0 * s.kappa));
            return boost::math::quantile(g, p);
        }
        double operator()(const LevyOuLogVolSpec& s) const {
            const auto& ys = detail::levy_invariant_sample(s);
            const auto rank = static_cast<std::size_t>(
                std::ceil(p * static_cast<double>(ys.size())));
            return ys[std::min(ys.size(), std::max<std::size_t>(rank, 1)) - 1];
        }
        double operator()(const ConstVolSpec& s) const { return s.v; }
    };
    return std::visit(V{prob}, model);
}

// Quantile of the invariant law of the spot variance.
inline double invariant_quantile(const ModelSpec& model, double prob) {
    const double q = invariant_state_quantile(model, prob);
    if (std::holds_alternative<LevyOuLogVolSpec>(model)) return std::exp(q - 1.0);
    return q;
}

// Simulate one replica started at the given state-space value.
inline SamplePath simulate(const ModelSpec& model, double start_state,
                           const SamplingGrid& grid, std::uint64_t seed) {
    struct V {
        double s0;
        const SamplingGrid& g;
        std::uint64_t seed;
        SamplePath operator()(const CirSpec& m) const { return simulate_cir(m, s0, g, seed); }
        SamplePath operator()(const LevyOuLogVolSpec& m) const {
            return simulate_levy_ou_logvol(m, s0, g, seed);
        }
        SamplePath operator()(const ConstVolSpec& m) const {
            return simulate_const_vol(m, g, seed);
        }
    };
    return std::visit(V{start_state, grid, seed}, model);
}

}  // namespace volocc
