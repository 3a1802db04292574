#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "volocc/grid.hpp"

namespace volocc {

// Square-root variance: dV = kappa (theta - V) dt + sigma_v sqrt(V) dB,
// dX = drift_x dt + sqrt(V) dW, with W and B independent.
struct CirSpec {
    double kappa = 0.03;
    double theta = 1.0;
    double sigma_v = 0.2;
    double drift_x = 0.0;  // zero in all baseline experiments

    bool feller_ok() const { return 2.0 * kappa * theta >= sigma_v * sigma_v; }

    void validate() const {
        if (kappa < 0.0 || theta < 0.0 || sigma_v < 0.0)
            throw std::invalid_argument("cir: kappa, theta, sigma_v must be >= 0");
    }
};

// Log-variance OU state driven by a Levy martingale:
//   dY = -lambda Y dt + dL,   spot variance V = exp(Y - 1).
// The BDLP is pinned by the stationary law of Y: Gaussian variance
// gauss_var_marginal plus jump Levy density A e^{-b x} x^{-1-p} on x > 0.
// The corresponding BDLP jump density is w(x) = A e^{-b x}(p x^{-1-p} + b x^{-p}),
// run at rate lambda (Gaussian variance 2 lambda per unit time) so the OU
// marginal matches exactly. With bdlp_unit_time the same triplet is used as
// the driver's unit-time law without the lambda rescaling.
struct LevyOuLogVolSpec {
    double lambda = 0.03;
    double gauss_var_marginal = 1.0;
    double jump_scale = 2.33;     // A
    double jump_tempering = 2.0;  // b
    double jump_index = 0.5;      // p in (0,1): finite-variation jumps
    double eps_cut = 1e-4;        // small-jump cutoff of the CP approximation
    bool bdlp_unit_time = false;

    void validate() const {
        if (!(lambda > 0.0))
            throw std::invalid_argument("levy-ou: lambda must be positive");
        if (gauss_var_marginal < 0.0)
            throw std::invalid_argument("levy-ou: gauss_var_marginal must be >= 0");
        if (jump_scale < 0.0)
            throw std::invalid_argument("levy-ou: jump_scale must be >= 0");
        if (!(jump_tempering > 0.0))
            throw std::invalid_argument("levy-ou: jump_tempering must be positive");
        if (!(jump_index > 0.0 && jump_index < 1.0))
            throw std::invalid_argument("levy-ou: jump_index must lie in (0,1)");
        if (!(eps_cut > 0.0))
            throw std::invalid_argument("levy-ou: eps_cut must be positive");
    }
};

// Constant variance with optional compound-Poisson price jumps; jump sizes are
// +/- jump_size with equal probability (mean zero, no compensator needed).
struct ConstVolSpec {
    double v = 1.0;
    double jump_rate = 0.0;  // per day
    double jump_size = 0.0;

    void validate() const {
        if (!(v > 0.0))
            throw std::invalid_argument("const-vol: v must be positive");
        if (jump_rate < 0.0)
            throw std::invalid_argument("const-vol: jump_rate must be >= 0");
    }
};

using ModelSpec = std::variant<CirSpec, LevyOuLogVolSpec, ConstVolSpec>;

inline void validate(const ModelSpec& m) {
    std::visit([](const auto& s) { s.validate(); }, m);
}

inline std::string model_name(const ModelSpec& m) {
    struct V {
        std::string operator()(const CirSpec&) const { return "cir"; }
        std::string operator()(const LevyOuLogVolSpec&) const { return "levy-ou"; }
        std::string operator()(const ConstVolSpec&) const { return "const"; }
    };
    return std::visit(V{}, m);
}

// One simulated replica: observed prices plus the latent variance path on the
// fine grid (the simulation ground truth used by the oracle).
struct SamplePath {
    SamplingGrid grid;
    std::vector<double> x_obs;   // n_obs + 1 price levels
    std::vector<double> v_fine;  // n_fine + 1 variance values
    std::uint64_t seed = 0;
};

}  // namespace volocc
