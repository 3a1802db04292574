// Command-line front end: simulate | estimate | mc | evt | rates | density.
// Reads flat key=value configs, writes CSV reports into an output directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "volocc/volocc.hpp"

namespace fs = std::filesystem;
using namespace volocc;

namespace {

std::map<std::string, std::string> echo_map(const Config& cfg,
                                            std::map<std::string, std::string> extra) {
    std::map<std::string, std::string> m = cfg.items();
    for (auto& [k, v] : extra) m[k] = v;
    return m;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
}

TruncationSpec truncation_from_flags(const std::string& type, double c, double varpi,
                                     double alpha, double clamp_c) {
    TruncationSpec t;
    if (type == "none")
        t = TruncNone{};
    else if (type == "fixed")
        t = TruncFixed{alpha, varpi, false};
    else if (type == "global-bv")
        t = TruncGlobalBv{c, varpi, false};
    else if (type == "daily-bv")
        t = TruncDailyBv{c, varpi, false};
    else if (type == "local-bipower")
        t = TruncLocalBipower{c, varpi, clamp_c, false};
    else
        throw std::invalid_argument("--trunc must be none, fixed, global-bv, daily-bv "
                                    "or local-bipower");
    validate(t);
    return t;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    const Config cfg = Config::parse_file(config_path);
    cfg.validate_keys(known_config_keys());
    const ModelSpec model = build_model(cfg);
    const SamplingGrid grid = build_grid(cfg);
    const std::uint64_t s = seed.value_or(cfg.get_u64("mc.seed", 1));

    double start;
    if (std::holds_alternative<CirSpec>(model))
        start = cfg.has("model.v0") ? cfg.get_double("model.v0", 1.0)
                                    : invariant_state_quantile(model, 0.5);
    else if (std::holds_alternative<LevyOuLogVolSpec>(model))
        start = cfg.has("model.y0") ? cfg.get_double("model.y0", 0.0)
                                    : invariant_state_quantile(model, 0.5);
    else
        start = std::get<ConstVolSpec>(model).v;

    const SamplePath path = simulate(model, start, grid, s);
    auto echo = echo_map(cfg, {{"seed", std::to_string(s)}});
    fs::create_directories(out_dir);
    write_sample_path_csv(path, (fs::path(out_dir) / "prices.csv").string(),
                          (fs::path(out_dir) / "true_variance.csv").string(), echo);
    std::cout << "wrote " << out_dir << "/prices.csv and true_variance.csv\n";
    return 0;
}

int cmd_estimate(const std::string& input, const std::string& out_dir, int k_n,
                 const std::string& trunc_type, double trunc_c, double trunc_varpi,
                 double trunc_alpha, double clamp_c, std::vector<double> alphas) {
    const PriceSeries prices = read_price_csv(input);
    const BlockSpec block{k_n, std::nullopt};
    const TruncationSpec trunc =
        truncation_from_flags(trunc_type, trunc_c, trunc_varpi, trunc_alpha, clamp_c);
    const auto series = spot_variance_blocks(prices.x_obs, prices.grid, block, trunc);
    const auto curve = occupation_curve(series, Estimate::truncated);

    std::map<std::string, std::string> echo{
        {"input", input},
        {"k_n", std::to_string(k_n)},
        {"trunc", trunc_type},
        {"n_per_day", std::to_string(prices.grid.n_per_day)},
        {"t_days", format_double(prices.grid.t_days)}};

    auto sv = open_out(out_dir, "spotvol.csv");
    write_csv_header(sv, "estimate", echo);
    sv << "block_index,t_start,v_hat_star,v_hat,threshold_used\n";
    for (long b = 0; b < series.n_blocks(); ++b)
        sv << b << "," << format_double(series.block_start_times[b]) << ","
           << format_double(series.v_hat_star[b]) << ","
           << format_double(series.v_hat[b]) << ","
           << format_double(series.threshold_used[b]) << "\n";

    auto oc = open_out(out_dir, "occupation.csv");
    write_csv_header(oc, "estimate", echo);
    oc << "level,cumulative_time\n";
    double cum = 0.0;
    for (std::size_t i = 0; i < curve.levels().size(); ++i) {
        cum += curve.weights()[i];
        oc << format_double(curve.levels()[i]) << "," << format_double(cum) << "\n";
    }

    auto qc = open_out(out_dir, "quantiles.csv");
    write_csv_header(qc, "estimate", echo);
    qc << "alpha_frac,q_hat\n";
    for (double a : alphas)
        qc << format_double(a) << "," << format_double(curve.quantile(a)) << "\n";

    std::cout << "wrote " << out_dir << "/spotvol.csv, occupation.csv, quantiles.csv\n";
    return 0;
}

int cmd_mc(const std::string& config_path, const std::string& out_dir,
           std::optional<std::uint64_t> seed, std::optional<int> workers) {
    Config cfg = Config::parse_file(config_path);
    McConfig mc = build_mc_config(cfg);
    if (seed) mc.base_seed = *seed;
    if (workers) mc.workers = *workers;
    const McReport rep = run_mc(mc);

    auto out = open_out(out_dir, "mc_report.csv");
    write_csv_header(out, "mc",
                     echo_map(cfg, {{"seed", std::to_string(mc.base_seed)}}));
    out << "model,n,k_n,p0,alpha,true_mean,bias,mad,stderr,replicas,seed\n";
    for (const auto& c : rep.cells)
        out << rep.model << "," << rep.n_per_day << "," << rep.k_n << ","
            << format_double(rep.start_quantile) << "," << format_double(c.alpha) << ","
            << format_double(c.true_mean) << "," << format_double(c.bias) << ","
            << format_double(c.mad) << "," << format_double(c.mc_stderr) << ","
            << rep.n_replicas << "," << rep.base_seed << "\n";
    std::cout << "wrote " << out_dir << "/mc_report.csv\n";
    return 0;
}

int cmd_evt(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, std::optional<int> workers) {
    Config cfg = Config::parse_file(config_path);
    McConfig mc = build_mc_config(cfg, /*default_evt_size=*/true);
    if (seed) mc.base_seed = *seed;
    if (workers) mc.workers = *workers;
    const EvtResult res = run_evt(mc);

    auto out = open_out(out_dir, "evt.csv");
    write_csv_header(out, "evt",
                     echo_map(cfg, {{"seed", std::to_string(mc.base_seed)},
                                    {"k_n", std::to_string(res.k_n)},
                                    {"b_n", std::to_string(res.b_n)},
                                    {"m_n", format_double(res.m_n)},
                                    {"c_n", format_double(res.c_n)},
                                    {"ks", format_double(res.ks)}}));
    out << "replica,M_n,normalized\n";
    for (std::size_t i = 0; i < res.max_raw.size(); ++i)
        out << i << "," << format_double(res.max_raw[i]) << ","
            << format_double(res.normalized[i]) << "\n";
    std::cout << "ks=" << format_double(res.ks) << " (k_n=" << res.k_n
              << ", b_n=" << res.b_n << ")\n";
    return 0;
}

int cmd_rates(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::optional<int> workers) {
    Config cfg = Config::parse_file(config_path);
    cfg.validate_keys(known_config_keys());
    const ModelSpec model = build_model(cfg);
    const SamplingGrid grid = build_grid(cfg);
    const auto ladder = cfg.get_int_list("rates.ladder", {40, 80, 160, 320, 640, 1280});
    const double gamma = cfg.get_double("rates.gamma", 0.5);
    const int replicas = static_cast<int>(cfg.get_long("rates.replicas", 200));
    const std::uint64_t s = seed.value_or(cfg.get_u64("mc.seed", 1));
    const int w = workers.value_or(static_cast<int>(cfg.get_long("mc.workers", 0)));

    const RateStudyResult res =
        run_rate_study(model, grid.t_days, grid.substeps, ladder, gamma, replicas, s, w);

    auto out = open_out(out_dir, "rates.csv");
    write_csv_header(out, "rates",
                     echo_map(cfg, {{"seed", std::to_string(s)},
                                    {"slope", format_double(res.slope)}}));
    out << "n,delta_n,mean_eta,k_n\n";
    for (std::size_t i = 0; i < res.ladder.size(); ++i)
        out << res.ladder[i] << "," << format_double(res.delta_n[i]) << ","
            << format_double(res.mean_eta[i]) << "," << res.k_n[i] << "\n";
    out << "slope,,," << format_double(res.slope) << "\n";
    std::cout << "slope=" << format_double(res.slope) << "\n";
    return 0;
}

int cmd_density(const std::string& input, const std::string& out_dir, int k_n,
                const std::string& trunc_type, double trunc_c, double trunc_varpi,
                double trunc_alpha, double clamp_c, const std::string& kernel_name,
                double bandwidth, int grid_points) {
    const PriceSeries prices = read_price_csv(input);
    const BlockSpec block{k_n, std::nullopt};
    const TruncationSpec trunc =
        truncation_from_flags(trunc_type, trunc_c, trunc_varpi, trunc_alpha, clamp_c);
    const auto series = spot_variance_blocks(prices.x_obs, prices.grid, block, trunc);
    const auto curve = occupation_curve(series, Estimate::truncated);

    KernelSpec spec;
    if (kernel_name == "gaussian")
        spec.kernel = KernelType::gaussian;
    else if (kernel_name == "epanechnikov")
        spec.kernel = KernelType::epanechnikov_c1;
    else
        throw std::invalid_argument("--kernel must be gaussian or epanechnikov");
    spec.bandwidth = bandwidth > 0.0 ? bandwidth : default_bandwidth(prices.grid);

    const auto xs = default_eval_grid(curve, spec.bandwidth, grid_points);
    const auto fh = kernel_density(curve, spec, xs);

    auto out = open_out(out_dir, "density.csv");
    write_csv_header(out, "density",
                     {{"input", input},
                      {"k_n", std::to_string(k_n)},
                      {"trunc", trunc_type},
                      {"kernel", kernel_name},
                      {"bandwidth", format_double(spec.bandwidth)}});
    out << "x,f_hat\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << format_double(xs[i]) << "," << format_double(fh[i]) << "\n";
    std::cout << "wrote " << out_dir << "/density.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"volatility occupation time toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", input;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    int k_n = 20, grid_points = 200;
    std::string trunc_type = "daily-bv", kernel_name = "gaussian";
    double trunc_c = 3.0, trunc_varpi = 0.49, trunc_alpha = 4.0, clamp_c = 10.0;
    double bandwidth = 0.0;
    std::vector<double> alphas = {0.25, 0.5, 0.75};

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "key=value config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override mc.seed");
        sub->add_option("--workers", workers, "override mc.workers");
    };
    auto add_estimation = [&](CLI::App* sub) {
        sub->add_option("--input", input, "price CSV (time,price)")->required();
        sub->add_option("--kn", k_n, "block size k_n");
        sub->add_option("--trunc", trunc_type,
                        "none|fixed|global-bv|daily-bv|local-bipower");
        sub->add_option("--trunc-c", trunc_c, "truncation multiplier c");
        sub->add_option("--trunc-varpi", trunc_varpi, "truncation exponent varpi");
        sub->add_option("--trunc-alpha", trunc_alpha, "fixed truncation level alpha");
        sub->add_option("--clamp-c", clamp_c, "local bipower clamp C");
    };

    auto* sim = app.add_subcommand("simulate", "simulate one path, write prices + truth");
    add_common(sim, true);
    auto* est = app.add_subcommand("estimate", "spot variance, occupation, quantiles");
    add_estimation(est);
    est->add_option("--alphas", alphas, "quantile fractions")->delimiter(',');
    est->add_option("--out", out_dir, "output directory");
    auto* mc = app.add_subcommand("mc", "Monte Carlo quantile study");
    add_common(mc, true);
    auto* evt = app.add_subcommand("evt", "extreme-value experiment (constant vol)");
    add_common(evt, true);
    auto* rates = app.add_subcommand("rates", "sup-error rate study over an n ladder");
    add_common(rates, true);
    auto* dens = app.add_subcommand("density", "kernel occupation density");
    add_estimation(dens);
    dens->add_option("--kernel", kernel_name, "gaussian|epanechnikov");
    dens->add_option("--bandwidth", bandwidth, "kernel bandwidth (0 = default rule)");
    dens->add_option("--grid-points", grid_points, "evaluation grid size");
    dens->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, seed);
        if (est->parsed())
            return cmd_estimate(input, out_dir, k_n, trunc_type, trunc_c, trunc_varpi,
                                trunc_alpha, clamp_c, alphas);
        if (mc->parsed()) return cmd_mc(config_path, out_dir, seed, workers);
        if (evt->parsed()) return cmd_evt(config_path, out_dir, seed, workers);
        if (rates->parsed()) return cmd_rates(config_path, out_dir, seed, workers);
        if (dens->parsed())
            return cmd_density(input, out_dir, k_n, trunc_type, trunc_c, trunc_varpi,
                               trunc_alpha, clamp_c, kernel_name, bandwidth, grid_points);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
