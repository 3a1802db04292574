#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "volocc/mc.hpp"

namespace volocc {

// Flat key=value configuration ('#' starts a comment, blank lines ignored).
class Config {
  public:
    Config() = default;
    explicit Config(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    static Config parse_string(const std::string& text) {
        std::map<std::string, std::string> kv;
        std::istringstream in(text);
        std::string line;
        long lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string();
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": expected key=value");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": empty key");
            kv[key] = val;
        }
        return Config(std::move(kv));
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str());
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second;
    }
    std::string require_string(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end())
            throw std::invalid_argument("config: missing required key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key, double dflt) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? dflt : to_double(key, it->second);
    }
    long get_long(const std::string& key, long dflt) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? dflt : to_long(key, it->second);
    }
    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        try {
            return std::stoull(it->second);
        } catch (...) {
            throw std::invalid_argument("config: key '" + key + "' is not an integer");
        }
    }
    bool get_bool(const std::string& key, bool dflt) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw std::invalid_argument("config: key '" + key + "' is not a boolean");
    }
    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> dflt) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        std::vector<double> out;
        std::istringstream in(it->second);
        std::string tok;
        while (std::getline(in, tok, ','))
            if (!tok.empty()) out.push_back(to_double(key, tok));
        if (out.empty())
            throw std::invalid_argument("config: key '" + key + "' has an empty list");
        return out;
    }
    std::vector<int> get_int_list(const std::string& key, std::vector<int> dflt) const {
        const auto ds = get_double_list(key, {});
        if (ds.empty()) return dflt;
        std::vector<int> out;
        for (double d : ds) out.push_back(static_cast<int>(std::lround(d)));
        return out;
    }

    // Misspelled or unsupported keys are an error, never a silent default.
    void validate_keys(const std::set<std::string>& known) const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : kv_)
            if (!known.count(k)) unknown.push_back(k);
        if (!unknown.empty()) {
            std::string msg = "config: unknown key(s):";
            for (const auto& k : unknown) msg += " '" + k + "'";
            throw std::invalid_argument(msg);
        }
    }

    const std::map<std::string, std::string>& items() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;

    static double to_double(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw std::invalid_argument("config: key '" + key + "' is not a number");
        }
    }
    static long to_long(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const long v = std::stol(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw std::invalid_argument("config: key '" + key + "' is not an integer");
        }
    }
};

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "model.type", "model.kappa", "model.theta", "model.sigma_v", "model.drift_x",
        "model.v0", "model.lambda", "model.gauss_var", "model.jump_scale",
        "model.jump_tempering", "model.jump_index", "model.eps_cut",
        "model.bdlp_unit_time", "model.y0", "model.v", "model.jump_rate",
        "model.jump_size", "grid.t", "grid.n_per_day", "grid.substeps", "block.k_n",
        "block.gamma", "trunc.type", "trunc.alpha", "trunc.c", "trunc.varpi",
        "trunc.clamp_c", "trunc.log_c", "mc.start_quantile", "mc.alphas",
        "mc.replicas", "mc.seed", "mc.workers", "rates.ladder", "rates.gamma",
        "rates.replicas"};
    return keys;
}

inline ModelSpec build_model(const Config& cfg) {
    const std::string type = cfg.get_string("model.type", "cir");
    if (type == "cir") {
        CirSpec m;
        m.kappa = cfg.get_double("model.kappa", m.kappa);
        m.theta = cfg.get_double("model.theta", m.theta);
        m.sigma_v = cfg.get_double("model.sigma_v", m.sigma_v);
        m.drift_x = cfg.get_double("model.drift_x", m.drift_x);
        m.validate();
        return m;
    }
    if (type == "levy-ou") {
        LevyOuLogVolSpec m;
        m.lambda = cfg.get_double("model.lambda", m.lambda);
        m.gauss_var_marginal = cfg.get_double("model.gauss_var", m.gauss_var_marginal);
        m.jump_scale = cfg.get_double("model.jump_scale", m.jump_scale);
        m.jump_tempering = cfg.get_double("model.jump_tempering", m.jump_tempering);
        m.jump_index = cfg.get_double("model.jump_index", m.jump_index);
        m.eps_cut = cfg.get_double("model.eps_cut", m.eps_cut);
        m.bdlp_unit_time = cfg.get_bool("model.bdlp_unit_time", m.bdlp_unit_time);
        m.validate();
        return m;
    }
    if (type == "const") {
        ConstVolSpec m;
        m.v = cfg.get_double("model.v", m.v);
        m.jump_rate = cfg.get_double("model.jump_rate", m.jump_rate);
        m.jump_size = cfg.get_double("model.jump_size", m.jump_size);
        m.validate();
        return m;
    }
    throw std::invalid_argument("config: model.type must be cir, levy-ou or const");
}

inline SamplingGrid build_grid(const Config& cfg) {
    SamplingGrid g;
    g.t_days = cfg.get_double("grid.t", g.t_days);
    g.n_per_day = static_cast<int>(cfg.get_long("grid.n_per_day", g.n_per_day));
    g.substeps = static_cast<int>(cfg.get_long("grid.substeps", g.substeps));
    g.validate();
    return g;
}

inline TruncationSpec build_truncation(const Config& cfg) {
    const std::string type = cfg.get_string("trunc.type", "daily-bv");
    const double varpi = cfg.get_double("trunc.varpi", 0.49);
    const double c = cfg.get_double("trunc.c", 3.0);
    const bool log_c = cfg.get_bool("trunc.log_c", false);
    TruncationSpec t;
    if (type == "none")
        t = TruncNone{};
    else if (type == "fixed")
        t = TruncFixed{cfg.get_double("trunc.alpha", 4.0), varpi, log_c};
    else if (type == "global-bv")
        t = TruncGlobalBv{c, varpi, log_c};
    else if (type == "daily-bv")
        t = TruncDailyBv{c, varpi, log_c};
    else if (type == "local-bipower")
        t = TruncLocalBipower{c, varpi, cfg.get_double("trunc.clamp_c", 10.0), log_c};
    else
        throw std::invalid_argument(
            "config: trunc.type must be none, fixed, global-bv, daily-bv or local-bipower");
    validate(t);
    return t;
}

inline BlockSpec build_block(const Config& cfg, const SamplingGrid& grid,
                             bool default_evt_size = false) {
    BlockSpec b;
    if (cfg.has("block.k_n"))
        b.k_n = static_cast<int>(cfg.get_long("block.k_n", 20));
    else if (default_evt_size)
        b.k_n = evt_block_size(grid);
    if (cfg.has("block.gamma")) b.gamma_hint = cfg.get_double("block.gamma", 0.5);
    b.validate();
    return b;
}

inline McConfig build_mc_config(const Config& cfg, bool default_evt_size = false) {
    cfg.validate_keys(known_config_keys());
    McConfig mc;
    mc.model = build_model(cfg);
    mc.grid = build_grid(cfg);
    mc.block = build_block(cfg, mc.grid, default_evt_size);
    mc.trunc = build_truncation(cfg);
    mc.start_quantile = cfg.get_double("mc.start_quantile", 0.5);
    mc.alphas = cfg.get_double_list("mc.alphas", {0.25, 0.5, 0.75});
    mc.n_replicas = static_cast<int>(cfg.get_long("mc.replicas", 1000));
    mc.base_seed = cfg.get_u64("mc.seed", 1);
    mc.workers = static_cast<int>(cfg.get_long("mc.workers", 0));
    mc.validate();
    return mc;
}

}  // namespace volocc
