#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "volocc/models.hpp"

namespace volocc {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Comment header of key=value lines so every output file is self-describing.
inline void write_csv_header(std::ostream& out, const std::string& tool,
                             const std::map<std::string, std::string>& echo) {
    out << "# volocc " << tool << "\n";
    for (const auto& [k, v] : echo) out << "# " << k << "=" << v << "\n";
}

inline void write_sample_path_csv(const SamplePath& path, const std::string& price_file,
                                  const std::string& truth_file,
                                  const std::map<std::string, std::string>& echo) {
    {
        std::ofstream out(price_file);
        if (!out) throw std::runtime_error("cannot write " + price_file);
        write_csv_header(out, "simulate", echo);
        out << "time,price\n";
        const double dn = path.grid.delta_n();
        for (std::size_t i = 0; i < path.x_obs.size(); ++i)
            out << format_double(i * dn) << "," << format_double(path.x_obs[i]) << "\n";
    }
    {
        std::ofstream out(truth_file);
        if (!out) throw std::runtime_error("cannot write " + truth_file);
        write_csv_header(out, "simulate", echo);
        out << "time,v_true\n";
        const double df = path.grid.fine_step();
        for (std::size_t i = 0; i < path.v_fine.size(); ++i)
            out << format_double(i * df) << "," << format_double(path.v_fine[i]) << "\n";
    }
}

struct PriceSeries {
    SamplingGrid grid;  // substeps = 1; inferred from the time column
    std::vector<double> x_obs;
};

// Input contract for `estimate`: header time,price, strictly increasing and
// equispaced times starting at 0.
inline PriceSeries read_price_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::string line;
    std::vector<double> times, prices;
    bool header_seen = false;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "time,price" && line != "time,price\r")
                throw std::invalid_argument(path + ": expected header 'time,price'");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b))
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected time,price");
        times.push_back(std::stod(a));
        prices.push_back(std::stod(b));
    }
    if (!header_seen) throw std::invalid_argument(path + ": missing header");
    if (times.size() < 3) throw std::invalid_argument(path + ": too few observations");

    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw std::invalid_argument(path + ": times must be increasing");
    const double tol = 1e-6 * std::max(1.0, times.back());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double expected = times[0] + static_cast<double>(i) * dt;
        if (std::abs(times[i] - expected) > tol)
            throw std::invalid_argument(path + ": times are not equispaced");
    }

    PriceSeries s;
    s.grid.n_per_day = static_cast<int>(std::lround(1.0 / dt));
    if (s.grid.n_per_day < 1 || std::abs(1.0 / s.grid.n_per_day - dt) > tol)
        throw std::invalid_argument(path + ": mesh must divide one day evenly");
    s.grid.t_days = static_cast<double>(times.size() - 1) * dt;
    s.grid.substeps = 1;
    s.grid.validate();
    s.x_obs = std::move(prices);
    return s;
}

}  // namespace volocc
