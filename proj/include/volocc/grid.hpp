#pragma once

#include <cmath>
#include <stdexcept>

namespace volocc {

// Equispaced observation grid on [0, T] plus the finer internal grid the
// simulators step on. The time unit is one day; "5-minute" and "1-minute"
// sampling in a 6.5-hour session correspond to n_per_day = 80 and 400.
struct SamplingGrid {
    double t_days = 22.0;  // horizon T
    int n_per_day = 80;    // observations per day
    int substeps = 10;     // fine steps per observation interval

    double delta_n() const { return 1.0 / n_per_day; }
    long n_obs() const { return std::lround(t_days * n_per_day); }
    long n_fine() const { return n_obs() * substeps; }
    double fine_step() const { return delta_n() / substeps; }

    void validate() const {
        if (!(t_days > 0.0))
            throw std::invalid_argument("grid: t_days must be positive");
        if (n_per_day < 1)
            throw std::invalid_argument("grid: n_per_day must be >= 1");
        if (substeps < 1)
            throw std::invalid_argument("grid: substeps must be >= 1");
        if (n_obs() < 1)
            throw std::invalid_argument("grid: no observations on [0, T]");
    }
};

inline bool operator==(const SamplingGrid& a, const SamplingGrid& b) {
    return a.t_days == b.t_days && a.n_per_day == b.n_per_day &&
           a.substeps == b.substeps;
}

}  // namespace volocc
