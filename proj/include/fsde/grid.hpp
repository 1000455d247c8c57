#pragma once

#include <stdexcept>
#include <vector>

namespace fsde {

// Uniform partition t_m = m T / M of [0,T]. Restriction keeps the stored
// time values of the parent grid, so coarse and fine runs see bitwise equal
// grid points wherever they coincide.
struct TimeGrid {
    double T = 1.0;
    int M = 0;
    std::vector<double> times; // size M+1, times[0] = 0

    static TimeGrid uniform(double T, int M) {
        if (M < 1) throw std::invalid_argument("TimeGrid: M must be >= 1");
        TimeGrid g;
        g.T = T;
        g.M = M;
        g.times.resize(static_cast<std::size_t>(M) + 1);
        for (int m = 0; m <= M; ++m) g.times[static_cast<std::size_t>(m)] = m * T / M;
        return g;
    }

    double h() const { return T / M; }

    TimeGrid restricted(int c) const {
        if (c < 1 || M % c != 0) throw std::invalid_argument("TimeGrid: c must divide M");
        TimeGrid g;
        g.T = T;
        g.M = M / c;
        g.times.resize(static_cast<std::size_t>(g.M) + 1);
        for (int m = 0; m <= g.M; ++m)
            g.times[static_cast<std::size_t>(m)] = times[static_cast<std::size_t>(m) * c];
        return g;
    }
};

} // namespace fsde
