// series.hpp — correlation-series result container

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace zenodot {

struct SeriesMeta {
    double rate = 0.0;                     // events/ns
    std::uint64_t seed = 0;
    int n_trajectories = 0;
    int n_bath_draws = 0;
    std::string estimator;                 // "analytic", "nonselective", "selective"
    std::vector<double> p_v_per_bath;      // Tr(O_V rho_N) per bath draw
    std::vector<std::string> warnings;
};

struct CorrelationSeries {
    std::vector<double> taus;      // ns
    std::vector<double> g2;
    std::vector<double> stderr_;   // pointwise standard error (0 for analytic)
    SeriesMeta meta;
};

}  // namespace zenodot
