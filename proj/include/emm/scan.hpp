#pragma once

// Discovery scans: forecast skill as a function of embedding dimension,
// prediction horizon, and S-map localization.

#include <vector>

#include "embed.hpp"
#include "simplex.hpp"
#include "smap.hpp"

namespace emm {

struct ScanPoint {
    double param = 0.0;
    double rho = missing;
    double rmse = missing;
    std::size_t n_valid = 0;
};

inline std::vector<ScanPoint> scan_embedding(const TimeSeries& series, const TimeSeries& target,
                                             const SplitSpec& split,
                                             const std::vector<std::size_t>& e_values,
                                             std::size_t tau, long tp) {
    std::vector<ScanPoint> table;
    table.reserve(e_values.size());
    for (std::size_t e : e_values) {
        const auto space = delay_embed(series, {e, tau});
        SimplexSpec spec;
        spec.tp = tp;
        const auto r = simplex(space, target, split, spec);
        table.push_back({static_cast<double>(e), r.rho, r.rmse, r.n_valid});
    }
    return table;
}

inline std::vector<ScanPoint> scan_horizon(const TimeSeries& series, const TimeSeries& target,
                                           const SplitSpec& split, std::size_t e, std::size_t tau,
                                           const std::vector<long>& tp_values) {
    const auto space = delay_embed(series, {e, tau});
    std::vector<ScanPoint> table;
    table.reserve(tp_values.size());
    for (long tp : tp_values) {
        SimplexSpec spec;
        spec.tp = tp;
        const auto r = simplex(space, target, split, spec);
        table.push_back({static_cast<double>(tp), r.rho, r.rmse, r.n_valid});
    }
    return table;
}

inline std::vector<ScanPoint> scan_theta(const TimeSeries& series, const TimeSeries& target,
                                         const SplitSpec& split, std::size_t e, std::size_t tau,
                                         long tp, const std::vector<double>& theta_values) {
    const auto space = delay_embed(series, {e, tau});
    std::vector<ScanPoint> table;
    table.reserve(theta_values.size());
    for (double theta : theta_values) {
        SMapSpec spec;
        spec.theta = theta;
        spec.tp = tp;
        const auto r = smap(space, target, split, spec);
        table.push_back({theta, r.forecast.rho, r.forecast.rmse, r.forecast.n_valid});
    }
    return table;
}

}  // namespace emm
