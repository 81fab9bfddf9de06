#pragma once

// Simplex projection: each prediction is the exponentially weighted average
// of the targets of the k nearest library states.  Weights follow
// exp(-d/d1) with d1 the nearest distance; zero-distance neighbors get
// weight 1 and the rest fall back to exp(-d/mean positive distance).
//
// Distances are accumulated in a canonical column order (stable sort of the
// labels), so permuting state-space columns cannot change any output bit.
// Each prediction is clamped to the [min, max] of its neighbor targets, so
// the convex-combination property holds exactly in floating point.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "core.hpp"
#include "metrics.hpp"

namespace emm {

struct SimplexSpec {
    std::size_t knn = 0;        // 0 = auto: state-space dimension + 1
    long tp = 0;                // prediction horizon in samples, >= 0
    long exclusion_radius = -1; // <0 = auto: 1 when split overlaps, else 0
};

namespace detail {

inline std::vector<std::size_t> canonical_column_order(const StateSpace& space) {
    std::vector<std::size_t> order(space.dim());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return space.columns[a].label < space.columns[b].label;
    });
    return order;
}

inline double state_distance(const StateSpace& space, const std::vector<std::size_t>& order,
                             std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j : order) {
        const double d = space.columns[j].values[a] - space.columns[j].values[b];
        s += d * d;
    }
    return std::sqrt(s);
}

inline long resolve_exclusion(const SplitSpec& split, long requested) {
    if (requested >= 0) return requested;
    return split.overlaps() ? 1 : 0;
}

// Library rows usable as neighbors: valid state, and the target reachable at
// +tp.  0-based output.
inline std::vector<std::size_t> library_candidates(const StateSpace& space,
                                                   const TimeSeries& target,
                                                   const SplitSpec& split, long tp) {
    std::vector<std::size_t> rows;
    const std::size_t n = space.rows();
    for (long l = split.lib_start - 1; l <= split.lib_end - 1; ++l) {
        const auto li = static_cast<std::size_t>(l);
        if (!space.valid[li]) continue;
        const long future = l + tp;
        if (future < 0 || future >= static_cast<long>(n)) continue;
        if (is_missing(target.values[static_cast<std::size_t>(future)])) continue;
        rows.push_back(li);
    }
    return rows;
}

}  // namespace detail

inline ForecastResult simplex(const StateSpace& space, const TimeSeries& target,
                              const SplitSpec& split, const SimplexSpec& spec = {}) {
    const std::size_t n = space.rows();
    if (target.size() != n)
        throw DataError("simplex: target length " + std::to_string(target.size()) +
                        " != state-space rows " + std::to_string(n));
    split.validate(n);
    if (spec.tp < 0) throw DataError("simplex: negative Tp");

    const std::size_t knn = spec.knn > 0 ? spec.knn : space.dim() + 1;
    const long excl = detail::resolve_exclusion(split, spec.exclusion_radius);
    const auto order = detail::canonical_column_order(space);
    const auto lib = detail::library_candidates(space, target, split, spec.tp);
    if (lib.size() < knn)
        throw NumericError("simplex: library has " + std::to_string(lib.size()) +
                           " usable rows, need knn=" + std::to_string(knn));

    TimeSeries predictions;
    predictions.name = target.name + "_pred";
    predictions.dt = target.dt;
    predictions.t0 = target.t0;
    predictions.values.assign(n, missing);
    TimeSeries observations = predictions;
    observations.name = target.name + "_obs";

    std::vector<std::pair<double, std::size_t>> dist;  // (distance, library row)
    dist.reserve(lib.size());

    for (long p = split.pred_start - 1; p <= split.pred_end - 1; ++p) {
        const auto pi = static_cast<std::size_t>(p);
        if (!space.valid[pi]) continue;
        const long out_row = p + spec.tp;
        if (out_row >= static_cast<long>(n)) continue;  // beyond the record, unverifiable

        dist.clear();
        for (std::size_t l : lib) {
            if (excl > 0 && std::labs(static_cast<long>(l) - p) < excl) continue;
            dist.emplace_back(detail::state_distance(space, order, pi, l), l);
        }
        if (dist.size() < knn) continue;  // exclusions starved this row

        // k nearest, ties broken by lower time index.
        std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(knn), dist.end());

        const double d1 = dist[0].first;
        double weight_sum = 0.0;
        double value_sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        if (d1 > 0.0) {
            for (std::size_t k = 0; k < knn; ++k) {
                const double w = std::exp(-dist[k].first / d1);
                const double y = target.values[dist[k].second + static_cast<std::size_t>(spec.tp)];
                weight_sum += w;
                value_sum += w * y;
                lo = std::min(lo, y);
                hi = std::max(hi, y);
            }
        } else {
            double positive_sum = 0.0;
            std::size_t positive_count = 0;
            for (std::size_t k = 0; k < knn; ++k) {
                if (dist[k].first > 0.0) {
                    positive_sum += dist[k].first;
                    ++positive_count;
                }
            }
            const double dbar = positive_count ? positive_sum / static_cast<double>(positive_count) : 0.0;
            for (std::size_t k = 0; k < knn; ++k) {
                const double w = dist[k].first == 0.0 ? 1.0
                                 : (dbar > 0.0 ? std::exp(-dist[k].first / dbar) : 1.0);
                const double y = target.values[dist[k].second + static_cast<std::size_t>(spec.tp)];
                weight_sum += w;
                value_sum += w * y;
                lo = std::min(lo, y);
                hi = std::max(hi, y);
            }
        }
        const auto oi = static_cast<std::size_t>(out_row);
        predictions.values[oi] = std::clamp(value_sum / weight_sum, lo, hi);
        observations.values[oi] = target.values[oi];
    }

    return make_forecast_result(std::move(predictions), std::move(observations));
}

}  // namespace emm
