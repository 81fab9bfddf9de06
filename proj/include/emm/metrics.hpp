#pragma once

// Skill metrics.  Pairs containing a missing value are dropped rather than
// erroring; a metric throws MetricError only when it is mathematically
// undefined on the surviving pairs.

#include <algorithm>
#include <cmath>
#include <span>

#include "core.hpp"

namespace emm {

inline double mean(std::span<const double> v) {
    if (v.empty()) throw MetricError("mean of empty sequence");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Sample variance (n-1 denominator).
inline double sample_variance(std::span<const double> v) {
    if (v.size() < 2) throw MetricError("variance needs at least 2 samples");
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

namespace detail {

struct PairedValues {
    std::vector<double> a;
    std::vector<double> b;
};

inline PairedValues valid_pairs(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DataError("metric inputs differ in length (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    PairedValues p;
    p.a.reserve(a.size());
    p.b.reserve(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_missing(a[i]) || is_missing(b[i])) continue;
        p.a.push_back(a[i]);
        p.b.push_back(b[i]);
    }
    return p;
}

}  // namespace detail

// Sample Pearson correlation over valid pairs.  Requires at least two pairs
// and non-zero variance in both sequences.
inline double pearson_rho(std::span<const double> a, std::span<const double> b) {
    const auto p = detail::valid_pairs(a, b);
    const std::size_t n = p.a.size();
    if (n < 2) throw MetricError("pearson_rho needs at least 2 valid pairs");
    const double ma = mean(p.a);
    const double mb = mean(p.b);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = p.a[i] - ma;
        const double db = p.b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw MetricError("pearson_rho undefined for constant series");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Root mean square error over valid pairs (at least one pair required).
inline double rmse(std::span<const double> a, std::span<const double> b) {
    const auto p = detail::valid_pairs(a, b);
    if (p.a.empty()) throw MetricError("rmse has no valid pairs");
    double s = 0.0;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        const double d = p.a[i] - p.b[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(p.a.size()));
}

inline double mae(std::span<const double> a, std::span<const double> b) {
    const auto p = detail::valid_pairs(a, b);
    if (p.a.empty()) throw MetricError("mae has no valid pairs");
    double s = 0.0;
    for (std::size_t i = 0; i < p.a.size(); ++i) s += std::abs(p.a[i] - p.b[i]);
    return s / static_cast<double>(p.a.size());
}

// Standard error of the mean: sample standard deviation / sqrt(n).
inline double standard_error(std::span<const double> samples) {
    std::vector<double> v;
    v.reserve(samples.size());
    for (double x : samples)
        if (!is_missing(x)) v.push_back(x);
    if (v.size() < 2) throw MetricError("standard_error needs at least 2 samples");
    return std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
}

inline std::size_t count_valid_pairs(std::span<const double> a, std::span<const double> b) {
    return detail::valid_pairs(a, b).a.size();
}

// Assemble a ForecastResult from aligned series, with metrics NaN-flagged
// when undefined.
inline ForecastResult make_forecast_result(TimeSeries predictions, TimeSeries observations) {
    ForecastResult r;
    r.n_valid = count_valid_pairs(predictions.values, observations.values);
    try {
        r.rho = pearson_rho(predictions.values, observations.values);
    } catch (const MetricError&) {
        r.rho = missing;
    }
    try {
        r.rmse = rmse(predictions.values, observations.values);
        r.mae = mae(predictions.values, observations.values);
    } catch (const MetricError&) {
        r.rmse = missing;
        r.mae = missing;
    }
    r.predictions = std::move(predictions);
    r.observations = std::move(observations);
    return r;
}

}  // namespace emm
