#pragma once

// Empirical mode decomposition by sifting.  Each pass subtracts the mean of
// natural-cubic-spline envelopes through the maxima and minima; extraction
// stops when the running residual has fewer than two maxima or minima.
// Boundary handling mirrors extrema across each end before the spline fit.

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <string>
#include <vector>

#include "core.hpp"
#include "spline.hpp"

namespace emm {

struct SiftParams {
    std::size_t max_imfs = 16;
    std::size_t max_sift_iterations = 100;
    // Stop sifting an IMF when sum((h_prev - h)^2) / sum(h_prev^2) drops
    // below this.
    double sd_threshold = 0.2;
    // Extrema mirrored across each end before envelope fitting.
    std::size_t boundary_pad = 2;

    void validate() const {
        if (max_imfs < 1 || max_sift_iterations < 1) throw DataError("sift caps must be >= 1");
        if (!(sd_threshold > 0.0)) throw DataError("sd_threshold must be > 0");
        if (boundary_pad < 1) throw DataError("boundary_pad must be >= 1");
    }
};

// Ordered intrinsic mode functions plus residual for one source series.
// imfs[0] is IMF 1, the highest-frequency mode; user-facing IMF numbers are
// 1-based.  Source values equal sum(imfs) + residual elementwise.
struct ImfSet {
    std::string source;
    double dt = 1.0;
    double t0 = 0.0;
    std::vector<TimeSeries> imfs;
    TimeSeries residual;

    std::size_t count() const { return imfs.size(); }
};

// Strict local extrema, 0-based indices.  A flat plateau that forms an
// extremum is reported once at its midpoint (rounded down).  Endpoints are
// never extrema.
struct Extrema {
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
};

inline Extrema find_extrema(const std::vector<double>& v) {
    for (double x : v)
        if (is_missing(x)) throw DataError("find_extrema: input contains missing values");
    Extrema e;
    const std::size_t n = v.size();
    if (n < 3) return e;

    std::size_t i = 0;
    int dir_in = 0;  // sign of the slope entering the current plateau
    while (i + 1 < n) {
        std::size_t j = i;
        while (j + 1 < n && v[j + 1] == v[i]) ++j;  // plateau [i..j]
        if (j + 1 == n) break;                      // runs into the end
        const int dir_out = v[j + 1] > v[i] ? 1 : -1;
        if (i > 0) {
            if (dir_in > 0 && dir_out < 0) e.maxima.push_back((i + j) / 2);
            if (dir_in < 0 && dir_out > 0) e.minima.push_back((i + j) / 2);
        }
        dir_in = dir_out;
        i = j + 1;
    }
    return e;
}

inline Extrema find_extrema(const TimeSeries& ts) { return find_extrema(ts.values); }

// Sign changes, counting a run of exact zeros as one crossing.
inline std::size_t zero_crossings(const std::vector<double>& v) {
    std::size_t count = 0;
    int last_sign = 0;
    for (double x : v) {
        const int s = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
        if (s != 0) {
            if (last_sign != 0 && s != last_sign) ++count;
            last_sign = s;
        }
    }
    return count;
}

// IMF shape check: extrema and zero-crossing counts differ by at most one,
// with slack for one boundary artifact at each end.
inline bool imf_shape_ok(const std::vector<double>& v) {
    const Extrema e = find_extrema(v);
    const long ext = static_cast<long>(e.maxima.size() + e.minima.size());
    const long zc = static_cast<long>(zero_crossings(v));
    return std::abs(ext - zc) <= 3;
}

namespace detail {

// Envelope through the given extrema, with `pad` of them mirrored across
// each end so the spline covers the whole sample range.
inline std::vector<double> envelope(const std::vector<double>& v,
                                    const std::vector<std::size_t>& extrema, std::size_t pad,
                                    std::size_t n) {
    const std::size_t m = extrema.size();
    const std::size_t p = std::min(pad, m);
    std::vector<double> xs, ys;
    xs.reserve(m + 2 * p);
    ys.reserve(m + 2 * p);
    for (std::size_t j = p; j-- > 0;) {  // mirrored about sample 0
        xs.push_back(-static_cast<double>(extrema[j]));
        ys.push_back(v[extrema[j]]);
    }
    for (std::size_t j = 0; j < m; ++j) {
        xs.push_back(static_cast<double>(extrema[j]));
        ys.push_back(v[extrema[j]]);
    }
    const double right = 2.0 * static_cast<double>(n - 1);
    for (std::size_t j = 0; j < p; ++j) {  // mirrored about sample n-1
        xs.push_back(right - static_cast<double>(extrema[m - 1 - j]));
        ys.push_back(v[extrema[m - 1 - j]]);
    }
    return natural_spline_at_samples(xs, ys, n);
}

}  // namespace detail

// Decompose a series into IMFs plus residual.
inline ImfSet sift(const TimeSeries& series, const SiftParams& params = {}) {
    params.validate();
    const std::size_t n = series.size();
    if (n < 8) throw DataError("sift: series '" + series.name + "' shorter than 8 samples");
    for (double x : series.values) {
        if (is_missing(x)) throw DataError("sift: series '" + series.name + "' has missing values");
        if (!std::isfinite(x)) throw DataError("sift: series '" + series.name + "' has non-finite values");
    }

    ImfSet set;
    set.source = series.name;
    set.dt = series.dt;
    set.t0 = series.t0;

    std::vector<double> residual = series.values;
    std::vector<double> h, envelope_mean(n);

    while (set.imfs.size() < params.max_imfs) {
        const Extrema res_ext = find_extrema(residual);
        if (res_ext.maxima.size() < 2 || res_ext.minima.size() < 2) break;

        h = residual;
        for (std::size_t iter = 0; iter < params.max_sift_iterations; ++iter) {
            const Extrema ext = find_extrema(h);
            if (ext.maxima.size() < 2 || ext.minima.size() < 2) break;
            const auto upper = detail::envelope(h, ext.maxima, params.boundary_pad, n);
            const auto lower = detail::envelope(h, ext.minima, params.boundary_pad, n);

            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                envelope_mean[i] = 0.5 * (upper[i] + lower[i]);
                num += envelope_mean[i] * envelope_mean[i];
                den += h[i] * h[i];
            }
            for (std::size_t i = 0; i < n; ++i) h[i] -= envelope_mean[i];
            // stop once the step is small AND h satisfies the IMF criterion
            // (extrema and zero-crossing counts within one of each other)
            if (den == 0.0) break;
            if (num / den < params.sd_threshold) {
                const Extrema he = find_extrema(h);
                const long ext_count = static_cast<long>(he.maxima.size() + he.minima.size());
                const long zc = static_cast<long>(zero_crossings(h));
                if (std::labs(ext_count - zc) <= 1) break;
            }
        }

        TimeSeries imf;
        imf.name = series.name + "_imf" + std::to_string(set.imfs.size() + 1);
        imf.dt = series.dt;
        imf.t0 = series.t0;
        imf.values = h;
        set.imfs.push_back(std::move(imf));
        for (std::size_t i = 0; i < n; ++i) residual[i] -= h[i];
    }

    set.residual.name = series.name + "_residual";
    set.residual.dt = series.dt;
    set.residual.t0 = series.t0;
    set.residual.values = std::move(residual);
    return set;
}

// State-space whose columns are the chosen IMFs (1-based indices, order
// preserved).  Empty selections and out-of-range indices are rejected.
inline StateSpace select_imfs(const ImfSet& set, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw DataError("select_imfs: empty selection");
    std::vector<StateSpace::Column> cols;
    cols.reserve(indices.size());
    for (std::size_t k : indices) {
        if (k < 1 || k > set.count())
            throw DataError("select_imfs: index " + std::to_string(k) + " out of range 1.." +
                            std::to_string(set.count()));
        cols.push_back({set.imfs[k - 1].name, set.imfs[k - 1].values});
    }
    return StateSpace::from_columns(std::move(cols));
}

}  // namespace emm
