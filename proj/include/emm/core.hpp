#pragma once

// Core containers shared by every other header: uniformly sampled time
// series, multivariable state-spaces with row validity, library/prediction
// split ranges, and forecast results.
//
// Index conventions: every user-facing row or column index (split ranges,
// IMF numbers, state-space column subsets) is 1-based inclusive.  Internal
// loops are 0-based; the 1-based boundary is confined to SplitSpec and the
// selection helpers, and is covered by tests.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace emm {

// ----------------------------------------------------------------- errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: bad CSV, unknown column, missing values where forbidden,
// out-of-range indices.  CLI exit code 2.
struct DataError : Error {
    using Error::Error;
};

// Mathematically undefined metric (too few valid pairs, zero variance).
// CLI exit code 3.
struct MetricError : Error {
    using Error::Error;
};

// Numerical failure: integration blow-up, insufficient library rows.
// CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};

// Bad command-line or config usage.  CLI exit code 1.
struct UsageError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------- missing

// Missing values travel as quiet NaN end to end: empty CSV cells parse to
// this marker, and a state-space row containing one is invalidated rather
// than zero-filled.
inline constexpr double missing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// ------------------------------------------------------------- TimeSeries

// Uniformly sampled named series.  time(i) = t0 + i*dt; values may contain
// missing markers.
struct TimeSeries {
    std::string name;
    double dt = 1.0;
    double t0 = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }

    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    bool has_missing() const {
        for (double v : values)
            if (is_missing(v)) return true;
        return false;
    }

    void require_valid() const {
        if (values.empty()) throw DataError("time series '" + name + "' is empty");
        if (!(dt > 0.0)) throw DataError("time series '" + name + "' has non-positive dt");
    }
};

// First n samples of a series (used by strict forecast protocols that must
// not see data beyond the current library end).
inline TimeSeries head(const TimeSeries& ts, std::size_t n) {
    TimeSeries out = ts;
    if (n < out.values.size()) out.values.resize(n);
    return out;
}

// ------------------------------------------------------------- StateSpace

// Row-per-time, column-per-coordinate matrix with labels and a validity
// mask.  valid[i] is false exactly when some coordinate at row i is missing
// (delay-embedding edges, gaps in the source data).
struct StateSpace {
    struct Column {
        std::string label;
        std::vector<double> values;
    };

    std::vector<Column> columns;
    std::vector<char> valid;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().values.size(); }
    std::size_t dim() const { return columns.size(); }

    void refresh_valid() {
        const std::size_t n = rows();
        valid.assign(n, 1);
        for (const auto& c : columns) {
            if (c.values.size() != n)
                throw DataError("state-space columns differ in length");
            for (std::size_t i = 0; i < n; ++i)
                if (is_missing(c.values[i])) valid[i] = 0;
        }
    }

    static StateSpace from_columns(std::vector<Column> cols) {
        if (cols.empty()) throw DataError("state-space needs at least one column");
        StateSpace s;
        s.columns = std::move(cols);
        s.refresh_valid();
        return s;
    }

    // Column subset by 0-based indices, order preserved.
    StateSpace select(const std::vector<std::size_t>& idx) const {
        if (idx.empty()) throw DataError("empty state-space selection");
        std::vector<Column> cols;
        cols.reserve(idx.size());
        for (std::size_t j : idx) {
            if (j >= dim()) throw DataError("state-space column index out of range");
            cols.push_back(columns[j]);
        }
        return from_columns(std::move(cols));
    }

    static StateSpace concat(const StateSpace& a, const StateSpace& b) {
        if (a.rows() != b.rows())
            throw DataError("cannot concatenate state-spaces with different row counts");
        std::vector<Column> cols = a.columns;
        cols.insert(cols.end(), b.columns.begin(), b.columns.end());
        return from_columns(std::move(cols));
    }

    // Pad with missing rows up to n (strict protocols build spaces from a
    // truncated record but address rows of the full one).
    void extend_rows(std::size_t n) {
        for (auto& c : columns)
            if (c.values.size() < n) c.values.resize(n, missing);
        refresh_valid();
    }
};

// -------------------------------------------------------------- SplitSpec

// Library and prediction row ranges, 1-based inclusive.  Overlapping ranges
// mean in-sample evaluation, disjoint ranges out-of-sample.
struct SplitSpec {
    long lib_start = 1;
    long lib_end = 1;
    long pred_start = 1;
    long pred_end = 1;

    void validate(std::size_t n_rows) const {
        const long n = static_cast<long>(n_rows);
        if (lib_start < 1 || lib_start > lib_end || lib_end > n)
            throw DataError("library range [" + std::to_string(lib_start) + "," +
                            std::to_string(lib_end) + "] invalid for " + std::to_string(n) +
                            " rows");
        if (pred_start < 1 || pred_start > pred_end || pred_end > n)
            throw DataError("prediction range [" + std::to_string(pred_start) + "," +
                            std::to_string(pred_end) + "] invalid for " + std::to_string(n) +
                            " rows");
    }

    bool overlaps() const { return lib_start <= pred_end && pred_start <= lib_end; }
};

// --------------------------------------------------------- ForecastResult

// Aligned predictions/observations plus skill metrics.  Metrics are NaN when
// undefined (fewer than two valid pairs, constant series); n_valid counts
// rows where both values are present.
struct ForecastResult {
    TimeSeries predictions;
    TimeSeries observations;
    double rho = missing;
    double rmse = missing;
    double mae = missing;
    std::size_t n_valid = 0;
};

}  // namespace emm
