#pragma once

// Takens delay embedding: column j (1-based) holds x(t-(j-1)*tau).  Rows
// whose lags reach outside the record are invalid.

#include <string>
#include <vector>

#include "core.hpp"

namespace emm {

struct EmbedSpec {
    std::size_t E = 1;
    std::size_t tau = 1;

    void validate() const {
        if (E < 1) throw DataError("embedding dimension must be >= 1");
        if (tau < 1) throw DataError("embedding delay must be >= 1");
    }
};

inline StateSpace delay_embed(const TimeSeries& series, const EmbedSpec& spec) {
    spec.validate();
    series.require_valid();
    const std::size_t n = series.size();
    if (n <= (spec.E - 1) * spec.tau)
        throw DataError("delay_embed: series '" + series.name + "' too short for E=" +
                        std::to_string(spec.E) + ", tau=" + std::to_string(spec.tau));

    std::vector<StateSpace::Column> cols;
    cols.reserve(spec.E);
    for (std::size_t j = 0; j < spec.E; ++j) {
        const std::size_t lag = j * spec.tau;
        StateSpace::Column c;
        c.label = series.name + "(t-" + std::to_string(lag) + ")";
        c.values.assign(n, missing);
        for (std::size_t i = lag; i < n; ++i) c.values[i] = series.values[i - lag];
        cols.push_back(std::move(c));
    }
    return StateSpace::from_columns(std::move(cols));
}

}  // namespace emm
