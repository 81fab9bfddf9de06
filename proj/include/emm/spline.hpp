#pragma once

// Natural cubic spline through strictly increasing knots (second derivative
// zero at both ends), evaluated at the integer sample grid 0..n-1.  This is
// the envelope interpolant for sifting; knots are extrema positions, already
// mirrored past the ends, so evaluation never extrapolates.

#include <cstddef>
#include <vector>

#include "core.hpp"

namespace emm::detail {

inline std::vector<double> natural_spline_at_samples(const std::vector<double>& xs,
                                                     const std::vector<double>& ys,
                                                     std::size_t n_samples) {
    const std::size_t k = xs.size();
    if (k != ys.size() || k == 0) throw NumericError("spline: bad knot arrays");

    std::vector<double> out(n_samples);
    if (k == 1) {
        for (auto& v : out) v = ys[0];
        return out;
    }
    if (k == 2) {
        const double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        for (std::size_t q = 0; q < n_samples; ++q)
            out[q] = ys[0] + slope * (static_cast<double>(q) - xs[0]);
        return out;
    }

    // Second derivatives M_i: natural ends, Thomas solve on the interior.
    std::vector<double> m(k, 0.0);
    {
        const std::size_t in = k - 2;  // interior count
        std::vector<double> diag(in), off(in > 0 ? in - 1 : 0), rhs(in);
        for (std::size_t i = 0; i < in; ++i) {
            const double h0 = xs[i + 1] - xs[i];
            const double h1 = xs[i + 2] - xs[i + 1];
            if (h0 <= 0.0 || h1 <= 0.0) throw NumericError("spline: knots not increasing");
            diag[i] = 2.0 * (h0 + h1);
            rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            if (i + 1 < in) off[i] = h1;
        }
        for (std::size_t i = 1; i < in; ++i) {
            const double q = off[i - 1] / diag[i - 1];
            diag[i] -= q * off[i - 1];
            rhs[i] -= q * rhs[i - 1];
        }
        for (std::size_t i = in; i-- > 0;) {
            double v = rhs[i];
            if (i + 1 < in) v -= off[i] * m[i + 2];
            m[i + 1] = v / diag[i];
        }
    }

    // Queries are the ascending integers 0..n-1; walk the segments once.
    std::size_t seg = 0;
    for (std::size_t q = 0; q < n_samples; ++q) {
        const double xq = static_cast<double>(q);
        while (seg + 2 < k && xs[seg + 1] < xq) ++seg;
        const double h = xs[seg + 1] - xs[seg];
        const double a = (xs[seg + 1] - xq) / h;
        const double b = (xq - xs[seg]) / h;
        out[q] = a * ys[seg] + b * ys[seg + 1] +
                 ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * h * h / 6.0;
    }
    return out;
}

}  // namespace emm::detail
