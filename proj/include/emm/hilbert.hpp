#pragma once

// Analytic signal and instantaneous frequency.  The analytic signal is built
// with the frequency-domain single-sideband method; instantaneous frequency
// is the unwrapped phase derivative in cycles per time unit.  Samples where
// the analytic amplitude vanishes get a missing marker.

#include <complex>
#include <vector>

#include "core.hpp"
#include "emd.hpp"
#include "fft.hpp"
#include "metrics.hpp"

namespace emm {

namespace detail {

inline std::vector<cplx> analytic_signal(const std::vector<double>& x) {
    const std::size_t n = x.size();
    auto spec = fft_real(x);
    // Single sideband: keep DC (and Nyquist for even n), double positive
    // frequencies, zero negatives.
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < half + (n % 2 ? 1 : 0); ++k) spec[k] *= 2.0;
    for (std::size_t k = half + 1; k < n; ++k) spec[k] = cplx(0.0, 0.0);
    return fft(std::move(spec), true);
}

}  // namespace detail

// Instantaneous frequency of one IMF, per sample.  The series is demeaned,
// Hilbert-transformed, and the unwrapped phase is differentiated centrally
// (one-sided at the ends) and divided by 2*pi*dt.
inline TimeSeries instantaneous_frequency(const TimeSeries& imf) {
    const std::size_t n = imf.size();
    if (n < 8) throw DataError("instantaneous_frequency: series shorter than 8 samples");
    for (double v : imf.values)
        if (is_missing(v)) throw DataError("instantaneous_frequency: missing values");

    std::vector<double> x = imf.values;
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(n);
    for (double& v : x) v -= m;

    const auto z = detail::analytic_signal(x);

    double max_amp = 0.0;
    for (const auto& c : z) max_amp = std::max(max_amp, std::abs(c));
    const double amp_floor = 1e-12 * std::max(1.0, max_amp);

    // Unwrapped phase; amplitude dropouts break the unwrap chain.
    std::vector<double> phase(n, missing);
    double offset = 0.0;
    double prev = missing;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(z[i]) <= amp_floor) {
            prev = missing;
            continue;
        }
        const double raw = std::arg(z[i]);
        if (!is_missing(prev)) {
            double d = raw + offset - prev;
            while (d > detail::pi) {
                offset -= 2.0 * detail::pi;
                d -= 2.0 * detail::pi;
            }
            while (d < -detail::pi) {
                offset += 2.0 * detail::pi;
                d += 2.0 * detail::pi;
            }
        } else {
            offset = 0.0;
        }
        phase[i] = raw + offset;
        prev = phase[i];
    }

    TimeSeries out;
    out.name = imf.name + "_if";
    out.dt = imf.dt;
    out.t0 = imf.t0;
    out.values.assign(n, missing);
    const double scale = 2.0 * detail::pi * imf.dt;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_missing(phase[i])) continue;
        if (i == 0) {
            if (!is_missing(phase[1])) out.values[0] = (phase[1] - phase[0]) / scale;
        } else if (i + 1 == n) {
            if (!is_missing(phase[i - 1])) out.values[i] = (phase[i] - phase[i - 1]) / scale;
        } else if (!is_missing(phase[i - 1]) && !is_missing(phase[i + 1])) {
            out.values[i] = (phase[i + 1] - phase[i - 1]) / (2.0 * scale);
        }
    }
    return out;
}

// Variance of the instantaneous frequency away from the ends (a fraction of
// the length is dropped at each end to avoid Hilbert edge artifacts).
// Returns missing when fewer than two interior samples are defined.
inline double interior_if_variance(const TimeSeries& if_series, double margin_fraction = 0.05) {
    const std::size_t n = if_series.size();
    const std::size_t margin = static_cast<std::size_t>(margin_fraction * static_cast<double>(n));
    std::vector<double> interior;
    for (std::size_t i = margin; i + margin < n; ++i)
        if (!is_missing(if_series.values[i])) interior.push_back(if_series.values[i]);
    if (interior.size() < 2) return missing;
    return sample_variance(interior);
}

// Indices (1-based, order preserved) of IMFs whose interior IF variance is
// below the threshold - candidate signal-bearing modes.
inline std::vector<std::size_t> if_variance_filter(const ImfSet& set, double threshold) {
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < set.count(); ++k) {
        const double var = interior_if_variance(instantaneous_frequency(set.imfs[k]));
        if (!is_missing(var) && var < threshold) keep.push_back(k + 1);
    }
    return keep;
}

}  // namespace emm
