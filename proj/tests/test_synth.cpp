#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <emm/metrics.hpp>
#include <emm/synth.hpp>

using Catch::Approx;

namespace {

constexpr double tau_const = 6.283185307179586476925286766559;

// Periodogram power at frequency index k via Goertzel recursion: an FFT-free
// oracle for the spectral slope checks.
double goertzel_power(const std::vector<double>& x, std::size_t k) {
    const double w = tau_const * static_cast<double>(k) / static_cast<double>(x.size());
    const double c = 2.0 * std::cos(w);
    double s0 = 0, s1 = 0, s2 = 0;
    for (double v : x) {
        s0 = v + c * s1 - s2;
        s2 = s1;
        s1 = s0;
    }
    return s1 * s1 + s2 * s2 - c * s1 * s2;
}

// Least-squares slope of log power vs log frequency over a mid-band of the
// periodogram.
double spectral_slope(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> lx, ly;
    for (std::size_t k = 4; k < n / 4; k += 3) {
        const double p = goertzel_power(x, k);
        if (p <= 0) continue;
        lx.push_back(std::log(static_cast<double>(k) / static_cast<double>(n)));
        ly.push_back(std::log(p));
    }
    const double mx = emm::mean(lx);
    const double my = emm::mean(ly);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("default Rossler run yields 3000 samples from t=200.1 to 500") {
    const auto r = emm::integrate_rossler({});
    REQUIRE(r.x.size() == 3000);
    CHECK(r.x.t0 == Approx(200.1));
    CHECK(r.x.time(2999) == Approx(500.0));
    double max_x = 0;
    for (double v : r.x.values) max_x = std::max(max_x, std::abs(v));
    CHECK(max_x < 15.0);
}

TEST_CASE("a=b=0 with z0=0 reduces to a harmonic oscillator") {
    emm::RosslerParams p;
    p.a = 0.0;
    p.b = 0.0;
    p.c = 1000.0;
    p.z0 = 0.0;
    p.t_discard = 0.0;
    const auto r = emm::integrate_rossler(p);
    const double e0 = r.x.values[0] * r.x.values[0] + r.y.values[0] * r.y.values[0];
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        CHECK(r.z.values[i] == 0.0);
        const double e = r.x.values[i] * r.x.values[i] + r.y.values[i] * r.y.values[i];
        CHECK(std::abs(e - e0) < 1e-6);
    }
}

TEST_CASE("halving the integration step barely changes the trajectory") {
    emm::RosslerParams coarse;
    coarse.t_discard = 0.0;
    coarse.t_end = 50.0;
    emm::RosslerParams fine = coarse;
    fine.dt_int = 0.005;
    const auto a = emm::integrate_rossler(coarse);
    const auto b = emm::integrate_rossler(fine);
    REQUIRE(a.x.size() == b.x.size());
    double ss = 0, signal = 0;
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        const double d = a.x.values[i] - b.x.values[i];
        ss += d * d;
        signal += a.x.values[i] * a.x.values[i];
    }
    CHECK(std::sqrt(ss / signal) < 1e-5);  // RMS relative to the trajectory scale
}

TEST_CASE("integrator input validation and divergence") {
    emm::RosslerParams bad;
    bad.dt_sample = 0.025;  // not an integer multiple of 0.01
    CHECK_THROWS_AS(emm::integrate_rossler(bad), emm::DataError);

    emm::RosslerParams diverge;
    diverge.c = -50.0;  // z grows without bound
    diverge.z0 = 10.0;
    diverge.t_discard = 0.0;
    CHECK_THROWS_AS(emm::integrate_rossler(diverge), emm::NumericError);
}

TEST_CASE("colored noise is deterministic, normalized, and has the right slope") {
    const auto a = emm::colored_noise(8192, 1.0, 123);
    const auto b = emm::colored_noise(8192, 1.0, 123);
    CHECK(a.values == b.values);

    double m = 0;
    for (double v : a.values) m += v;
    m /= static_cast<double>(a.size());
    CHECK(std::abs(m) < 1e-12);
    CHECK(std::abs(emm::sample_variance(a.values) - 1.0) < 1e-9);

    const double pink_slope = spectral_slope(a.values);
    CHECK(pink_slope > -1.3);
    CHECK(pink_slope < -0.7);

    const auto brown = emm::colored_noise(8192, 2.0, 321);
    const double brown_slope = spectral_slope(brown.values);
    CHECK(brown_slope > -2.3);
    CHECK(brown_slope < -1.7);
}

TEST_CASE("multispectral noise is linear in amplitude") {
    emm::NoiseSpec one{1.0, 0.5, 1.0, 3000, 9};
    emm::NoiseSpec two{2.0, 0.5, 1.0, 3000, 9};
    const auto n1 = emm::multispectral_noise(one);
    const auto n2 = emm::multispectral_noise(two);
    for (std::size_t i = 0; i < n1.size(); ++i) CHECK(n2.values[i] == 2.0 * n1.values[i]);

    emm::NoiseSpec zero{0.0, 0.5, 1.0, 3000, 9};
    for (double v : emm::multispectral_noise(zero).values) CHECK(v == 0.0);
}

TEST_CASE("multispectral variance tracks A^2 (B^2 + C^2)") {
    const double expected = 1.25;  // B=0.5, C=1, unit-variance components
    double acc = 0;
    const int n_seeds = 100;
    for (int s = 0; s < n_seeds; ++s) {
        emm::NoiseSpec spec{1.0, 0.5, 1.0, 3000, static_cast<std::uint64_t>(s)};
        acc += emm::sample_variance(emm::multispectral_noise(spec).values);
    }
    const double mean_var = acc / n_seeds;
    CHECK(mean_var > 0.8 * expected);
    CHECK(mean_var < 1.2 * expected);
}

TEST_CASE("snr_db basics") {
    emm::TimeSeries s, n;
    s.values = {1, 2, 3, 4, 5};
    n.values = {5, 4, 3, 2, 1};  // same variance
    CHECK(emm::snr_db(s, n) == Approx(0.0).margin(1e-12));
    n.values = {1, 1, 1, 1, 1};
    CHECK_THROWS_AS(emm::snr_db(s, n), emm::MetricError);
}

TEST_CASE("noisy Rossler SNR tracks the calibrated anchors") {
    // mean over seeds within +-1 dB of 10.08 (A=1) and 1.07 (A=8)
    for (const auto& [amp, expected] : {std::pair{1.0, 10.08}, std::pair{8.0, 1.07}}) {
        double acc = 0;
        const int n_seeds = 40;
        for (int s = 0; s < n_seeds; ++s)
            acc += emm::make_noisy_rossler({}, {amp, 0.5, 1.0, 0, 0}, 100 + s).snr_x;
        CHECK(std::abs(acc / n_seeds - expected) < 1.0);
    }
}

TEST_CASE("make_noisy_rossler structure") {
    SECTION("A=0 leaves data clean") {
        const auto d = emm::make_noisy_rossler({}, {0.0, 0.5, 1.0, 0, 0}, 5);
        CHECK(d.noisy.x.values == d.clean.x.values);
        CHECK(d.noisy.z.values == d.clean.z.values);
        CHECK(emm::is_missing(d.snr_x));
    }

    SECTION("per-variable noise streams are independent") {
        // Brown-dominated noise has few effective degrees of freedom, so any
        // one realization shows large spurious correlation; independence is
        // asserted on the seed-averaged correlation instead.
        double acc_xy = 0, acc_xz = 0, acc_yz = 0;
        const int n_seeds = 100;
        for (int s = 0; s < n_seeds; ++s) {
            const auto d = emm::make_noisy_rossler({}, {8.0, 0.5, 1.0, 0, 0},
                                                   static_cast<std::uint64_t>(1000 + s));
            const std::size_t n = d.clean.x.size();
            std::vector<double> nx(n), ny(n), nz(n);
            for (std::size_t i = 0; i < n; ++i) {
                nx[i] = d.noisy.x.values[i] - d.clean.x.values[i];
                ny[i] = d.noisy.y.values[i] - d.clean.y.values[i];
                nz[i] = d.noisy.z.values[i] - d.clean.z.values[i];
            }
            acc_xy += emm::pearson_rho(nx, ny);
            acc_xz += emm::pearson_rho(nx, nz);
            acc_yz += emm::pearson_rho(ny, nz);
        }
        CHECK(std::abs(acc_xy / n_seeds) < 0.1);
        CHECK(std::abs(acc_xz / n_seeds) < 0.1);
        CHECK(std::abs(acc_yz / n_seeds) < 0.1);
    }

    SECTION("A=16 at least doubles the variance of x") {
        const auto d = emm::make_noisy_rossler({}, {16.0, 0.5, 1.0, 0, 0}, 5);
        CHECK(emm::sample_variance(d.noisy.x.values) >=
              2.0 * emm::sample_variance(d.clean.x.values));
    }

    SECTION("noise_on_z=false keeps z clean") {
        const auto d = emm::make_noisy_rossler({}, {8.0, 0.5, 1.0, 0, 0}, 5, false);
        CHECK(d.noisy.z.values == d.clean.z.values);
        CHECK(emm::is_missing(d.snr_z));
        CHECK_FALSE(emm::is_missing(d.snr_x));
    }
}
