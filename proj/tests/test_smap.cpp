#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <emm/rng.hpp>
#include <emm/smap.hpp>

#include "test_support.hpp"

using Catch::Approx;

namespace {

emm::TimeSeries series_of(std::vector<double> v, const std::string& name = "z") {
    emm::TimeSeries ts;
    ts.name = name;
    ts.values = std::move(v);
    return ts;
}

emm::StateSpace random_space(emm::GaussianStream& g, std::size_t rows, std::size_t dims) {
    std::vector<emm::StateSpace::Column> cols;
    for (std::size_t j = 0; j < dims; ++j) {
        emm::StateSpace::Column c;
        c.label = "c" + std::to_string(j);
        c.values.resize(rows);
        for (auto& v : c.values) v = g.next();
        cols.push_back(std::move(c));
    }
    return emm::StateSpace::from_columns(std::move(cols));
}

// Ordinary least squares via normal equations with Gaussian elimination:
// the independent oracle for theta = 0.
std::vector<double> ols_fit(const emm::StateSpace& space, const std::vector<double>& target,
                            long lib_start, long lib_end, long tp) {
    const std::size_t dim = space.dim();
    const std::size_t m = dim + 1;
    std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
    std::vector<double> atb(m, 0.0);
    for (long l = lib_start - 1; l <= lib_end - 1; ++l) {
        std::vector<double> row(m);
        row[0] = 1.0;
        for (std::size_t j = 0; j < dim; ++j) row[j + 1] = space.columns[j].values[static_cast<std::size_t>(l)];
        const double y = target[static_cast<std::size_t>(l + tp)];
        for (std::size_t a = 0; a < m; ++a) {
            atb[a] += row[a] * y;
            for (std::size_t b = 0; b < m; ++b) ata[a][b] += row[a] * row[b];
        }
    }
    // Gaussian elimination with partial pivoting
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[pivot][col])) pivot = r;
        std::swap(ata[col], ata[pivot]);
        std::swap(atb[col], atb[pivot]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = ata[r][col] / ata[col][col];
            for (std::size_t c2 = col; c2 < m; ++c2) ata[r][c2] -= f * ata[col][c2];
            atb[r] -= f * atb[col];
        }
    }
    std::vector<double> coef(m);
    for (std::size_t i = 0; i < m; ++i) coef[i] = atb[i] / ata[i][i];
    return coef;
}

}  // namespace

TEST_CASE("smap with theta=0 recovers an affine target") {
    emm::GaussianStream g(3);
    const auto space = random_space(g, 120, 3);
    std::vector<double> target(120);
    for (std::size_t i = 0; i < 120; ++i)
        target[i] = 2.0 * space.columns[0].values[i] - 3.0 * space.columns[1].values[i] +
                    0.5 * space.columns[2].values[i] + 0.25;
    const auto r = emm::smap(space, series_of(target), {1, 80, 81, 120});
    CHECK(r.forecast.rho > 0.9999);
    CHECK(r.forecast.rmse < 1e-8);
}

TEST_CASE("smap theta=0 equals the OLS oracle") {
    emm::GaussianStream g(7);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t rows = 60 + static_cast<std::size_t>(g.bounded(140));
        const std::size_t dims = 1 + static_cast<std::size_t>(g.bounded(4));
        const long tp = static_cast<long>(g.bounded(2));
        const auto space = random_space(g, rows, dims);
        std::vector<double> target(rows);
        for (auto& v : target) v = g.next();

        const long lib_end = static_cast<long>(rows) - 20 - tp;
        emm::SplitSpec split{1, lib_end, lib_end + 1, static_cast<long>(rows) - tp};
        emm::SMapSpec spec;
        spec.tp = tp;
        const auto r = emm::smap(space, series_of(target), split, spec);

        const auto coef = ols_fit(space, target, 1, lib_end, tp);
        for (long p = split.pred_start - 1; p <= split.pred_end - 1; ++p) {
            double expected = coef[0];
            for (std::size_t j = 0; j < dims; ++j)
                expected += coef[j + 1] * space.columns[j].values[static_cast<std::size_t>(p)];
            const double got = r.forecast.predictions.values[static_cast<std::size_t>(p + tp)];
            REQUIRE_FALSE(emm::is_missing(got));
            CHECK(got == Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("smap theta=0 coefficients are global") {
    emm::GaussianStream g(11);
    const auto space = random_space(g, 100, 2);
    std::vector<double> target(100);
    for (auto& v : target) v = g.next();
    const auto r = emm::smap(space, series_of(target), {1, 70, 71, 100});
    REQUIRE(r.coefficients.size() > 1);
    for (std::size_t i = 1; i < r.coefficients.size(); ++i) CHECK(r.coefficients[i] == r.coefficients[0]);
}

TEST_CASE("logistic map gains skill from localization") {
    // x_{n+1} = 3.8 x_n (1 - x_n), embedded E=2
    std::vector<double> x(600);
    x[0] = 0.23;
    for (std::size_t i = 1; i < x.size(); ++i) x[i] = 3.8 * x[i - 1] * (1.0 - x[i - 1]);

    std::vector<emm::StateSpace::Column> cols;
    cols.push_back({"x(t-0)", x});
    std::vector<double> lag(x.size(), emm::missing);
    for (std::size_t i = 1; i < x.size(); ++i) lag[i] = x[i - 1];
    cols.push_back({"x(t-1)", lag});
    const auto space = emm::StateSpace::from_columns(std::move(cols));

    emm::SplitSpec split{1, 400, 401, 590};
    double rho0 = 0;
    double best = -2;
    for (double theta : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0}) {
        emm::SMapSpec spec;
        spec.theta = theta;
        spec.tp = 1;
        const auto r = emm::smap(space, series_of(x, "x"), split, spec);
        if (theta == 0.0) rho0 = r.forecast.rho;
        best = std::max(best, r.forecast.rho);
    }
    CHECK(best > rho0);
}

TEST_CASE("rank-deficient designs are flagged, not fatal") {
    emm::GaussianStream g(13);
    auto space = random_space(g, 80, 2);
    // third column duplicates the first: rank deficiency by construction
    auto dup = space.columns[0];
    dup.label = "c9";
    space.columns.push_back(dup);
    space.refresh_valid();

    std::vector<double> target(80);
    for (auto& v : target) v = g.next();
    const auto r = emm::smap(space, series_of(target), {1, 50, 51, 80});
    CHECK(r.rank_deficient_count > 0);
    for (long p = 50; p < 80; ++p)
        CHECK(std::isfinite(r.forecast.predictions.values[static_cast<std::size_t>(p)]));
}

TEST_CASE("column permutation leaves smap output bit-identical") {
    emm::GaussianStream g(19);
    const auto space = random_space(g, 90, 3);
    std::vector<double> target(90);
    for (auto& v : target) v = g.next();
    const auto ts = series_of(target);

    emm::StateSpace permuted;
    permuted.columns = {space.columns[1], space.columns[2], space.columns[0]};
    permuted.refresh_valid();

    emm::SplitSpec split{1, 60, 61, 90};
    emm::SMapSpec spec;
    spec.theta = 1.5;
    const auto a = emm::smap(space, ts, split, spec);
    const auto b = emm::smap(permuted, ts, split, spec);
    CHECK(test_support::bits_equal(a.forecast.predictions.values,
                                   b.forecast.predictions.values));
    // coefficients are reported in caller order, so they permute with input
    REQUIRE(a.coefficients.size() == b.coefficients.size());
    CHECK(a.coefficients[0][1] == b.coefficients[0][3]);  // caller col 0 == permuted col 2
}

TEST_CASE("smap requires dim+2 library rows") {
    emm::GaussianStream g(29);
    const auto space = random_space(g, 30, 4);
    std::vector<double> target(30);
    for (auto& v : target) v = g.next();
    CHECK_THROWS_AS(emm::smap(space, series_of(target), {1, 5, 6, 10}, {}), emm::NumericError);
}
