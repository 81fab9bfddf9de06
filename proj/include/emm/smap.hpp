#pragma once

// S-map: sequential locally weighted global linear maps.  For each
// prediction row a linear model is fit over all usable library rows with
// weights exp(-theta * d / dbar), where dbar is the mean distance from the
// prediction row to the library.  theta = 0 reduces to one global linear
// model.  The weighted system (rows scaled by w) is solved by SVD with
// singular values below 1e-8 * sigma_max truncated, so nearly collinear
// coordinates (IMF columns) degrade to a minimum-norm solution instead of
// blowing up.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "core.hpp"
#include "metrics.hpp"
#include "simplex.hpp"

namespace emm {

struct SMapSpec {
    double theta = 0.0;
    long tp = 0;
    long exclusion_radius = -1;  // <0 = auto, as in SimplexSpec
};

struct SmapResult {
    ForecastResult forecast;
    // One row per produced prediction: the 1-based state row it was made
    // from, followed by the fitted coefficients (intercept first, then one
    // per state-space column in caller order).
    std::vector<long> coefficient_rows;
    std::vector<std::vector<double>> coefficients;
    std::size_t rank_deficient_count = 0;
};

inline SmapResult smap(const StateSpace& space, const TimeSeries& target, const SplitSpec& split,
                       const SMapSpec& spec = {}) {
    const std::size_t n = space.rows();
    const std::size_t dim = space.dim();
    if (target.size() != n)
        throw DataError("smap: target length " + std::to_string(target.size()) +
                        " != state-space rows " + std::to_string(n));
    split.validate(n);
    if (spec.theta < 0.0) throw DataError("smap: negative theta");
    if (spec.tp < 0) throw DataError("smap: negative Tp");

    const long excl = detail::resolve_exclusion(split, spec.exclusion_radius);
    const auto order = detail::canonical_column_order(space);
    const auto lib = detail::library_candidates(space, target, split, spec.tp);
    if (lib.size() < dim + 2)
        throw NumericError("smap: library has " + std::to_string(lib.size()) +
                           " usable rows, need at least dim+2=" + std::to_string(dim + 2));

    SmapResult result;
    TimeSeries predictions;
    predictions.name = target.name + "_pred";
    predictions.dt = target.dt;
    predictions.t0 = target.t0;
    predictions.values.assign(n, missing);
    TimeSeries observations = predictions;
    observations.name = target.name + "_obs";

    // With no per-row exclusion the candidate set, and hence the fit, is the
    // same for every prediction row at theta = 0; solve once.
    const bool global_fit = spec.theta == 0.0 && excl == 0;
    bool have_global = false;
    Eigen::VectorXd global_coef;
    bool global_deficient = false;

    std::vector<double> dists(lib.size());

    for (long p = split.pred_start - 1; p <= split.pred_end - 1; ++p) {
        const auto pi = static_cast<std::size_t>(p);
        if (!space.valid[pi]) continue;
        const long out_row = p + spec.tp;
        if (out_row >= static_cast<long>(n)) continue;

        Eigen::VectorXd coef;
        bool deficient = false;
        if (global_fit && have_global) {
            coef = global_coef;
            deficient = global_deficient;
        } else {
            std::vector<std::size_t> rows;
            rows.reserve(lib.size());
            for (std::size_t l : lib) {
                if (excl > 0 && std::labs(static_cast<long>(l) - p) < excl) continue;
                rows.push_back(l);
            }
            if (rows.size() < dim + 2) continue;

            double dbar = 0.0;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                dists[k] = detail::state_distance(space, order, pi, rows[k]);
                dbar += dists[k];
            }
            dbar /= static_cast<double>(rows.size());

            Eigen::MatrixXd a(rows.size(), dim + 1);
            Eigen::VectorXd b(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const double w =
                    (spec.theta == 0.0 || dbar == 0.0) ? 1.0 : std::exp(-spec.theta * dists[k] / dbar);
                a(static_cast<long>(k), 0) = w;
                for (std::size_t j = 0; j < dim; ++j)
                    a(static_cast<long>(k), static_cast<long>(j) + 1) =
                        w * space.columns[order[j]].values[rows[k]];
                b(static_cast<long>(k)) =
                    w * target.values[rows[k] + static_cast<std::size_t>(spec.tp)];
            }

            Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
            svd.setThreshold(1e-8);
            coef = svd.solve(b);
            deficient = svd.rank() < static_cast<long>(dim + 1);
            if (global_fit) {
                global_coef = coef;
                global_deficient = deficient;
                have_global = true;
            }
        }

        double value = coef(0);
        for (std::size_t j = 0; j < dim; ++j)
            value += coef(static_cast<long>(j) + 1) * space.columns[order[j]].values[pi];

        const auto oi = static_cast<std::size_t>(out_row);
        predictions.values[oi] = value;
        observations.values[oi] = target.values[oi];
        if (deficient) ++result.rank_deficient_count;

        std::vector<double> row_coef(dim + 1);
        row_coef[0] = coef(0);
        for (std::size_t j = 0; j < dim; ++j)
            row_coef[1 + order[j]] = coef(static_cast<long>(j) + 1);
        result.coefficient_rows.push_back(p + 1);  // 1-based
        result.coefficients.push_back(std::move(row_coef));
    }

    result.forecast = make_forecast_result(std::move(predictions), std::move(observations));
    return result;
}

}  // namespace emm
