#pragma once

// Multiview column selection with out-of-sample ranking: every D-sized
// combination of candidate columns is scored by simplex forecast skill on a
// disjoint library/prediction split, and combinations are ranked by rho
// (rmse, then lexicographic order, break ties).  When the combination count
// exceeds the cap, a seeded uniform subsample is evaluated instead.

#include <algorithm>
#include <set>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "simplex.hpp"

namespace emm {

struct MultiviewSpec {
    std::size_t d = 1;           // combination size
    SplitSpec split;             // library and prediction must be disjoint
    long tp = 0;
    std::size_t knn = 0;         // 0 = auto: d + 1
    std::size_t max_combos = 5000;
    std::uint64_t seed = 0;      // used only when subsampling kicks in
    std::size_t top_k = 0;       // 0 = keep all evaluated
    unsigned jobs = 1;
};

struct ComboScore {
    std::vector<std::size_t> columns;  // 1-based candidate column indices
    double rho = missing;
    double rmse = missing;
    std::size_t n_valid = 0;
};

struct MultiviewResult {
    std::vector<ComboScore> ranked;
    std::size_t evaluated = 0;
};

namespace detail {

// C(n, d) capped at `cap` to avoid overflow.
inline std::size_t combination_count_capped(std::size_t n, std::size_t d, std::size_t cap) {
    if (d > n) return 0;
    d = std::min(d, n - d);
    std::size_t c = 1;
    for (std::size_t i = 1; i <= d; ++i) {
        // c * (n - d + i) / i, watching the cap before it overflows
        if (c > cap * i / (n - d + i) + 1) return cap + 1;
        c = c * (n - d + i) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t d = idx.size();
    for (std::size_t i = d; i-- > 0;) {
        if (idx[i] < n - d + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

inline bool combo_score_before(const ComboScore& a, const ComboScore& b) {
    const bool a_def = !is_missing(a.rho);
    const bool b_def = !is_missing(b.rho);
    if (a_def != b_def) return a_def;
    if (a_def && a.rho != b.rho) return a.rho > b.rho;
    const bool ar = !is_missing(a.rmse);
    const bool br = !is_missing(b.rmse);
    if (ar != br) return ar;
    if (ar && a.rmse != b.rmse) return a.rmse < b.rmse;
    return a.columns < b.columns;
}

inline MultiviewResult multiview_select(const StateSpace& candidates, const TimeSeries& target,
                                        const MultiviewSpec& spec) {
    const std::size_t n = candidates.dim();
    if (spec.d < 1 || spec.d > n)
        throw DataError("multiview: D=" + std::to_string(spec.d) + " out of range 1.." +
                        std::to_string(n));
    if (spec.split.overlaps())
        throw DataError("multiview: library and prediction ranges must be disjoint");

    // Enumerate, or subsample without replacement when the space is too big.
    // max_combos = 0 disables the cap.
    std::vector<std::vector<std::size_t>> combos;
    const std::size_t cap = spec.max_combos;
    const std::size_t total = cap == 0 ? 0 : detail::combination_count_capped(n, spec.d, cap);
    if (cap == 0 || total <= cap) {
        std::vector<std::size_t> idx(spec.d);
        for (std::size_t i = 0; i < spec.d; ++i) idx[i] = i;
        combos.push_back(idx);
        while (detail::next_combination(idx, n)) combos.push_back(idx);
    } else {
        GaussianStream rng(split_seed(spec.seed, 0x6D76ULL));  // uniform draws only
        std::set<std::vector<std::size_t>> seen;
        while (seen.size() < spec.max_combos) {
            std::vector<std::size_t> idx;
            idx.reserve(spec.d);
            std::set<std::size_t> member;
            // Floyd's sampling: d distinct values in [0, n)
            for (std::size_t j = n - spec.d; j < n; ++j) {
                const std::size_t t = static_cast<std::size_t>(rng.bounded(j + 1));
                member.insert(member.count(t) ? j : t);
            }
            idx.assign(member.begin(), member.end());
            seen.insert(std::move(idx));
        }
        combos.assign(seen.begin(), seen.end());
    }

    std::vector<ComboScore> scores(combos.size());
    parallel_for(combos.size(), spec.jobs, [&](std::size_t i) {
        const auto& combo = combos[i];
        ComboScore score;
        score.columns.reserve(combo.size());
        for (std::size_t c : combo) score.columns.push_back(c + 1);
        try {
            SimplexSpec s;
            s.knn = spec.knn > 0 ? spec.knn : spec.d + 1;
            s.tp = spec.tp;
            s.exclusion_radius = 0;
            const auto r = simplex(candidates.select(combo), target, spec.split, s);
            score.rho = r.rho;
            score.rmse = r.rmse;
            score.n_valid = r.n_valid;
        } catch (const MetricError&) {
            // undefined skill ranks last
        }
        scores[i] = std::move(score);
    });

    MultiviewResult result;
    result.evaluated = scores.size();
    std::sort(scores.begin(), scores.end(), combo_score_before);
    if (spec.top_k > 0 && scores.size() > spec.top_k) scores.resize(spec.top_k);
    result.ranked = std::move(scores);
    return result;
}

struct DScanPoint {
    std::size_t d = 0;
    ComboScore best;
    std::size_t evaluated = 0;
};

inline std::vector<DScanPoint> scan_subset_size(const StateSpace& candidates,
                                                const TimeSeries& target,
                                                const MultiviewSpec& base,
                                                const std::vector<std::size_t>& d_values) {
    std::vector<DScanPoint> table;
    table.reserve(d_values.size());
    for (std::size_t d : d_values) {
        MultiviewSpec spec = base;
        spec.d = d;
        spec.knn = 0;  // track D + 1
        const auto r = multiview_select(candidates, target, spec);
        DScanPoint point;
        point.d = d;
        point.evaluated = r.evaluated;
        if (!r.ranked.empty()) point.best = r.ranked.front();
        table.push_back(std::move(point));
    }
    return table;
}

}  // namespace emm
