#pragma once

// Orchestration: state-space model construction for the four model kinds,
// seeded ensemble comparisons, the moving-window and progressive daily
// retrain forecast protocols, and the SNR gate.

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "core.hpp"
#include "embed.hpp"
#include "emd.hpp"
#include "hilbert.hpp"
#include "metrics.hpp"
#include "multiview.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "simplex.hpp"
#include "smap.hpp"
#include "synth.hpp"

namespace emm {

enum class ModelKind { multivariable, takens, emm_all_imf, emm_selected_imf };
enum class ForecastMethod { simplex, smap };

inline ModelKind parse_model_kind(const std::string& s) {
    if (s == "multivariable") return ModelKind::multivariable;
    if (s == "takens") return ModelKind::takens;
    if (s == "emm-all-imf") return ModelKind::emm_all_imf;
    if (s == "emm-selected-imf") return ModelKind::emm_selected_imf;
    throw UsageError("unknown model kind '" + s + "'");
}

inline std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::multivariable: return "multivariable";
        case ModelKind::takens: return "takens";
        case ModelKind::emm_all_imf: return "emm-all-imf";
        case ModelKind::emm_selected_imf: return "emm-selected-imf";
    }
    return "?";
}

struct ModelSpec {
    std::string name;
    ModelKind kind = ModelKind::multivariable;
    std::vector<std::string> columns;  // input series consumed by the model
    std::string target;                // target series name

    // takens
    std::size_t embed_dim = 3;
    std::size_t embed_tau = 1;

    // emm-selected-imf: exactly one of the three selection mechanisms
    std::vector<std::size_t> imf_indices;  // 1-based, applied per source
    double if_threshold = missing;
    std::size_t multiview_d = 0;

    ForecastMethod method = ForecastMethod::simplex;
    double theta = 0.0;
    std::size_t knn = 0;
    long exclusion_radius = -1;
    SiftParams sift_params;

    void validate() const {
        if (columns.empty()) throw UsageError("model '" + name + "': no input columns");
        if (target.empty()) throw UsageError("model '" + name + "': no target");
        if (kind == ModelKind::emm_selected_imf) {
            int mechanisms = !imf_indices.empty();
            mechanisms += !is_missing(if_threshold);
            mechanisms += multiview_d > 0;
            if (mechanisms != 1)
                throw UsageError("model '" + name +
                                 "': emm-selected-imf needs exactly one of imfs / "
                                 "if-threshold / multiview-D");
        }
    }
};

namespace detail {

inline const TimeSeries& find_series(const std::vector<TimeSeries>& pool, const std::string& name) {
    for (const auto& s : pool)
        if (s.name == name) return s;
    throw DataError("series '" + name + "' not found among inputs");
}

}  // namespace detail

// Pooled IMF columns of every model input (residuals excluded); the state
// dimension is the total IMF count.
inline StateSpace pooled_imf_space(const std::vector<TimeSeries>& inputs, const ModelSpec& model) {
    StateSpace space;
    bool first = true;
    for (const auto& name : model.columns) {
        const auto set = sift(detail::find_series(inputs, name), model.sift_params);
        if (set.count() == 0)
            throw NumericError("model '" + model.name + "': no IMFs extracted from '" + name + "'");
        std::vector<std::size_t> all(set.count());
        for (std::size_t k = 0; k < set.count(); ++k) all[k] = k + 1;
        const auto part = select_imfs(set, all);
        space = first ? part : StateSpace::concat(space, part);
        first = false;
    }
    return space;
}

// State-space for a model.  `split`, `tp` and `seed` only matter for
// multiview-selected models, whose ranking runs on the given split.
inline StateSpace build_state_space(const std::vector<TimeSeries>& inputs, const ModelSpec& model,
                                    const TimeSeries& target, const SplitSpec& split, long tp,
                                    std::uint64_t seed = 0, unsigned jobs = 1) {
    model.validate();
    switch (model.kind) {
        case ModelKind::multivariable: {
            std::vector<StateSpace::Column> cols;
            for (const auto& name : model.columns) {
                const auto& s = detail::find_series(inputs, name);
                cols.push_back({s.name, s.values});
            }
            return StateSpace::from_columns(std::move(cols));
        }
        case ModelKind::takens: {
            StateSpace space;
            bool first = true;
            for (const auto& name : model.columns) {
                const auto part =
                    delay_embed(detail::find_series(inputs, name), {model.embed_dim, model.embed_tau});
                space = first ? part : StateSpace::concat(space, part);
                first = false;
            }
            return space;
        }
        case ModelKind::emm_all_imf:
            return pooled_imf_space(inputs, model);
        case ModelKind::emm_selected_imf: {
            if (!model.imf_indices.empty()) {
                StateSpace space;
                bool first = true;
                for (const auto& name : model.columns) {
                    const auto set = sift(detail::find_series(inputs, name), model.sift_params);
                    const auto part = select_imfs(set, model.imf_indices);
                    space = first ? part : StateSpace::concat(space, part);
                    first = false;
                }
                return space;
            }
            const auto pool = pooled_imf_space(inputs, model);
            if (!is_missing(model.if_threshold)) {
                std::vector<std::size_t> keep;
                for (std::size_t j = 0; j < pool.dim(); ++j) {
                    TimeSeries col;
                    col.name = pool.columns[j].label;
                    col.dt = target.dt;
                    col.values = pool.columns[j].values;
                    const double var = interior_if_variance(instantaneous_frequency(col));
                    if (!is_missing(var) && var < model.if_threshold) keep.push_back(j);
                }
                if (keep.empty())
                    throw NumericError("model '" + model.name +
                                       "': IF-variance filter kept no IMF columns");
                return pool.select(keep);
            }
            MultiviewSpec mv;
            mv.d = model.multiview_d;
            mv.split = split;
            mv.tp = tp;
            mv.seed = seed;
            mv.jobs = jobs;
            const auto ranked = multiview_select(pool, target, mv);
            if (ranked.ranked.empty() || is_missing(ranked.ranked.front().rho))
                throw NumericError("model '" + model.name + "': multiview found no usable combo");
            std::vector<std::size_t> keep;
            for (std::size_t c : ranked.ranked.front().columns) keep.push_back(c - 1);
            return pool.select(keep);
        }
    }
    throw UsageError("unhandled model kind");
}

// One state-space forecast with the model's method.
inline ForecastResult emm_forecast(const std::vector<TimeSeries>& inputs, const TimeSeries& target,
                                   const ModelSpec& model, const SplitSpec& split, long tp,
                                   std::uint64_t seed = 0, unsigned jobs = 1) {
    const auto space = build_state_space(inputs, model, target, split, tp, seed, jobs);
    if (model.method == ForecastMethod::smap) {
        SMapSpec spec;
        spec.theta = model.theta;
        spec.tp = tp;
        spec.exclusion_radius = model.exclusion_radius;
        return smap(space, target, split, spec).forecast;
    }
    SimplexSpec spec;
    spec.knn = model.knn;
    spec.tp = tp;
    spec.exclusion_radius = model.exclusion_radius;
    return simplex(space, target, split, spec);
}

// ------------------------------------------------------------ experiments

struct ExperimentSpec {
    // Data source: the Rossler generator, or a CSV file.
    bool use_generator = true;
    RosslerParams rossler;
    NoiseSpec noise;  // amplitude overridden per entry of `amplitudes`
    bool noise_on_z = true;
    std::string input_path;

    std::vector<double> amplitudes{0.0};
    std::size_t realizations = 1;
    std::uint64_t seed = 0;
    std::vector<ModelSpec> models;
    SplitSpec split;
    std::vector<long> tp_list{0};
    std::string outdir;
    unsigned jobs = 1;
    bool strict_imfs = false;

    std::string protocol = "ensemble";  // ensemble | moving-window | progressive
    long lib_end_start = 5475;          // moving-window
    long window_step = 30;
    long lib_end0 = 5721;               // progressive
    long horizon_days = 121;
};

struct RealizationRecord {
    std::string model;
    double amplitude = 0.0;
    std::size_t realization = 0;
    double snr_db = missing;
    double rho = missing;
    double rmse = missing;
};

struct EnsembleStat {
    std::string model;
    double amplitude = 0.0;
    std::size_t n = 0;
    std::size_t failures = 0;
    double mean_rho = missing, se_rho = missing;
    double mean_rmse = missing, se_rmse = missing;
    double mean_snr_db = missing;
};

struct EnsembleResult {
    std::vector<RealizationRecord> records;  // one per (amplitude, realization, model)
    std::vector<EnsembleStat> stats;
    std::size_t attempts = 0;
    std::size_t failures = 0;
};

// Seed for one (amplitude, realization) cell; keyed on the amplitude bits so
// reordering or extending the amplitude list never shifts other streams.
inline std::uint64_t realization_seed(std::uint64_t master, double amplitude, std::size_t r) {
    std::uint64_t amp_bits;
    static_assert(sizeof(amp_bits) == sizeof(amplitude));
    std::memcpy(&amp_bits, &amplitude, sizeof(amp_bits));
    return split_seed(split_seed(master, amp_bits), r);
}

// Model-comparison ensemble over noise amplitudes and seeded realizations.
// Individual realization failures are recorded and skipped; more than 10%
// failures aborts.  Forecasts run at tp_list[0].
inline EnsembleResult run_ensemble(const ExperimentSpec& spec) {
    if (!spec.use_generator)
        throw UsageError("ensemble protocol needs the rossler generator as data source");
    if (spec.realizations < 1) throw UsageError("realizations must be >= 1");
    if (spec.models.empty()) throw UsageError("no models configured");
    for (const auto& m : spec.models) m.validate();
    const long tp = spec.tp_list.empty() ? 0 : spec.tp_list.front();

    struct Cell {
        std::vector<RealizationRecord> records;
        double snr = missing;
        bool failed = false;
        std::string what;
    };
    const std::size_t n_cells = spec.amplitudes.size() * spec.realizations;
    std::vector<Cell> cells(n_cells);

    parallel_for(n_cells, spec.jobs, [&](std::size_t idx) {
        const std::size_t ai = idx / spec.realizations;
        const std::size_t r = idx % spec.realizations;
        const double amplitude = spec.amplitudes[ai];
        Cell& cell = cells[idx];
        try {
            NoiseSpec noise = spec.noise;
            noise.amplitude = amplitude;
            const std::uint64_t rseed = realization_seed(spec.seed, amplitude, r);
            const auto data = make_noisy_rossler(spec.rossler, noise, rseed, spec.noise_on_z);
            const std::vector<TimeSeries> pool = {data.clean.x,  data.clean.y,  data.clean.z,
                                                  data.noisy.x,  data.noisy.y,  data.noisy.z};
            cell.snr = data.snr_x;
            for (const auto& model : spec.models) {
                const auto& target = detail::find_series(pool, model.target);
                const auto result = emm_forecast(pool, target, model, spec.split, tp,
                                                 split_seed(rseed, 0x4D56ULL));
                cell.records.push_back(
                    {model.name, amplitude, r, cell.snr, result.rho, result.rmse});
            }
        } catch (const Error& e) {
            cell.failed = true;
            cell.what = e.what();
        }
    });

    EnsembleResult out;
    out.attempts = n_cells;
    for (const auto& cell : cells) {
        if (cell.failed) ++out.failures;
        for (const auto& rec : cell.records) out.records.push_back(rec);
    }
    if (out.failures * 10 > out.attempts)
        throw NumericError("ensemble aborted: " + std::to_string(out.failures) + " of " +
                           std::to_string(out.attempts) + " realizations failed");

    // Aggregate in (model order, amplitude order).
    for (const auto& model : spec.models) {
        for (std::size_t ai = 0; ai < spec.amplitudes.size(); ++ai) {
            const double amplitude = spec.amplitudes[ai];
            std::vector<double> rhos, rmses, snrs;
            std::size_t failures = 0;
            for (std::size_t r = 0; r < spec.realizations; ++r) {
                const Cell& cell = cells[ai * spec.realizations + r];
                if (cell.failed) {
                    ++failures;
                    continue;
                }
                for (const auto& rec : cell.records) {
                    if (rec.model != model.name) continue;
                    if (!is_missing(rec.rho)) rhos.push_back(rec.rho);
                    if (!is_missing(rec.rmse)) rmses.push_back(rec.rmse);
                    if (!is_missing(rec.snr_db)) snrs.push_back(rec.snr_db);
                }
            }
            EnsembleStat stat;
            stat.model = model.name;
            stat.amplitude = amplitude;
            stat.n = rhos.size();
            stat.failures = failures;
            if (!rhos.empty()) stat.mean_rho = mean(rhos);
            if (!rmses.empty()) stat.mean_rmse = mean(rmses);
            if (!snrs.empty()) stat.mean_snr_db = mean(snrs);
            try {
                stat.se_rho = standard_error(rhos);
                stat.se_rmse = standard_error(rmses);
            } catch (const MetricError&) {
                // single realization: SE stays flagged undefined
            }
            out.stats.push_back(std::move(stat));
        }
    }
    return out;
}

// -------------------------------------------------------------- protocols

struct WindowRecord {
    std::size_t window = 0;  // 1-based window number
    long lib_end = 0;        // library end row (1-based)
    long tp = 0;
    long predicted_row = 0;  // 1-based row of the predicted value
    double prediction = missing;
    double observation = missing;
};

struct TpStat {
    long tp = 0;
    double mean_rmse = missing;
    std::size_t n_windows = 0;
    std::size_t n_valid = 0;
};

struct MovingWindowResult {
    std::vector<TpStat> summary;
    std::vector<WindowRecord> detail;
};

namespace detail {

// Split used when a protocol model needs multiview selection: ranking runs
// out-of-sample inside the initial library, first two thirds as library.
inline SplitSpec protocol_selection_split(long lib_end) {
    const long cut = std::max(2L, 2 * lib_end / 3);
    return SplitSpec{1, cut, cut + 1, lib_end};
}

// State-space for a protocol step.  In strict mode the decomposition sees
// only rows 1..lib_end and the space is padded back to full length; in the
// default mode `full` is reused (IMFs over the whole record).
inline StateSpace protocol_space(const std::vector<TimeSeries>& inputs, const ModelSpec& model,
                                 const TimeSeries& target, const SplitSpec& split, long tp,
                                 bool strict, long lib_end, const StateSpace& full,
                                 std::uint64_t seed) {
    const bool has_emd =
        model.kind == ModelKind::emm_all_imf || model.kind == ModelKind::emm_selected_imf;
    if (!strict || !has_emd) return full;
    std::vector<TimeSeries> truncated;
    truncated.reserve(inputs.size());
    for (const auto& s : inputs) truncated.push_back(head(s, static_cast<std::size_t>(lib_end)));
    const auto truncated_target = head(target, static_cast<std::size_t>(lib_end));
    const SplitSpec sel =
        model.multiview_d > 0 ? protocol_selection_split(lib_end) : split;
    auto space = build_state_space(truncated, model, truncated_target, sel, tp, seed);
    space.extend_rows(target.size());
    return space;
}

inline ForecastResult run_method(const StateSpace& space, const TimeSeries& target,
                                 const SplitSpec& split, const ModelSpec& model, long tp) {
    if (model.method == ForecastMethod::smap) {
        SMapSpec sp;
        sp.theta = model.theta;
        sp.tp = tp;
        sp.exclusion_radius = model.exclusion_radius;
        return smap(space, target, split, sp).forecast;
    }
    SimplexSpec sp;
    sp.knn = model.knn;
    sp.tp = tp;
    sp.exclusion_radius = model.exclusion_radius;
    return simplex(space, target, split, sp);
}

}  // namespace detail

// Moving-window protocol: the library [1..L] expands in `step`-sample
// increments from lib_end_start while a full step still fits in the record;
// at each window one forecast per horizon is made from origin row L, so the
// predicted rows are L+tp.  Neighbor candidates are capped at row L-tp so no
// neighbor's target lies beyond the library end.
inline MovingWindowResult moving_window_forecast(const std::vector<TimeSeries>& inputs,
                                                 const TimeSeries& target, const ModelSpec& model,
                                                 long lib_end_start, long step,
                                                 const std::vector<long>& tp_list,
                                                 bool strict_imfs = false, std::uint64_t seed = 0,
                                                 unsigned jobs = 1) {
    model.validate();
    const long n = static_cast<long>(target.size());
    if (lib_end_start < 2 || lib_end_start > n)
        throw DataError("moving-window: lib_end_start outside record");
    if (step < 1) throw DataError("moving-window: step must be >= 1");

    std::vector<long> lib_ends;
    for (long lib_end = lib_end_start; lib_end + step <= n; lib_end += step)
        lib_ends.push_back(lib_end);
    if (lib_ends.empty()) throw DataError("moving-window: record too short for one window");

    const SplitSpec build_split = detail::protocol_selection_split(lib_end_start);
    const auto full_space =
        build_state_space(inputs, model, target, build_split, tp_list.empty() ? 0 : tp_list.front(),
                          seed, jobs);

    struct WindowOut {
        std::vector<WindowRecord> records;
    };
    std::vector<WindowOut> outs(lib_ends.size());

    parallel_for(lib_ends.size(), jobs, [&](std::size_t w) {
        const long lib_end = lib_ends[w];
        for (long tp : tp_list) {
            WindowRecord rec;
            rec.window = w + 1;
            rec.lib_end = lib_end;
            rec.tp = tp;
            rec.predicted_row = lib_end + tp;
            try {
                if (tp < 0 || lib_end - tp < 1) throw DataError("horizon exceeds library");
                SplitSpec split{1, lib_end - tp, lib_end, lib_end};
                const auto space = detail::protocol_space(inputs, model, target, split, tp,
                                                          strict_imfs, lib_end, full_space, seed);
                const auto r = detail::run_method(space, target, split, model, tp);
                if (rec.predicted_row <= n) {
                    rec.prediction =
                        r.predictions.values[static_cast<std::size_t>(rec.predicted_row - 1)];
                    rec.observation =
                        target.values[static_cast<std::size_t>(rec.predicted_row - 1)];
                }
            } catch (const Error&) {
                // window skipped for this horizon; counted but unfilled
            }
            outs[w].records.push_back(std::move(rec));
        }
    });

    MovingWindowResult result;
    for (const auto& w : outs)
        result.detail.insert(result.detail.end(), w.records.begin(), w.records.end());

    for (long tp : tp_list) {
        TpStat stat;
        stat.tp = tp;
        std::vector<double> pred, obs;
        for (const auto& rec : result.detail) {
            if (rec.tp != tp) continue;
            ++stat.n_windows;
            pred.push_back(rec.prediction);
            obs.push_back(rec.observation);
        }
        try {
            stat.mean_rmse = rmse(pred, obs);
        } catch (const MetricError&) {
        }
        stat.n_valid = count_valid_pairs(pred, obs);
        result.summary.push_back(stat);
    }
    return result;
}

struct ProgressiveResult {
    std::vector<long> tp_list;
    std::vector<ForecastResult> per_tp;  // aligned series over the horizon
    std::vector<TpStat> summary;
    std::size_t n_sets = 0;  // daily forecast sets produced
};

// Progressive daily-retrain protocol: for day d in [0, horizon_days), the
// library is [1..lib_end0+d] and every horizon predicts the single day
// lib_end0+d+1 from origin row lib_end0+d+1-tp.
inline ProgressiveResult progressive_forecast(const std::vector<TimeSeries>& inputs,
                                              const TimeSeries& target, const ModelSpec& model,
                                              long lib_end0, long horizon_days,
                                              const std::vector<long>& tp_list,
                                              bool strict_imfs = false, std::uint64_t seed = 0,
                                              unsigned jobs = 1) {
    model.validate();
    const long n = static_cast<long>(target.size());
    if (lib_end0 < 2 || lib_end0 >= n) throw DataError("progressive: lib_end0 outside record");
    if (horizon_days < 1) throw DataError("progressive: horizon_days must be >= 1");

    const SplitSpec build_split = detail::protocol_selection_split(lib_end0);
    const auto full_space = build_state_space(inputs, model, target, build_split,
                                              tp_list.empty() ? 0 : tp_list.front(), seed, jobs);

    ProgressiveResult result;
    result.tp_list = tp_list;
    std::vector<TimeSeries> preds(tp_list.size());
    for (std::size_t k = 0; k < tp_list.size(); ++k) {
        preds[k].name = target.name + "_pred_tp" + std::to_string(tp_list[k]);
        preds[k].dt = target.dt;
        preds[k].t0 = target.t0;
        preds[k].values.assign(target.size(), missing);
    }

    struct DayOut {
        std::vector<double> by_tp;
    };
    std::vector<DayOut> days(static_cast<std::size_t>(horizon_days));

    parallel_for(days.size(), jobs, [&](std::size_t d) {
        const long lib_end = lib_end0 + static_cast<long>(d);
        const long predicted_row = lib_end + 1;
        days[d].by_tp.assign(tp_list.size(), missing);
        if (predicted_row > n) return;  // beyond the record; set still counts
        for (std::size_t k = 0; k < tp_list.size(); ++k) {
            const long tp = tp_list[k];
            const long origin = predicted_row - tp;
            if (tp < 0 || origin < 1 || lib_end - tp < 1) continue;
            try {
                SplitSpec split{1, lib_end - tp, origin, origin};
                const auto space = detail::protocol_space(inputs, model, target, split, tp,
                                                          strict_imfs, lib_end, full_space, seed);
                const auto r = detail::run_method(space, target, split, model, tp);
                days[d].by_tp[k] =
                    r.predictions.values[static_cast<std::size_t>(predicted_row - 1)];
            } catch (const Error&) {
                // this horizon unavailable for the day
            }
        }
    });

    result.n_sets = days.size();
    for (std::size_t d = 0; d < days.size(); ++d) {
        const long predicted_row = lib_end0 + static_cast<long>(d) + 1;
        if (predicted_row > n) continue;
        for (std::size_t k = 0; k < tp_list.size(); ++k)
            preds[k].values[static_cast<std::size_t>(predicted_row - 1)] = days[d].by_tp[k];
    }

    for (std::size_t k = 0; k < tp_list.size(); ++k) {
        TimeSeries obs;
        obs.name = target.name + "_obs";
        obs.dt = target.dt;
        obs.t0 = target.t0;
        obs.values.assign(target.size(), missing);
        for (std::size_t i = 0; i < target.size(); ++i)
            if (!is_missing(preds[k].values[i])) obs.values[i] = target.values[i];
        auto fr = make_forecast_result(preds[k], std::move(obs));
        TpStat stat;
        stat.tp = tp_list[k];
        stat.mean_rmse = fr.rmse;
        stat.n_windows = days.size();
        stat.n_valid = fr.n_valid;
        result.summary.push_back(stat);
        result.per_tp.push_back(std::move(fr));
    }
    return result;
}

// ---------------------------------------------------------------- snr gate

enum class GateRecommendation { emm, takens };

struct GateResult {
    double snr_db = missing;
    GateRecommendation recommendation = GateRecommendation::takens;
};

inline constexpr double snr_gate_threshold_db = 3.0;

// Explicit noise estimate: SNR at or below the 3 dB threshold recommends the
// IMF state-space.
inline GateResult snr_gate(const TimeSeries& signal, const TimeSeries& noise) {
    GateResult r;
    r.snr_db = snr_db(signal, noise);
    r.recommendation =
        r.snr_db <= snr_gate_threshold_db ? GateRecommendation::emm : GateRecommendation::takens;
    return r;
}

// No noise estimate: use IMF 1 of the observed series as the noise proxy and
// the remainder as the signal proxy.
inline GateResult snr_gate(const TimeSeries& observed, const SiftParams& params = {}) {
    const auto set = sift(observed, params);
    if (set.count() == 0) throw MetricError("snr_gate: no oscillatory content to estimate noise");
    TimeSeries rest;
    rest.name = observed.name + "_denoised";
    rest.dt = observed.dt;
    rest.values.resize(observed.size());
    for (std::size_t i = 0; i < observed.size(); ++i)
        rest.values[i] = observed.values[i] - set.imfs.front().values[i];
    return snr_gate(rest, set.imfs.front());
}

}  // namespace emm
