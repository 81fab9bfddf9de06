// emm: empirical mode modeling command line.
//
// Subcommands: gen, emd, simplex, smap, scan-e, scan-tp, scan-theta,
// multiview, forecast, experiment.  Every subcommand is a thin adapter over
// the library; no numerics live here.  Exit codes: 0 success, 1 usage error,
// 2 data error, 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <emm/emm.hpp>

namespace {

using json = nlohmann::json;

std::pair<long, long> parse_range(const std::string& s, const std::string& what) {
    const auto fields = emm::detail::split_fields(s);
    if (fields.size() != 2)
        throw emm::UsageError(what + " expects 'start,end', got '" + s + "'");
    try {
        return {std::stol(fields[0]), std::stol(fields[1])};
    } catch (const std::exception&) {
        throw emm::UsageError(what + " expects numbers, got '" + s + "'");
    }
}

emm::SplitSpec parse_split(const std::string& lib, const std::string& pred) {
    const auto l = parse_range(lib, "--lib");
    const auto p = parse_range(pred, "--pred");
    return emm::SplitSpec{l.first, l.second, p.first, p.second};
}

std::vector<long> parse_long_list(const std::string& s, const std::string& what) {
    std::vector<long> out;
    for (const auto& f : emm::detail::split_fields(s)) {
        if (f.empty()) continue;
        try {
            out.push_back(std::stol(f));
        } catch (const std::exception&) {
            throw emm::UsageError(what + ": bad number '" + f + "'");
        }
    }
    if (out.empty()) throw emm::UsageError(what + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& f : emm::detail::split_fields(s)) {
        if (f.empty()) continue;
        out.push_back(emm::detail::to_double(f, what));
    }
    if (out.empty()) throw emm::UsageError(what + ": empty list");
    return out;
}

// Range spec "lo,hi[,step]" inclusive.
std::vector<long> expand_range(const std::string& s, const std::string& what) {
    const auto fields = parse_long_list(s, what);
    if (fields.size() < 2 || fields.size() > 3)
        throw emm::UsageError(what + " expects 'lo,hi[,step]'");
    const long lo = fields[0], hi = fields[1];
    const long step = fields.size() == 3 ? fields[2] : 1;
    if (step < 1 || hi < lo) throw emm::UsageError(what + ": bad range");
    std::vector<long> out;
    for (long v = lo; v <= hi; v += step) out.push_back(v);
    return out;
}

std::uint64_t pick_seed(bool given, std::uint64_t value, std::string* recorded = nullptr) {
    if (given) return value;
    if (const char* env = std::getenv("EMM_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return v;
        throw emm::UsageError("EMM_SEED is not a number: '" + std::string(env) + "'");
    }
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::fprintf(stderr, "no --seed given; selected seed=%llu\n",
                 static_cast<unsigned long long>(s));
    if (recorded) *recorded = std::to_string(s);
    return s;
}

std::string iso_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// StateSpace from CSV columns: delay-embedded per column, or raw with
// --embedded.
emm::StateSpace space_from_columns(const std::vector<emm::TimeSeries>& pool,
                                   const std::vector<std::string>& columns, bool embedded,
                                   std::size_t e, std::size_t tau) {
    emm::StateSpace space;
    bool first = true;
    for (const auto& name : columns) {
        const emm::TimeSeries* found = nullptr;
        for (const auto& s : pool)
            if (s.name == name) found = &s;
        if (!found) throw emm::DataError("column '" + name + "' not in input");
        emm::StateSpace part;
        if (embedded) {
            part = emm::StateSpace::from_columns({{found->name, found->values}});
        } else {
            part = emm::delay_embed(*found, {e, tau});
        }
        space = first ? part : emm::StateSpace::concat(space, part);
        first = false;
    }
    return space;
}

void write_forecast_csv(const std::string& path, const emm::ForecastResult& fr) {
    emm::Table t;
    t.headers = {"row", "time", "observation", "prediction"};
    for (std::size_t i = 0; i < fr.predictions.size(); ++i) {
        if (emm::is_missing(fr.predictions.values[i]) && emm::is_missing(fr.observations.values[i]))
            continue;
        t.rows.push_back({std::to_string(i + 1), emm::csv_cell(fr.predictions.time(i)),
                          emm::csv_cell(fr.observations.values[i]),
                          emm::csv_cell(fr.predictions.values[i])});
    }
    emm::write_csv(path, t);
}

void print_metrics(const emm::ForecastResult& fr) {
    std::printf("rho=%s rmse=%s mae=%s n_valid=%zu\n", emm::csv_cell(fr.rho).c_str(),
                emm::csv_cell(fr.rmse).c_str(), emm::csv_cell(fr.mae).c_str(), fr.n_valid);
}

void write_scan_csv(const std::string& path, const std::string& param,
                    const std::vector<emm::ScanPoint>& table) {
    emm::Table t;
    t.headers = {param, "rho", "rmse", "n_valid"};
    for (const auto& p : table)
        t.rows.push_back({emm::csv_cell(p.param), emm::csv_cell(p.rho), emm::csv_cell(p.rmse),
                          std::to_string(p.n_valid)});
    emm::write_csv(path, t);
}

// --target for multiview: "file.csv", "file.csv:column", or a column of the
// input file.
emm::TimeSeries resolve_target(const std::string& spec, const std::vector<emm::TimeSeries>& pool) {
    const auto colon = spec.rfind(':');
    std::string path = spec, column;
    if (colon != std::string::npos && spec.find(".csv") != std::string::npos &&
        colon > spec.find(".csv")) {
        path = spec.substr(0, colon);
        column = spec.substr(colon + 1);
    }
    if (std::filesystem::exists(path) && path.size() > 4 &&
        path.substr(path.size() - 4) == ".csv") {
        auto series = column.empty() ? emm::read_csv(path) : emm::read_csv(path, {column});
        if (series.empty()) throw emm::DataError(path + ": no value columns");
        return series.front();
    }
    for (const auto& s : pool)
        if (s.name == spec) return s;
    throw emm::DataError("target '" + spec + "' is neither a CSV file nor an input column");
}

struct SiftFlags {
    long max_imfs = 16;
    long max_iterations = 100;
    double sd_threshold = 0.2;
    long boundary_pad = 2;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--max-imfs", max_imfs, "IMF count cap");
        cmd->add_option("--max-iterations", max_iterations, "per-IMF sifting cap");
        cmd->add_option("--sd-threshold", sd_threshold, "sifting stop threshold");
        cmd->add_option("--boundary-pad", boundary_pad, "extrema mirrored per end");
    }
    emm::SiftParams params() const {
        return {static_cast<std::size_t>(max_imfs), static_cast<std::size_t>(max_iterations),
                sd_threshold, static_cast<std::size_t>(boundary_pad)};
    }
};

// ------------------------------------------------------------- experiment

void write_manifest(const std::string& outdir, const std::string& command,
                    const std::string& config_text, std::uint64_t seed,
                    const std::string& started, const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_text)));
    m["config_hash"] = hash;
    m["seed"] = seed;
    m["version"] = std::string(emm::version);
    m["started"] = started;
    m["finished"] = iso_now();
    m["outputs"] = outputs;
    std::ofstream out(outdir + "/manifest.json", std::ios::binary);
    if (!out) throw emm::DataError("cannot write manifest in '" + outdir + "'");
    out << m.dump(2) << "\n";
}

int run_experiment(const std::string& config_path, unsigned jobs_override, bool seed_given,
                   std::uint64_t seed_value, const std::string& outdir_override,
                   const std::string& command_line) {
    const std::string text = emm::read_text_file(config_path);
    emm::Config cfg(emm::parse_config_text(text));
    emm::ExperimentSpec spec = emm::experiment_from_config(cfg);
    if (jobs_override > 0) spec.jobs = jobs_override;
    if (seed_given) spec.seed = seed_value;
    if (!seed_given && !cfg.has("seed")) spec.seed = pick_seed(false, 0);
    if (!outdir_override.empty()) spec.outdir = outdir_override;
    if (spec.outdir.empty()) throw emm::UsageError("config needs 'outdir' (or pass --outdir)");

    std::filesystem::create_directories(spec.outdir);
    const std::string started = iso_now();
    std::vector<std::string> outputs;

    // Data pool for the file-driven protocols.
    std::vector<emm::TimeSeries> pool;
    if (!spec.use_generator) {
        pool = emm::read_csv(spec.input_path);
    } else if (spec.protocol != "ensemble") {
        emm::NoiseSpec noise = spec.noise;
        noise.amplitude = spec.amplitudes.empty() ? 0.0 : spec.amplitudes.front();
        const auto data = emm::make_noisy_rossler(spec.rossler, noise,
                                                  emm::split_seed(spec.seed, 1), spec.noise_on_z);
        pool = {data.clean.x, data.clean.y, data.clean.z,
                data.noisy.x, data.noisy.y, data.noisy.z};
    }

    if (spec.protocol == "ensemble") {
        const auto result = emm::run_ensemble(spec);
        emm::Table records;
        records.headers = {"model", "amplitude", "realization", "snr_db", "rho", "rmse"};
        for (const auto& r : result.records)
            records.rows.push_back({r.model, emm::csv_cell(r.amplitude),
                                    std::to_string(r.realization), emm::csv_cell(r.snr_db),
                                    emm::csv_cell(r.rho), emm::csv_cell(r.rmse)});
        emm::write_csv(spec.outdir + "/results.csv", records);
        outputs.push_back("results.csv");

        emm::Table summary;
        summary.headers = {"model",     "amplitude", "realizations", "failures",
                           "mean_rho",  "se_rho",    "mean_rmse",    "se_rmse",
                           "mean_snr_db"};
        for (const auto& s : result.stats)
            summary.rows.push_back({s.model, emm::csv_cell(s.amplitude), std::to_string(s.n),
                                    std::to_string(s.failures), emm::csv_cell(s.mean_rho),
                                    emm::csv_cell(s.se_rho), emm::csv_cell(s.mean_rmse),
                                    emm::csv_cell(s.se_rmse), emm::csv_cell(s.mean_snr_db)});
        emm::write_csv(spec.outdir + "/summary.csv", summary);
        outputs.push_back("summary.csv");
        std::printf("ensemble: %zu attempts, %zu failures -> %s\n", result.attempts,
                    result.failures, spec.outdir.c_str());
    } else {
        if (spec.models.size() != 1)
            throw emm::UsageError("forecast protocols run one model; config lists " +
                                  std::to_string(spec.models.size()));
        const auto& model = spec.models.front();
        const emm::TimeSeries* target = nullptr;
        for (const auto& s : pool)
            if (s.name == model.target) target = &s;
        if (!target) throw emm::DataError("target '" + model.target + "' not in input pool");

        if (spec.protocol == "moving-window") {
            const auto result = emm::moving_window_forecast(
                pool, *target, model, spec.lib_end_start, spec.window_step, spec.tp_list,
                spec.strict_imfs, spec.seed, spec.jobs);
            emm::Table detail;
            detail.headers = {"window", "lib_end", "tp", "predicted_row", "prediction",
                              "observation"};
            for (const auto& r : result.detail)
                detail.rows.push_back({std::to_string(r.window), std::to_string(r.lib_end),
                                       std::to_string(r.tp), std::to_string(r.predicted_row),
                                       emm::csv_cell(r.prediction), emm::csv_cell(r.observation)});
            emm::write_csv(spec.outdir + "/windows.csv", detail);
            outputs.push_back("windows.csv");

            emm::Table summary;
            summary.headers = {"tp", "mean_rmse", "n_windows", "n_valid"};
            for (const auto& s : result.summary)
                summary.rows.push_back({std::to_string(s.tp), emm::csv_cell(s.mean_rmse),
                                        std::to_string(s.n_windows), std::to_string(s.n_valid)});
            emm::write_csv(spec.outdir + "/summary.csv", summary);
            outputs.push_back("summary.csv");
            std::printf("moving-window: %zu windows -> %s\n",
                        result.summary.empty() ? 0 : result.summary.front().n_windows,
                        spec.outdir.c_str());
        } else {
            const auto result = emm::progressive_forecast(pool, *target, model, spec.lib_end0,
                                                          spec.horizon_days, spec.tp_list,
                                                          spec.strict_imfs, spec.seed, spec.jobs);
            emm::Table forecasts;
            forecasts.headers = {"row", "time", "tp", "observation", "prediction"};
            for (std::size_t k = 0; k < result.per_tp.size(); ++k) {
                const auto& fr = result.per_tp[k];
                for (std::size_t i = 0; i < fr.predictions.size(); ++i) {
                    if (emm::is_missing(fr.predictions.values[i])) continue;
                    forecasts.rows.push_back({std::to_string(i + 1),
                                              emm::csv_cell(fr.predictions.time(i)),
                                              std::to_string(result.tp_list[k]),
                                              emm::csv_cell(fr.observations.values[i]),
                                              emm::csv_cell(fr.predictions.values[i])});
                }
            }
            emm::write_csv(spec.outdir + "/forecasts.csv", forecasts);
            outputs.push_back("forecasts.csv");

            emm::Table summary;
            summary.headers = {"tp", "rmse", "n_sets", "n_valid"};
            for (const auto& s : result.summary)
                summary.rows.push_back({std::to_string(s.tp), emm::csv_cell(s.mean_rmse),
                                        std::to_string(result.n_sets), std::to_string(s.n_valid)});
            emm::write_csv(spec.outdir + "/summary.csv", summary);
            outputs.push_back("summary.csv");
            std::printf("progressive: %zu daily sets -> %s\n", result.n_sets, spec.outdir.c_str());
        }
    }

    write_manifest(spec.outdir, command_line, text, spec.seed, started, outputs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"empirical mode modeling toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(emm::version));

    std::string command_line;
    for (int i = 0; i < argc; ++i) {
        if (i) command_line += ' ';
        command_line += argv[i];
    }

    // ---- gen --------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate synthetic data");
    auto* gen_rossler = gen->add_subcommand("rossler", "Rossler trajectories with multispectral noise");
    struct {
        double A = 0.0, B = 0.5, C = 1.0;
        std::uint64_t seed = 0;
        std::string out;
        bool no_noise_z = false;
        emm::RosslerParams p;
    } g;
    gen_rossler->add_option("--A", g.A, "noise amplitude");
    gen_rossler->add_option("--B", g.B, "pink weight");
    gen_rossler->add_option("--C", g.C, "brown weight");
    auto* g_seed = gen_rossler->add_option("--seed", g.seed, "master seed");
    gen_rossler->add_option("--out", g.out, "output CSV")->required();
    gen_rossler->add_flag("--no-noise-z", g.no_noise_z, "leave z noiseless");
    gen_rossler->add_option("--a", g.p.a, "system constant a");
    gen_rossler->add_option("--b", g.p.b, "system constant b");
    gen_rossler->add_option("--c", g.p.c, "system constant c");
    gen_rossler->add_option("--x0", g.p.x0);
    gen_rossler->add_option("--y0", g.p.y0);
    gen_rossler->add_option("--z0", g.p.z0);
    gen_rossler->add_option("--dt-int", g.p.dt_int, "integration step");
    gen_rossler->add_option("--dt-sample", g.p.dt_sample, "output sampling step");
    gen_rossler->add_option("--t-discard", g.p.t_discard, "transient cutoff");
    gen_rossler->add_option("--t-end", g.p.t_end, "final time");
    gen_rossler->callback([&] {
        const auto seed = pick_seed(g_seed->count() > 0, g.seed);
        const auto data =
            emm::make_noisy_rossler(g.p, {g.A, g.B, g.C, 0, 0}, seed, !g.no_noise_z);
        emm::write_series_csv(g.out,
                              {&data.clean.x, &data.clean.y, &data.clean.z, &data.noisy.x,
                               &data.noisy.y, &data.noisy.z},
                              true);
        std::printf("wrote %s (%zu rows)", g.out.c_str(), data.clean.x.size());
        if (g.A > 0.0)
            std::printf("  snr_db x=%.3f y=%.3f z=%s", data.snr_x, data.snr_y,
                        emm::csv_cell(data.snr_z).c_str());
        std::printf("\n");
    });

    // ---- emd --------------------------------------------------------
    auto* emd = app.add_subcommand("emd", "empirical mode decomposition");
    struct {
        std::string input, column, out;
        bool if_variance = false;
    } e;
    SiftFlags e_sift;
    emd->add_option("--input", e.input, "input CSV")->required();
    emd->add_option("--column", e.column, "column to decompose")->required();
    emd->add_option("--out", e.out, "output CSV (imf columns + residual)")->required();
    emd->add_flag("--if-variance", e.if_variance, "print interior IF variance per IMF");
    e_sift.add_to(emd);
    emd->callback([&] {
        const auto series = emm::read_csv_column(e.input, e.column);
        const auto set = emm::sift(series, e_sift.params());
        std::vector<const emm::TimeSeries*> cols;
        for (const auto& imf : set.imfs) cols.push_back(&imf);
        cols.push_back(&set.residual);
        emm::write_series_csv(e.out, cols, false);
        std::printf("wrote %s (%zu imfs + residual)\n", e.out.c_str(), set.count());
        if (e.if_variance) {
            for (std::size_t k = 0; k < set.count(); ++k) {
                const double var =
                    emm::interior_if_variance(emm::instantaneous_frequency(set.imfs[k]));
                std::printf("imf%zu if_variance=%s\n", k + 1, emm::csv_cell(var).c_str());
            }
        }
    });

    // ---- shared forecast flags --------------------------------------
    struct ForecastFlags {
        std::string input, target, lib, pred, out;
        std::vector<std::string> columns;
        long E = 1, tau = 1, tp = 0, knn = 0, exclusion = -1;
        bool embedded = false;
    };

    auto add_common = [](CLI::App* cmd, ForecastFlags& f, bool with_embed) {
        cmd->add_option("--input", f.input, "input CSV")->required();
        cmd->add_option("--columns", f.columns, "state-space source columns")
            ->required()
            ->delimiter(',');
        cmd->add_option("--target", f.target, "target column")->required();
        cmd->add_option("--lib", f.lib, "library rows 'start,end' (1-based)")->required();
        cmd->add_option("--pred", f.pred, "prediction rows 'start,end' (1-based)")->required();
        cmd->add_option("--Tp", f.tp, "prediction horizon in samples");
        cmd->add_option("--knn", f.knn, "neighbor count (default dim+1)");
        cmd->add_option("--exclusion", f.exclusion, "temporal exclusion radius");
        cmd->add_option("--out", f.out, "write forecast CSV here");
        if (with_embed) {
            cmd->add_option("--E", f.E, "embedding dimension per column");
            cmd->add_option("--tau", f.tau, "embedding delay");
            cmd->add_flag("--embedded", f.embedded,
                          "treat columns as an explicit state-space (no embedding)");
        }
    };

    // ---- simplex ----------------------------------------------------
    auto* sim = app.add_subcommand("simplex", "simplex projection forecast");
    ForecastFlags sf;
    add_common(sim, sf, true);
    sim->callback([&] {
        const auto pool = emm::read_csv(sf.input);
        const auto space = space_from_columns(pool, sf.columns, sf.embedded,
                                              static_cast<std::size_t>(sf.E),
                                              static_cast<std::size_t>(sf.tau));
        const auto target = resolve_target(sf.target, pool);
        emm::SimplexSpec spec;
        spec.knn = static_cast<std::size_t>(sf.knn);
        spec.tp = sf.tp;
        spec.exclusion_radius = sf.exclusion;
        const auto fr = emm::simplex(space, target, parse_split(sf.lib, sf.pred), spec);
        print_metrics(fr);
        if (!sf.out.empty()) write_forecast_csv(sf.out, fr);
    });

    // ---- smap -------------------------------------------------------
    auto* sm = app.add_subcommand("smap", "S-map locally weighted forecast");
    ForecastFlags mf;
    double theta = 0.0;
    std::string coef_out;
    add_common(sm, mf, true);
    sm->add_option("--theta", theta, "localization parameter");
    sm->add_option("--coef-out", coef_out, "write per-prediction coefficients CSV");
    sm->callback([&] {
        const auto pool = emm::read_csv(mf.input);
        const auto space = space_from_columns(pool, mf.columns, mf.embedded,
                                              static_cast<std::size_t>(mf.E),
                                              static_cast<std::size_t>(mf.tau));
        const auto target = resolve_target(mf.target, pool);
        emm::SMapSpec spec;
        spec.theta = theta;
        spec.tp = mf.tp;
        spec.exclusion_radius = mf.exclusion;
        const auto r = emm::smap(space, target, parse_split(mf.lib, mf.pred), spec);
        print_metrics(r.forecast);
        if (r.rank_deficient_count)
            std::fprintf(stderr, "note: %zu rank-deficient fits (minimum-norm solution used)\n",
                         r.rank_deficient_count);
        if (!mf.out.empty()) write_forecast_csv(mf.out, r.forecast);
        if (!coef_out.empty()) {
            emm::Table t;
            t.headers = {"row", "intercept"};
            for (const auto& col : space.columns) t.headers.push_back("c_" + col.label);
            for (std::size_t i = 0; i < r.coefficients.size(); ++i) {
                std::vector<std::string> row{std::to_string(r.coefficient_rows[i])};
                for (double c : r.coefficients[i]) row.push_back(emm::csv_cell(c));
                t.rows.push_back(std::move(row));
            }
            emm::write_csv(coef_out, t);
        }
    });

    // ---- scans ------------------------------------------------------
    auto* sce = app.add_subcommand("scan-e", "skill vs embedding dimension");
    struct {
        std::string input, column, target, lib, pred, range, out;
        long tau = 1, tp = 1;
    } se;
    sce->add_option("--input", se.input)->required();
    sce->add_option("--column", se.column, "series to embed")->required();
    sce->add_option("--target", se.target, "target column (default: the embedded column)");
    sce->add_option("--lib", se.lib)->required();
    sce->add_option("--pred", se.pred)->required();
    sce->add_option("--E-range", se.range, "'lo,hi[,step]'")->required();
    sce->add_option("--tau", se.tau);
    sce->add_option("--Tp", se.tp);
    sce->add_option("--out", se.out, "output CSV");
    sce->callback([&] {
        const auto pool = emm::read_csv(se.input);
        const auto series = resolve_target(se.column, pool);
        const auto target = resolve_target(se.target.empty() ? se.column : se.target, pool);
        std::vector<std::size_t> es;
        for (long v : expand_range(se.range, "--E-range")) es.push_back(static_cast<std::size_t>(v));
        const auto table = emm::scan_embedding(series, target, parse_split(se.lib, se.pred), es,
                                               static_cast<std::size_t>(se.tau), se.tp);
        for (const auto& p : table)
            std::printf("E=%g rho=%s rmse=%s\n", p.param, emm::csv_cell(p.rho).c_str(),
                        emm::csv_cell(p.rmse).c_str());
        if (!se.out.empty()) write_scan_csv(se.out, "E", table);
    });

    auto* sct = app.add_subcommand("scan-tp", "skill vs prediction horizon");
    struct {
        std::string input, column, target, lib, pred, range, out;
        long e = 3, tau = 1;
    } st;
    sct->add_option("--input", st.input)->required();
    sct->add_option("--column", st.column)->required();
    sct->add_option("--target", st.target);
    sct->add_option("--lib", st.lib)->required();
    sct->add_option("--pred", st.pred)->required();
    sct->add_option("--Tp-range", st.range, "'lo,hi[,step]'")->required();
    sct->add_option("--E", st.e);
    sct->add_option("--tau", st.tau);
    sct->add_option("--out", st.out);
    sct->callback([&] {
        const auto pool = emm::read_csv(st.input);
        const auto series = resolve_target(st.column, pool);
        const auto target = resolve_target(st.target.empty() ? st.column : st.target, pool);
        const auto table = emm::scan_horizon(series, target, parse_split(st.lib, st.pred),
                                             static_cast<std::size_t>(st.e),
                                             static_cast<std::size_t>(st.tau),
                                             expand_range(st.range, "--Tp-range"));
        for (const auto& p : table)
            std::printf("Tp=%g rho=%s rmse=%s\n", p.param, emm::csv_cell(p.rho).c_str(),
                        emm::csv_cell(p.rmse).c_str());
        if (!st.out.empty()) write_scan_csv(st.out, "tp", table);
    });

    auto* scth = app.add_subcommand("scan-theta", "S-map skill vs localization");
    struct {
        std::string input, column, target, lib, pred, thetas, out;
        long e = 3, tau = 1, tp = 1;
    } sth;
    scth->add_option("--input", sth.input)->required();
    scth->add_option("--column", sth.column)->required();
    scth->add_option("--target", sth.target);
    scth->add_option("--lib", sth.lib)->required();
    scth->add_option("--pred", sth.pred)->required();
    scth->add_option("--thetas", sth.thetas, "comma-separated theta values")->required();
    scth->add_option("--E", sth.e);
    scth->add_option("--tau", sth.tau);
    scth->add_option("--Tp", sth.tp);
    scth->add_option("--out", sth.out);
    scth->callback([&] {
        const auto pool = emm::read_csv(sth.input);
        const auto series = resolve_target(sth.column, pool);
        const auto target = resolve_target(sth.target.empty() ? sth.column : sth.target, pool);
        const auto table = emm::scan_theta(series, target, parse_split(sth.lib, sth.pred),
                                           static_cast<std::size_t>(sth.e),
                                           static_cast<std::size_t>(sth.tau), sth.tp,
                                           parse_double_list(sth.thetas, "--thetas"));
        for (const auto& p : table)
            std::printf("theta=%g rho=%s rmse=%s\n", p.param, emm::csv_cell(p.rho).c_str(),
                        emm::csv_cell(p.rmse).c_str());
        if (!sth.out.empty()) write_scan_csv(sth.out, "theta", table);
    });

    // ---- multiview --------------------------------------------------
    auto* mv = app.add_subcommand("multiview", "rank column subsets by out-of-sample skill");
    struct {
        std::string input, target, lib, pred, out;
        std::vector<std::string> columns;
        long d = 1, tp = 0, knn = 0, top = 10, max_combos = 5000, jobs = 1;
        std::uint64_t seed = 0;
    } m;
    mv->add_option("--input", m.input, "candidate columns CSV")->required();
    mv->add_option("--columns", m.columns, "candidate columns (default: all)")->delimiter(',');
    mv->add_option("--target", m.target, "target column, file.csv, or file.csv:column")->required();
    mv->add_option("--D", m.d, "subset size")->required();
    mv->add_option("--lib", m.lib)->required();
    mv->add_option("--pred", m.pred)->required();
    mv->add_option("--Tp", m.tp);
    mv->add_option("--knn", m.knn, "neighbor count (default D+1)");
    mv->add_option("--top", m.top, "ranked combos to keep");
    mv->add_option("--max-combos", m.max_combos, "subsample cap (0 = unlimited)");
    auto* mv_seed = mv->add_option("--seed", m.seed, "subsample seed");
    mv->add_option("--jobs", m.jobs, "parallel workers");
    mv->add_option("--out", m.out, "output CSV");
    mv->callback([&] {
        const auto pool = m.columns.empty() ? emm::read_csv(m.input) : emm::read_csv(m.input, m.columns);
        std::vector<emm::StateSpace::Column> cols;
        for (const auto& s : pool) cols.push_back({s.name, s.values});
        const auto candidates = emm::StateSpace::from_columns(std::move(cols));
        const auto target = resolve_target(m.target, pool);
        emm::MultiviewSpec spec;
        spec.d = static_cast<std::size_t>(m.d);
        spec.split = parse_split(m.lib, m.pred);
        spec.tp = m.tp;
        spec.knn = static_cast<std::size_t>(m.knn);
        spec.max_combos = static_cast<std::size_t>(m.max_combos);
        spec.seed = pick_seed(mv_seed->count() > 0, m.seed);
        spec.top_k = static_cast<std::size_t>(m.top);
        spec.jobs = static_cast<unsigned>(m.jobs);
        const auto result = emm::multiview_select(candidates, target, spec);
        std::printf("evaluated %zu combos\n", result.evaluated);
        emm::Table t;
        t.headers = {"rank", "columns", "labels", "rho", "rmse", "n_valid"};
        for (std::size_t i = 0; i < result.ranked.size(); ++i) {
            const auto& c = result.ranked[i];
            std::string idx, labels;
            for (std::size_t k = 0; k < c.columns.size(); ++k) {
                if (k) {
                    idx += ';';
                    labels += ';';
                }
                idx += std::to_string(c.columns[k]);
                labels += candidates.columns[c.columns[k] - 1].label;
            }
            if (i < 10)
                std::printf("#%zu cols=%s rho=%s rmse=%s\n", i + 1, idx.c_str(),
                            emm::csv_cell(c.rho).c_str(), emm::csv_cell(c.rmse).c_str());
            t.rows.push_back({std::to_string(i + 1), idx, labels, emm::csv_cell(c.rho),
                              emm::csv_cell(c.rmse), std::to_string(c.n_valid)});
        }
        if (!m.out.empty()) emm::write_csv(m.out, t);
    });

    // ---- forecast ---------------------------------------------------
    auto* fc = app.add_subcommand("forecast", "one state-space model forecast");
    struct {
        std::string input, kind = "multivariable", target, lib, pred, out, method = "simplex";
        std::vector<std::string> columns;
        std::string imfs;
        double if_threshold = emm::missing, theta = 0.0;
        long mv_d = 0, e = 3, tau = 1, tp = 0, knn = 0, exclusion = -1, jobs = 1;
        std::uint64_t seed = 0;
    } f;
    SiftFlags f_sift;
    fc->add_option("--input", f.input)->required();
    fc->add_option("--model", f.kind,
                   "multivariable | takens | emm-all-imf | emm-selected-imf");
    fc->add_option("--columns", f.columns)->required()->delimiter(',');
    fc->add_option("--target", f.target)->required();
    fc->add_option("--lib", f.lib)->required();
    fc->add_option("--pred", f.pred)->required();
    fc->add_option("--Tp", f.tp);
    fc->add_option("--E", f.e, "takens embedding dimension");
    fc->add_option("--tau", f.tau);
    fc->add_option("--imfs", f.imfs, "selected IMF indices, e.g. 5,6,7");
    fc->add_option("--if-threshold", f.if_threshold, "IF-variance selection threshold");
    fc->add_option("--multiview-D", f.mv_d, "multiview selection subset size");
    fc->add_option("--method", f.method, "simplex | smap");
    fc->add_option("--theta", f.theta);
    fc->add_option("--knn", f.knn);
    fc->add_option("--exclusion", f.exclusion);
    auto* fc_seed = fc->add_option("--seed", f.seed);
    fc->add_option("--jobs", f.jobs);
    fc->add_option("--out", f.out);
    f_sift.add_to(fc);
    fc->callback([&] {
        const auto pool = emm::read_csv(f.input);
        emm::ModelSpec model;
        model.name = "cli";
        model.kind = emm::parse_model_kind(f.kind);
        model.columns = f.columns;
        model.target = f.target;
        model.embed_dim = static_cast<std::size_t>(f.e);
        model.embed_tau = static_cast<std::size_t>(f.tau);
        if (!f.imfs.empty())
            for (long k : parse_long_list(f.imfs, "--imfs"))
                model.imf_indices.push_back(static_cast<std::size_t>(k));
        model.if_threshold = f.if_threshold;
        model.multiview_d = static_cast<std::size_t>(f.mv_d);
        model.method = f.method == "smap" ? emm::ForecastMethod::smap : emm::ForecastMethod::simplex;
        model.theta = f.theta;
        model.knn = static_cast<std::size_t>(f.knn);
        model.exclusion_radius = f.exclusion;
        model.sift_params = f_sift.params();
        const auto target = resolve_target(f.target, pool);
        const auto seed = model.multiview_d > 0 ? pick_seed(fc_seed->count() > 0, f.seed) : f.seed;
        const auto fr = emm::emm_forecast(pool, target, model, parse_split(f.lib, f.pred), f.tp,
                                          seed, static_cast<unsigned>(f.jobs));
        print_metrics(fr);
        if (!f.out.empty()) write_forecast_csv(f.out, fr);
    });

    // ---- experiment -------------------------------------------------
    auto* ex = app.add_subcommand("experiment", "config-driven experiment runs");
    auto* ex_run = ex->add_subcommand("run", "run an experiment config");
    struct {
        std::string config, outdir;
        long jobs = 0;
        std::uint64_t seed = 0;
    } x;
    ex_run->add_option("config", x.config, "experiment config file")->required();
    ex_run->add_option("--jobs", x.jobs, "parallel workers");
    auto* ex_seed = ex_run->add_option("--seed", x.seed, "override config seed");
    ex_run->add_option("--outdir", x.outdir, "override config outdir");
    ex_run->callback([&] {
        run_experiment(x.config, static_cast<unsigned>(x.jobs), ex_seed->count() > 0, x.seed,
                       x.outdir, command_line);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const emm::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    } catch (const emm::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const emm::MetricError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const emm::NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
