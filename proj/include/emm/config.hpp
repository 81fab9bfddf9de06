#pragma once

// Flat key = value experiment configs.  '#' starts a comment; lists are
// comma-separated; model fields use dotted keys (model.<name>.<field>).
// See the README for the full schema.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "pipeline.hpp"

namespace emm {

using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = detail::trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
        out[key] = value;
    }
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& f : split_fields(s))
        if (!f.empty()) out.push_back(f);
    return out;
}

inline double to_double(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw UsageError("config key '" + key + "': bad number '" + s + "'");
    return v;
}

inline long to_long(const std::string& s, const std::string& key) {
    const double v = to_double(s, key);
    return static_cast<long>(v);
}

}  // namespace detail

class Config {
public:
    explicit Config(ConfigMap map) : map_(std::move(map)) {}

    bool has(const std::string& key) const { return map_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback = "") const {
        const auto it = map_.find(key);
        return it == map_.end() ? fallback : it->second;
    }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? detail::to_double(map_.at(key), key) : fallback;
    }
    long get_long(const std::string& key, long fallback) const {
        return has(key) ? detail::to_long(map_.at(key), key) : fallback;
    }
    std::vector<double> get_doubles(const std::string& key) const {
        std::vector<double> out;
        for (const auto& f : detail::split_list(get(key)))
            out.push_back(detail::to_double(f, key));
        return out;
    }
    std::vector<long> get_longs(const std::string& key) const {
        std::vector<long> out;
        for (const auto& f : detail::split_list(get(key)))
            out.push_back(detail::to_long(f, key));
        return out;
    }
    std::vector<std::string> get_list(const std::string& key) const {
        return detail::split_list(get(key));
    }
    const ConfigMap& raw() const { return map_; }

private:
    ConfigMap map_;
};

inline ModelSpec model_from_config(const Config& cfg, const std::string& name) {
    const std::string prefix = "model." + name + ".";
    ModelSpec m;
    m.name = name;
    if (!cfg.has(prefix + "kind")) throw UsageError("missing '" + prefix + "kind'");
    m.kind = parse_model_kind(cfg.get(prefix + "kind"));
    m.columns = cfg.get_list(prefix + "columns");
    m.target = cfg.get(prefix + "target");
    m.embed_dim = static_cast<std::size_t>(cfg.get_long(prefix + "E", 3));
    m.embed_tau = static_cast<std::size_t>(cfg.get_long(prefix + "tau", 1));
    for (long k : cfg.get_longs(prefix + "imfs")) m.imf_indices.push_back(static_cast<std::size_t>(k));
    m.if_threshold = cfg.get_double(prefix + "if-threshold", missing);
    m.multiview_d = static_cast<std::size_t>(cfg.get_long(prefix + "multiview-D", 0));
    const std::string method = cfg.get(prefix + "method", "simplex");
    if (method == "smap") {
        m.method = ForecastMethod::smap;
    } else if (method != "simplex") {
        throw UsageError(prefix + "method must be simplex or smap");
    }
    m.theta = cfg.get_double(prefix + "theta", 0.0);
    m.knn = static_cast<std::size_t>(cfg.get_long(prefix + "knn", 0));
    m.exclusion_radius = cfg.get_long(prefix + "exclusion", -1);
    m.validate();
    return m;
}

inline ExperimentSpec experiment_from_config(const Config& cfg) {
    ExperimentSpec spec;
    spec.protocol = cfg.get("protocol", "ensemble");
    if (spec.protocol != "ensemble" && spec.protocol != "moving-window" &&
        spec.protocol != "progressive")
        throw UsageError("protocol must be ensemble, moving-window or progressive");

    const std::string generator = cfg.get("generator");
    spec.input_path = cfg.get("input");
    if (!generator.empty() && generator != "rossler")
        throw UsageError("unknown generator '" + generator + "'");
    spec.use_generator = !generator.empty();
    if (!spec.use_generator && spec.input_path.empty())
        throw UsageError("config needs either 'generator = rossler' or 'input = file.csv'");

    spec.rossler.a = cfg.get_double("rossler.a", spec.rossler.a);
    spec.rossler.b = cfg.get_double("rossler.b", spec.rossler.b);
    spec.rossler.c = cfg.get_double("rossler.c", spec.rossler.c);
    spec.rossler.dt_int = cfg.get_double("rossler.dt-int", spec.rossler.dt_int);
    spec.rossler.dt_sample = cfg.get_double("rossler.dt-sample", spec.rossler.dt_sample);
    spec.rossler.t_discard = cfg.get_double("rossler.t-discard", spec.rossler.t_discard);
    spec.rossler.t_end = cfg.get_double("rossler.t-end", spec.rossler.t_end);
    spec.noise.pink_weight = cfg.get_double("noise.B", spec.noise.pink_weight);
    spec.noise.brown_weight = cfg.get_double("noise.C", spec.noise.brown_weight);
    spec.noise_on_z = cfg.get_long("noise.on-z", 1) != 0;

    if (cfg.has("amplitudes")) spec.amplitudes = cfg.get_doubles("amplitudes");
    spec.realizations = static_cast<std::size_t>(cfg.get_long("realizations", 1));
    spec.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 0));
    if (cfg.has("tp")) spec.tp_list = cfg.get_longs("tp");

    const auto lib = cfg.get_longs("lib");
    const auto pred = cfg.get_longs("pred");
    if (lib.size() == 2) {
        spec.split.lib_start = lib[0];
        spec.split.lib_end = lib[1];
    }
    if (pred.size() == 2) {
        spec.split.pred_start = pred[0];
        spec.split.pred_end = pred[1];
    }

    spec.outdir = cfg.get("outdir");
    spec.jobs = static_cast<unsigned>(cfg.get_long("jobs", 1));
    spec.strict_imfs = cfg.get_long("strict-imfs", 0) != 0;
    spec.lib_end_start = cfg.get_long("lib-end-start", spec.lib_end_start);
    spec.window_step = cfg.get_long("step", spec.window_step);
    spec.lib_end0 = cfg.get_long("lib-end0", spec.lib_end0);
    spec.horizon_days = cfg.get_long("horizon-days", spec.horizon_days);

    for (const auto& name : cfg.get_list("models")) spec.models.push_back(model_from_config(cfg, name));
    if (spec.models.empty()) throw UsageError("config lists no models");
    return spec;
}

}  // namespace emm
