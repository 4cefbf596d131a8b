#include "ajk/run_config.hpp"

#include "ajk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace ajk {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("'" + (where.empty() ? key : where + "." + key) + "' has the wrong type");
    }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
    if (j.contains(key)) out = get<T>(j, key, where);
}

int read_int(const json& j, const char* key, const std::string& where, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw ConfigError("'" + where + "." + key + "' must be an integer");
    return j.at(key).get<int>();
}

Range read_range(const json& j, const char* key, const std::string& where, Range fallback) {
    if (!j.contains(key)) return fallback;
    const json& r = j.at(key);
    if (r.is_number()) return {r.get<double>(), r.get<double>()};
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
        throw ConfigError("'" + where + "." + key + "' must be [lo, hi] or a number");
    return {r[0].get<double>(), r[1].get<double>()};
}

Hyperparameters read_hyper(const json& j, const std::string& where) {
    check_keys(j, where, {"p", "lambda", "alpha", "beta"});
    Hyperparameters h;
    h.p = read_int(j, "p", where, h.p);
    read(j, "lambda", where, h.lambda);
    read(j, "alpha", where, h.alpha);
    read(j, "beta", where, h.beta);
    try {
        h.validate();
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return h;
}

json hyper_json(const Hyperparameters& h) {
    return json{{"p", h.p}, {"lambda", h.lambda}, {"alpha", h.alpha}, {"beta", h.beta}};
}

EstimatorKindName parse_kind(const std::string& s) {
    if (s == "insample") return EstimatorKindName::InSample;
    if (s == "pseudo_oos") return EstimatorKindName::PseudoOos;
    if (s == "block_jackknife") return EstimatorKindName::BlockJackknife;
    if (s == "artificial_jackknife") return EstimatorKindName::ArtificialJackknife;
    throw ConfigError("unknown estimator '" + s +
                      "' (expected insample, pseudo_oos, block_jackknife or artificial_jackknife)");
}

}  // namespace

std::string estimator_name(EstimatorKindName kind) {
    switch (kind) {
        case EstimatorKindName::InSample: return "insample";
        case EstimatorKindName::PseudoOos: return "pseudo_oos";
        case EstimatorKindName::BlockJackknife: return "block_jackknife";
        case EstimatorKindName::ArtificialJackknife: return "artificial_jackknife";
    }
    return "unknown";
}

RunConfig run_config_from_json(const json& j) {
    check_keys(j, "", {"data", "tune_periods", "estimator", "region", "candidates", "t0", "stride", "weights",
                       "rescale_weights", "seed", "ecm", "workers", "output_dir", "evaluation", "simulate"});
    RunConfig c;
    read(j, "data", "", c.data_path);
    if (j.contains("tune_periods")) c.tune_periods = read_int(j, "tune_periods", "", 0);

    if (j.contains("estimator")) {
        const json& e = j.at("estimator");
        if (e.is_string()) {
            c.estimator.kind = parse_kind(e.get<std::string>());
        } else {
            check_keys(e, "estimator", {"kind", "q", "d", "m", "exclude_full_columns"});
            if (e.contains("kind")) c.estimator.kind = parse_kind(get<std::string>(e, "kind", "estimator"));
            c.estimator.q = read_int(e, "q", "estimator", c.estimator.q);
            c.estimator.m = read_int(e, "m", "estimator", c.estimator.m);
            read(e, "exclude_full_columns", "estimator", c.estimator.exclude_full_columns);
            if (e.contains("d")) {
                const json& d = e.at("d");
                if (d.is_string() && d.get<std::string>() == "auto")
                    c.estimator.d.reset();
                else if (d.is_number_integer())
                    c.estimator.d = d.get<int>();
                else
                    throw ConfigError("'estimator.d' must be an integer or \"auto\"");
            }
        }
    }

    if (j.contains("region")) {
        const json& r = j.at("region");
        check_keys(r, "region", {"p", "lambda", "alpha", "beta"});
        if (r.contains("p")) {
            const json& p = r.at("p");
            if (p.is_number_integer())
                c.region.p_set = {p.get<int>()};
            else
                c.region.p_set = get<std::vector<int>>(r, "p", "region");
        }
        c.region.lambda = read_range(r, "lambda", "region", c.region.lambda);
        c.region.alpha = read_range(r, "alpha", "region", c.region.alpha);
        c.region.beta = read_range(r, "beta", "region", c.region.beta);
    }
    c.candidates = read_int(j, "candidates", "", c.candidates);

    if (j.contains("t0")) {
        const json& t0 = j.at("t0");
        if (t0.is_number_integer())
            c.t0 = t0.get<int>();
        else if (t0.is_number_float())
            c.t0 = t0.get<double>();
        else
            throw ConfigError("'t0' must be a period (integer) or a fraction");
    }
    c.stride = read_int(j, "stride", "", c.stride);

    if (j.contains("weights")) {
        const json& w = j.at("weights");
        if (w.is_array()) {
            c.weights.values = get<std::vector<double>>(j, "weights", "");
        } else if (w.is_string() && w.get<std::string>() == "equal") {
        } else {
            check_keys(w, "weights", {"equal_over"});
            c.weights.equal_over = get<std::vector<std::string>>(w, "equal_over", "weights");
        }
    }
    read(j, "rescale_weights", "", c.rescale_weights);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
            throw ConfigError("'seed' must be a nonnegative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }

    if (j.contains("ecm")) {
        const json& e = j.at("ecm");
        check_keys(e, "ecm", {"max_iter", "rel_tol", "epsilon"});
        c.ecm.max_iter = read_int(e, "max_iter", "ecm", c.ecm.max_iter);
        read(e, "rel_tol", "ecm", c.ecm.rel_tol);
        read(e, "epsilon", "ecm", c.ecm.epsilon);
    }
    if (j.contains("workers")) c.workers = read_int(j, "workers", "", 1);
    read(j, "output_dir", "", c.output_dir);

    if (j.contains("evaluation")) {
        const json& e = j.at("evaluation");
        check_keys(e, "evaluation", {"hyper", "selection", "start", "stride"});
        if (e.contains("hyper")) c.evaluation.hyper = read_hyper(e.at("hyper"), "evaluation.hyper");
        read(e, "selection", "evaluation", c.evaluation.selection);
        if (e.contains("start")) c.evaluation.start = read_int(e, "start", "evaluation", 0);
        c.evaluation.stride = read_int(e, "stride", "evaluation", c.evaluation.stride);
    }

    if (j.contains("simulate")) {
        const json& s = j.at("simulate");
        check_keys(s, "simulate", {"n", "p", "T", "spectral_radius", "sparsity", "sigma_scale", "burn_in",
                                   "missing_fraction", "missing_block_len", "keep_leading"});
        SimSpec& spec = c.simulate.spec;
        spec.n = read_int(s, "n", "simulate", spec.n);
        spec.p = read_int(s, "p", "simulate", spec.p);
        spec.T = read_int(s, "T", "simulate", spec.T);
        read(s, "spectral_radius", "simulate", spec.spectral_radius);
        read(s, "sparsity", "simulate", spec.sparsity);
        read(s, "sigma_scale", "simulate", spec.sigma_scale);
        spec.burn_in = read_int(s, "burn_in", "simulate", spec.burn_in);
        read(s, "missing_fraction", "simulate", c.simulate.missing_fraction);
        c.simulate.missing_block_len = read_int(s, "missing_block_len", "simulate", c.simulate.missing_block_len);
        c.simulate.keep_leading = read_int(s, "keep_leading", "simulate", c.simulate.keep_leading);
    }
    c.simulate.spec.seed = c.seed;

    try {
        c.region.validate();
        c.ecm.validate();
        c.simulate.spec.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (c.candidates < 1) throw ConfigError("'candidates' must be >= 1");
    if (c.stride < 1 || c.evaluation.stride < 1) throw ConfigError("strides must be >= 1");
    if (c.estimator.q < 1) throw ConfigError("'estimator.q' must be >= 1");
    if (c.estimator.m < 1) throw ConfigError("'estimator.m' must be >= 1");
    if (c.estimator.d && *c.estimator.d < 1) throw ConfigError("'estimator.d' must be >= 1");
    if (c.tune_periods && *c.tune_periods < 2) throw ConfigError("'tune_periods' must be >= 2");
    if (c.workers && *c.workers < 1) throw ConfigError("'workers' must be >= 1");
    if (const double* f = std::get_if<double>(&c.t0); f && !(*f > 0.0 && *f < 1.0))
        throw ConfigError("fractional 't0' must lie in (0, 1)");
    if (const int* t = std::get_if<int>(&c.t0); t && *t < 1) throw ConfigError("'t0' must be >= 1");
    return c;
}

json run_config_to_json(const RunConfig& c) {
    json estimator{{"kind", estimator_name(c.estimator.kind)}};
    if (c.estimator.kind == EstimatorKindName::BlockJackknife) estimator["q"] = c.estimator.q;
    if (c.estimator.kind == EstimatorKindName::ArtificialJackknife) {
        estimator["d"] = c.estimator.d ? json(*c.estimator.d) : json("auto");
        estimator["m"] = c.estimator.m;
        estimator["exclude_full_columns"] = c.estimator.exclude_full_columns;
    }
    json weights;
    if (!c.weights.values.empty())
        weights = c.weights.values;
    else if (!c.weights.equal_over.empty())
        weights = json{{"equal_over", c.weights.equal_over}};
    else
        weights = "equal";

    json evaluation{{"stride", c.evaluation.stride}};
    if (c.evaluation.hyper) evaluation["hyper"] = hyper_json(*c.evaluation.hyper);
    if (!c.evaluation.selection.empty()) evaluation["selection"] = c.evaluation.selection;
    if (c.evaluation.start) evaluation["start"] = *c.evaluation.start;

    const SimSpec& s = c.simulate.spec;
    json out{
        {"data", c.data_path},
        {"tune_periods", c.tune_periods ? json(*c.tune_periods) : json(nullptr)},
        {"estimator", estimator},
        {"region",
         {{"p", c.region.p_set},
          {"lambda", {c.region.lambda.lo, c.region.lambda.hi}},
          {"alpha", {c.region.alpha.lo, c.region.alpha.hi}},
          {"beta", {c.region.beta.lo, c.region.beta.hi}}}},
        {"candidates", c.candidates},
        {"t0", std::holds_alternative<int>(c.t0) ? json(std::get<int>(c.t0)) : json(std::get<double>(c.t0))},
        {"stride", c.stride},
        {"weights", weights},
        {"rescale_weights", c.rescale_weights},
        {"seed", c.seed},
        {"ecm", {{"max_iter", c.ecm.max_iter}, {"rel_tol", c.ecm.rel_tol}, {"epsilon", c.ecm.epsilon}}},
        {"evaluation", evaluation},
        {"simulate",
         {{"n", s.n},
          {"p", s.p},
          {"T", s.T},
          {"spectral_radius", s.spectral_radius},
          {"sparsity", s.sparsity},
          {"sigma_scale", s.sigma_scale},
          {"burn_in", s.burn_in},
          {"missing_fraction", c.simulate.missing_fraction},
          {"missing_block_len", c.simulate.missing_block_len},
          {"keep_leading", c.simulate.keep_leading}}},
    };
    if (!c.tune_periods) out.erase("tune_periods");
    return out;
}

json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "': " + e.what());
    }
}

void apply_override(json& j, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("override '" + std::string(assignment) + "' must look like key.path=value");
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    std::string pointer;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        pointer += "/" + key.substr(start, dot - start);
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (!j.is_object()) j = json::object();
    j[json::json_pointer(pointer)] = std::move(value);
}

WeightVector resolve_weights(const WeightsConfig& weights, const TimeSeriesDataset& data) {
    const int n = data.num_series();
    if (!weights.values.empty()) {
        if (static_cast<int>(weights.values.size()) != n)
            throw ConfigError("weights list has " + std::to_string(weights.values.size()) + " entries for " +
                              std::to_string(n) + " series");
        try {
            return WeightVector(Eigen::Map<const Vector>(weights.values.data(), n));
        } catch (const Error& e) {
            throw ConfigError(std::string("weights: ") + e.what());
        }
    }
    if (weights.equal_over.empty()) return WeightVector(Vector::Constant(n, 1.0 / n));

    Vector w = Vector::Zero(n);
    std::set<std::string> wanted(weights.equal_over.begin(), weights.equal_over.end());
    for (const std::string& name : wanted) {
        const auto& names = data.series_names();
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw ConfigError("weights.equal_over names unknown series '" + name + "'");
        w[it - names.begin()] = 1.0 / static_cast<double>(wanted.size());
    }
    return WeightVector(std::move(w));
}

int resolve_t0(const std::variant<int, double>& t0, int T) {
    if (const int* t = std::get_if<int>(&t0)) return *t;
    return std::max(1, static_cast<int>(std::llround(std::get<double>(t0) * T)));
}

ErrorSpec make_error_spec(const RunConfig& config, const TimeSeriesDataset& data) {
    EstimatorKind kind;
    switch (config.estimator.kind) {
        case EstimatorKindName::InSample: kind = InSampleEstimator{}; break;
        case EstimatorKindName::PseudoOos: kind = PseudoOosEstimator{}; break;
        case EstimatorKindName::BlockJackknife: kind = JackknifeEstimator{BlockFamily{config.estimator.q}}; break;
        case EstimatorKindName::ArtificialJackknife:
            kind = JackknifeEstimator{ArtificialFamily{config.estimator.d, config.estimator.m,
                                                       config.estimator.exclude_full_columns, config.seed}};
            break;
    }
    ErrorSpec spec{std::move(kind), resolve_t0(config.t0, data.num_periods()), config.stride,
                   resolve_weights(config.weights, data), LossOptions{config.rescale_weights}};
    const int max_p = *std::max_element(config.region.p_set.begin(), config.region.p_set.end());
    if (!std::holds_alternative<InSampleEstimator>(spec.kind) &&
        (spec.t0 < max_p || spec.t0 > data.num_periods() - 1))
        throw ConfigError("t0 = " + std::to_string(spec.t0) + " must lie in [max p = " + std::to_string(max_p) +
                          ", T - 1 = " + std::to_string(data.num_periods() - 1) + "]");
    return spec;
}

}  // namespace ajk
