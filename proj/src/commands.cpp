#include "ajk/commands.hpp"

#include "ajk/csv_io.hpp"
#include "ajk/errors.hpp"
#include "ajk/parallel.hpp"
#include "ajk/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

namespace ajk {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json hyper_json(const Hyperparameters& h) {
    return json{{"p", h.p}, {"lambda", h.lambda}, {"alpha", h.alpha}, {"beta", h.beta}};
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

fs::path prepare_output_dir(const RunConfig& config) {
    const fs::path dir(config.output_dir.empty() ? "." : config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

TimeSeriesDataset load_data(const RunConfig& config) {
    if (config.data_path.empty()) throw ConfigError("no data file given ('data' or --data)");
    return ingest_csv(config.data_path);
}

json data_summary(const TimeSeriesDataset& data) {
    return json{{"series", data.series_names()},
                {"periods", data.num_periods()},
                {"first_label", data.time_labels().empty() ? "" : data.time_labels().front()},
                {"last_label", data.time_labels().empty() ? "" : data.time_labels().back()},
                {"observed_cells", data.observed_count()}};
}

int workers_of(const RunConfig& config) { return config.workers ? *config.workers : default_worker_count(); }

}  // namespace

json cmd_tune(const RunConfig& config) {
    TimeSeriesDataset data = load_data(config);
    if (config.tune_periods) {
        if (*config.tune_periods > data.num_periods())
            throw ConfigError("tune_periods = " + std::to_string(*config.tune_periods) + " exceeds the " +
                              std::to_string(data.num_periods()) + " periods of the data");
        data = data.prefix(*config.tune_periods);
    }
    const ErrorSpec spec = make_error_spec(config, data);
    const SearchResult result = select_hyperparameters(data, config.region, spec, config.candidates, config.seed,
                                                       config.ecm, workers_of(config));

    json weights = json::array();
    for (int i = 0; i < spec.weights.size(); ++i) weights.push_back(spec.weights[i]);
    json estimator{{"kind", estimator_name(config.estimator.kind)},
                   {"t0", spec.t0},
                   {"stride", spec.stride},
                   {"weights", weights},
                   {"rescale_weights", spec.loss_options.rescale_weights}};
    if (config.estimator.kind == EstimatorKindName::BlockJackknife) {
        estimator["q"] = config.estimator.q;
        estimator["patterns"] = data.num_periods() - config.estimator.q + 1;
    }
    if (config.estimator.kind == EstimatorKindName::ArtificialJackknife) {
        estimator["d"] = result.resolved_d ? json(*result.resolved_d) : json(nullptr);
        estimator["d_auto"] = !config.estimator.d.has_value();
        estimator["m"] = config.estimator.m;
        estimator["exclude_full_columns"] = config.estimator.exclude_full_columns;
        estimator["family_seed"] = derive_seed(config.seed, "artificial_family");
    }

    json trace = json::array();
    int failed = 0;
    std::string csv = "index,p,lambda,alpha,beta,error,ok,failed_patterns,message\n";
    for (std::size_t k = 0; k < result.trace.size(); ++k) {
        const TraceEntry& e = result.trace[k];
        if (!e.ok) ++failed;
        json entry = hyper_json(e.candidate);
        entry["index"] = k;
        entry["error"] = number_or_null(e.error);
        entry["ok"] = e.ok;
        entry["failed_patterns"] = e.failed_patterns;
        if (!e.message.empty()) entry["message"] = e.message;
        trace.push_back(std::move(entry));
        csv += std::to_string(k) + ',' + std::to_string(e.candidate.p) + ',' + format_double(e.candidate.lambda) +
               ',' + format_double(e.candidate.alpha) + ',' + format_double(e.candidate.beta) + ',' +
               (e.ok ? format_double(e.error) : std::string("NA")) + ',' + (e.ok ? "true" : "false") + ',' +
               std::to_string(e.failed_patterns) + ',' + csv_field(e.message) + '\n';
    }

    json report{{"schema_version", kSchemaVersion},
                {"command", "tune"},
                {"rng_algorithm", std::string(kRngAlgorithm)},
                {"seed", config.seed},
                {"config", run_config_to_json(config)},
                {"data", data_summary(data)},
                {"estimator", estimator},
                {"best", hyper_json(result.best)},
                {"best_error", result.best_error},
                {"failed_candidates", failed},
                {"trace", trace}};

    const fs::path dir = prepare_output_dir(config);
    write_text(dir / "selection.json", report.dump(2) + "\n");
    write_text(dir / "trace.csv", csv);
    return report;
}

json cmd_evaluate(const RunConfig& config) {
    const TimeSeriesDataset data = load_data(config);
    const int n = data.num_series();
    const int T = data.num_periods();

    Hyperparameters hyper;
    if (config.evaluation.hyper) {
        hyper = *config.evaluation.hyper;
    } else if (!config.evaluation.selection.empty()) {
        std::ifstream in(config.evaluation.selection);
        if (!in) throw ConfigError("cannot open selection file '" + config.evaluation.selection + "'");
        const json sel = json::parse(in, nullptr, false);
        if (sel.is_discarded() || !sel.contains("best"))
            throw ConfigError("'" + config.evaluation.selection + "' is not a selection report");
        const json& b = sel.at("best");
        try {
            hyper = {b.at("p").get<int>(), b.at("lambda").get<double>(), b.at("alpha").get<double>(),
                     b.at("beta").get<double>()};
        } catch (const json::exception&) {
            throw ConfigError("'" + config.evaluation.selection + "' has a malformed 'best' entry");
        }
    } else {
        throw ConfigError("evaluation needs 'evaluation.hyper' or 'evaluation.selection'");
    }
    try {
        hyper.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    int start = 0;
    if (config.evaluation.start)
        start = *config.evaluation.start;
    else if (config.tune_periods)
        start = *config.tune_periods + 1;
    else
        throw ConfigError("evaluation needs 'evaluation.start' or 'tune_periods'");
    if (config.tune_periods && start <= *config.tune_periods)
        throw ConfigError("evaluation window must start after the tuning window");
    if (start < hyper.p + 1 || start > T)
        throw ConfigError("evaluation start " + std::to_string(start) + " must lie in [p + 1, T]");

    const WeightVector weights = resolve_weights(config.weights, data);
    const RollingForecasts rolling =
        rolling_forecasts(data, hyper, start - 1, T - 1, config.evaluation.stride, config.ecm);

    // Last observation carried forward, for the no-change benchmark.
    Matrix last(n, T);
    Mask has_last(n, T);
    for (int i = 0; i < n; ++i) {
        bool seen = false;
        double value = 0.0;
        for (int t = 0; t < T; ++t) {
            if (data.is_observed(i, t)) {
                seen = true;
                value = data.values()(i, t);
            }
            last(i, t) = value;
            has_last(i, t) = seen;
        }
    }

    Vector sse = Vector::Zero(n), rw_sse = Vector::Zero(n);
    std::vector<int> scored(static_cast<std::size_t>(n), 0);
    std::string csv = "label,target,series,actual,forecast,random_walk,sq_error,random_walk_sq_error\n";
    for (std::size_t k = 0; k < rolling.targets.size(); ++k) {
        const int t = rolling.targets[k] - 1;
        for (int i = 0; i < n; ++i) {
            const double forecast = rolling.forecasts(i, static_cast<Eigen::Index>(k));
            const bool observed = data.is_observed(i, t);
            const bool benchmark = has_last(i, t - 1);
            const double rw = benchmark ? last(i, t - 1) : std::numeric_limits<double>::quiet_NaN();
            const double actual = observed ? data.values()(i, t) : std::numeric_limits<double>::quiet_NaN();
            const std::string label =
                t < static_cast<int>(data.time_labels().size()) ? data.time_labels()[t] : std::to_string(t + 1);
            auto fmt = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("NA"); };
            const double err = observed ? (actual - forecast) * (actual - forecast) : NAN;
            const double rw_err = observed && benchmark ? (actual - rw) * (actual - rw) : NAN;
            csv += csv_field(label) + ',' + std::to_string(t + 1) + ',' + csv_field(data.series_names()[i]) + ',' +
                   fmt(actual) + ',' + fmt(forecast) + ',' + fmt(rw) + ',' + fmt(err) + ',' + fmt(rw_err) + '\n';
            if (observed && benchmark) {
                sse[i] += err;
                rw_sse[i] += rw_err;
                ++scored[static_cast<std::size_t>(i)];
            }
        }
    }

    json per_series = json::array();
    double weighted = 0.0, weighted_rw = 0.0;
    for (int i = 0; i < n; ++i) {
        const int c = scored[static_cast<std::size_t>(i)];
        const double mse = c > 0 ? sse[i] / c : NAN;
        const double rw_mse = c > 0 ? rw_sse[i] / c : NAN;
        if (c > 0 && weights[i] > 0.0) {
            weighted += weights[i] * mse;
            weighted_rw += weights[i] * rw_mse;
        }
        per_series.push_back(json{{"series", data.series_names()[i]},
                                  {"weight", weights[i]},
                                  {"scored", c},
                                  {"mse", number_or_null(mse)},
                                  {"random_walk_mse", number_or_null(rw_mse)},
                                  {"relative_mse", number_or_null(rw_mse > 0 ? mse / rw_mse : NAN)}});
    }

    json report{{"schema_version", kSchemaVersion},
                {"command", "evaluate"},
                {"rng_algorithm", std::string(kRngAlgorithm)},
                {"seed", config.seed},
                {"config", run_config_to_json(config)},
                {"data", data_summary(data)},
                {"hyper", hyper_json(hyper)},
                {"window",
                 {{"first_target", start},
                  {"last_target", T},
                  {"stride", config.evaluation.stride},
                  {"estimations", rolling.estimations},
                  {"nonconverged", rolling.nonconverged}}},
                {"per_series", per_series},
                {"weighted_mse", weighted},
                {"random_walk_weighted_mse", weighted_rw},
                {"relative_mse", number_or_null(weighted_rw > 0 ? weighted / weighted_rw : NAN)}};

    const fs::path dir = prepare_output_dir(config);
    write_text(dir / "evaluation.csv", csv);
    write_text(dir / "evaluation.json", report.dump(2) + "\n");
    return report;
}

json cmd_simulate(const RunConfig& config) {
    SimSpec spec = config.simulate.spec;
    spec.seed = config.seed;
    const SimulatedVar sim = simulate_var(spec);
    TimeSeriesDataset data = sim.data;
    if (config.simulate.missing_fraction > 0.0)
        data = inject_missing(data, config.simulate.missing_fraction, derive_seed(config.seed, "missing"),
                              config.simulate.missing_block_len, config.simulate.keep_leading);

    json truth{{"schema_version", kSchemaVersion},
               {"command", "simulate"},
               {"rng_algorithm", std::string(kRngAlgorithm)},
               {"seed", config.seed},
               {"config", run_config_to_json(config)},
               {"psi", matrix_json(sim.truth.psi)},
               {"sigma", matrix_json(sim.truth.sigma)},
               {"spectral_radius", spectral_radius(companion_matrix(sim.truth.psi))},
               {"masked_cells", static_cast<std::ptrdiff_t>(data.num_series()) * data.num_periods() -
                                    data.observed_count()}};

    const fs::path dir = prepare_output_dir(config);
    write_csv(dir / "simulated.csv", data);
    write_text(dir / "truth.json", truth.dump(2) + "\n");
    return truth;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const IngestionError*>(&e)) return 3;
    if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const CapacityError*>(&e)) return 4;
    if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
        dynamic_cast<const IndexError*>(&e))
        return 2;
    return 1;
}

}  // namespace ajk
