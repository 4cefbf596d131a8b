#include "ajk/commands.hpp"
#include "ajk/errors.hpp"
#include "ajk/run_config.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Flags {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::string> data, output_dir, estimator, d, selection;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers, candidates, m, q, stride, start, tune_periods;
    std::optional<double> t0;
};

nlohmann::json merged_config(const Flags& f) {
    nlohmann::json j = f.config_path.empty() ? nlohmann::json::object() : ajk::load_config_file(f.config_path);
    auto set = [&j](const std::string& key, const nlohmann::json& value) {
        j[nlohmann::json::json_pointer(key)] = value;
    };
    for (const std::string& s : f.sets) ajk::apply_override(j, s);
    if (f.data) set("/data", *f.data);
    if (f.output_dir) set("/output_dir", *f.output_dir);
    if (f.seed) set("/seed", *f.seed);
    if (f.workers) set("/workers", *f.workers);
    if (f.tune_periods) set("/tune_periods", *f.tune_periods);
    if (f.candidates) set("/candidates", *f.candidates);
    if (f.stride) set("/stride", *f.stride);
    if (f.t0) {
        const double v = *f.t0;
        if (v >= 1.0 && v == static_cast<double>(static_cast<int>(v)))
            set("/t0", static_cast<int>(v));
        else
            set("/t0", v);
    }
    if (f.estimator || f.m || f.q || f.d) {
        if (j.contains("estimator") && j["estimator"].is_string())
            j["estimator"] = nlohmann::json{{"kind", j["estimator"]}};
        if (f.estimator) set("/estimator/kind", *f.estimator);
        if (f.m) set("/estimator/m", *f.m);
        if (f.q) set("/estimator/q", *f.q);
        if (f.d) {
            if (*f.d == "auto")
                set("/estimator/d", "auto");
            else
                try {
                    set("/estimator/d", std::stoi(*f.d));
                } catch (const std::exception&) {
                    throw ajk::ConfigError("--d must be an integer or auto");
                }
        }
    }
    if (f.selection) set("/evaluation/selection", *f.selection);
    if (f.start) set("/evaluation/start", *f.start);
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperparameter tuning of elastic-net VARs with the artificial delete-d jackknife"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("-c,--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--set", f.sets, "Override a config entry: key.path=value (repeatable)");
    app.add_option("--data", f.data, "Input CSV");
    app.add_option("-o,--output-dir", f.output_dir, "Directory for reports");
    app.add_option("--seed", f.seed, "Master seed");
    app.add_option("--workers", f.workers, "Worker threads (default: AJK_WORKERS or 1)");
    app.add_option("--tune-periods", f.tune_periods, "Length of the tuning window");

    auto* tune = app.add_subcommand("tune", "Select hyperparameters by random search");
    tune->add_option("--estimator", f.estimator, "insample | pseudo_oos | block_jackknife | artificial_jackknife");
    tune->add_option("--candidates", f.candidates, "Number of random candidates");
    tune->add_option("--m", f.m, "Patterns in the artificial family");
    tune->add_option("--d", f.d, "Cells deleted per pattern, or auto");
    tune->add_option("--q", f.q, "Block length of the block jackknife");
    tune->add_option("--t0", f.t0, "Presample end: a period or a fraction of the tuning window");
    tune->add_option("--stride", f.stride, "Re-estimation interval");

    auto* evaluate = app.add_subcommand("evaluate", "Rolling one-step evaluation of fixed hyperparameters");
    evaluate->add_option("--selection", f.selection, "selection.json to take the hyperparameters from");
    evaluate->add_option("--start", f.start, "First target period of the evaluation window");

    app.add_subcommand("simulate", "Write a synthetic VAR panel and its true parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const ajk::RunConfig config = ajk::run_config_from_json(merged_config(f));
        if (tune->parsed()) {
            const auto report = ajk::cmd_tune(config);
            std::cout << "best " << report["best"].dump() << " error " << report["best_error"].dump() << "\n";
        } else if (evaluate->parsed()) {
            const auto report = ajk::cmd_evaluate(config);
            std::cout << "weighted MSE " << report["weighted_mse"].dump() << ", relative to random walk "
                      << report["relative_mse"].dump() << "\n";
        } else {
            ajk::cmd_simulate(config);
            std::cout << "wrote simulated.csv and truth.json to " << config.output_dir << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ajk::exit_code_for(e);
    }
    return 0;
}
