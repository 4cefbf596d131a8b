#include "ajk/commands.hpp"
#include "ajk/csv_io.hpp"
#include "ajk/errors.hpp"
#include "ajk/run_config.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace ajk;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ajk_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> keys(const json& j) {
    std::vector<std::string> out;
    for (const auto& [k, _] : j.items()) out.push_back(k);
    return out;
}

RunConfig simulate_config(const fs::path& out, std::uint64_t seed, int n, int T) {
    json j{{"seed", seed}, {"output_dir", out.string()}, {"simulate", {{"n", n}, {"T", T}, {"p", 1}}}};
    return run_config_from_json(j);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("csv ingestion") {
    std::istringstream one("date,a,b\n2000Q1,1.5,NA\n2000Q2,2,3\n2000Q3,,4e-1\n");
    const TimeSeriesDataset d = parse_csv(one);
    CHECK(d.num_series() == 2);
    CHECK(d.num_periods() == 3);
    CHECK(d.observed_count() == 4);
    CHECK(d.series_names() == std::vector<std::string>{"a", "b"});
    CHECK(d.time_labels() == std::vector<std::string>{"2000Q1", "2000Q2", "2000Q3"});
    CHECK(d.values()(1, 2) == 0.4);

    std::istringstream na("t,x\n1,NA\n2,5\n3,NaN\n");
    CHECK(parse_csv(na).observed_count() == 1);

    std::istringstream empty("t,x,y\n");
    CHECK_THROWS_WITH_AS(parse_csv(empty), doctest::Contains("no observations"), IngestionError);

    std::istringstream ragged("t,x,y\n1,2,3\n2,4\n");
    try {
        parse_csv(ragged);
        FAIL("ragged row accepted");
    } catch (const IngestionError& e) {
        CHECK(e.row() == 3);
    }

    std::istringstream junk("t,x,y\n1,2,3\n2,4,abc\n");
    try {
        parse_csv(junk);
        FAIL("bad cell accepted");
    } catch (const IngestionError& e) {
        CHECK(e.row() == 3);
        CHECK(e.column() == 3);
    }

    std::istringstream dup("t,x,x\n1,2,3\n");
    CHECK_THROWS_AS(parse_csv(dup), IngestionError);
}

TEST_CASE("csv round trip is bit-identical") {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> z(0.0, 1e3);
    Matrix v(3, 50);
    Mask m(3, 50);
    for (int t = 0; t < 50; ++t)
        for (int i = 0; i < 3; ++i) {
            v(i, t) = z(gen) / 7.0;
            m(i, t) = (t * 3 + i) % 11 != 0;
        }
    v(0, 1) = 1e-300;
    v(1, 1) = -0.0;
    const TimeSeriesDataset d(v, m, {"x", "y,z", "w"}, {});
    std::stringstream ss;
    write_csv(ss, d);
    const TimeSeriesDataset back = parse_csv(ss);
    CHECK((back.observed() == d.observed()).all());
    for (int t = 0; t < 50; ++t)
        for (int i = 0; i < 3; ++i)
            if (m(i, t)) CHECK(std::bit_cast<std::uint64_t>(back.values()(i, t)) == std::bit_cast<std::uint64_t>(v(i, t)));
    CHECK(back.series_names()[1] == "y,z");
}

TEST_CASE("config parsing, defaults and overrides") {
    const RunConfig d = run_config_from_json(json::object());
    CHECK(d.region.p_set == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(d.region.lambda.lo == 1e-4);
    CHECK(d.region.lambda.hi == 5.0);
    CHECK(d.region.beta.hi == 5.0);
    CHECK(d.candidates == 1000);
    CHECK(d.estimator.m == 5000);
    CHECK_FALSE(d.estimator.d.has_value());

    json j = json::parse(R"({"estimator": {"kind": "block_jackknife", "q": 4}, "seed": 5})");
    apply_override(j, "estimator.q=6");
    apply_override(j, "region.p=[1,2]");
    apply_override(j, "data=some file.csv");
    const RunConfig c = run_config_from_json(j);
    CHECK(c.estimator.kind == EstimatorKindName::BlockJackknife);
    CHECK(c.estimator.q == 6);
    CHECK(c.region.p_set == std::vector<int>{1, 2});
    CHECK(c.data_path == "some file.csv");

    CHECK_THROWS_AS(run_config_from_json(json{{"estimatr", "insample"}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"estimator", "jackknife"}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"t0", 1.5}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json{{"region", {{"alpha", {0.0, 2.0}}}}}), ConfigError);
    CHECK_THROWS_AS(apply_override(j, "novalue"), ConfigError);

    const RunConfig replay = run_config_from_json(run_config_to_json(c));
    CHECK(run_config_to_json(replay) == run_config_to_json(c));
}

TEST_CASE("weights and t0 resolution") {
    Matrix v = Matrix::Ones(3, 10);
    const TimeSeriesDataset d(v, Mask::Constant(3, 10, true), {"usd", "gbp", "gdp"}, {});
    WeightsConfig w;
    w.equal_over = {"usd", "gbp"};
    const WeightVector wv = resolve_weights(w, d);
    CHECK(wv[0] == 0.5);
    CHECK(wv[2] == 0.0);
    w.equal_over = {"eur"};
    CHECK_THROWS_AS(resolve_weights(w, d), ConfigError);
    CHECK(resolve_t0(0.5, 160) == 80);
    CHECK(resolve_t0(7, 160) == 7);
}

TEST_CASE("simulate writes the ingestion format deterministically") {
    const fs::path a = scratch("sim_a"), b = scratch("sim_b");
    cmd_simulate(simulate_config(a, 7, 2, 50));
    cmd_simulate(simulate_config(b, 7, 2, 50));
    const TimeSeriesDataset d = ingest_csv(a / "simulated.csv");
    CHECK(d.num_periods() == 50);
    CHECK(d.num_series() == 2);
    CHECK(slurp(a / "simulated.csv") == slurp(b / "simulated.csv"));
    CHECK(slurp(a / "truth.json") == slurp(b / "truth.json"));

    json j{{"seed", 7}, {"output_dir", a.string()},
           {"simulate", {{"n", 2}, {"T", 50}, {"missing_fraction", 0.1}, {"keep_leading", 5}}}};
    cmd_simulate(run_config_from_json(j));
    CHECK(slurp(a / "simulated.csv").find("NA") != std::string::npos);
    const json truth = json::parse(slurp(a / "truth.json"));
    CHECK(truth["masked_cells"] == 10);
    CHECK(truth["psi"].size() == 2);
}

TEST_CASE("tune on a 2x3 toy records the resolved d") {
    const fs::path dir = scratch("toy");
    {
        std::ofstream out(dir / "toy.csv");
        out << "t,a,b\n1,0.5,-1\n2,1.2,0.3\n3,-0.4,0.9\n";
    }
    json j{{"data", (dir / "toy.csv").string()},
           {"output_dir", dir.string()},
           {"seed", 1},
           {"candidates", 1},
           {"t0", 2},
           {"estimator", {{"kind", "artificial_jackknife"}, {"d", "auto"}, {"m", 3}}},
           {"region", {{"p", {1}}, {"lambda", {0.5, 0.5}}, {"alpha", {0.5, 0.5}}, {"beta", {1.0, 1.0}}}}};
    const json report = cmd_tune(run_config_from_json(j));
    CHECK(report["estimator"]["d"] == 2);
    CHECK(report["estimator"]["d_auto"] == true);
    CHECK(report["best"]["lambda"] == 0.5);
    CHECK(report["best"]["p"] == 1);
    CHECK(fs::exists(dir / "trace.csv"));
}

TEST_CASE("selection.json schema matches the golden file") {
    const fs::path dir = scratch("golden");
    cmd_simulate(simulate_config(dir, 3, 3, 40));
    json j{{"data", (dir / "simulated.csv").string()}, {"output_dir", dir.string()}, {"seed", 11},
           {"candidates", 2}, {"stride", 10}, {"estimator", {{"m", 3}}}};
    cmd_tune(run_config_from_json(j));
    const json report = json::parse(slurp(dir / "selection.json"));
    const json golden = json::parse(slurp(fs::path(AJK_TEST_DATA_DIR) / "golden" / "selection_schema.json"));
    CHECK(keys(report) == golden["top_level"].get<std::vector<std::string>>());
    CHECK(keys(report["config"]) == golden["config"].get<std::vector<std::string>>());
    CHECK(keys(report["data"]) == golden["data"].get<std::vector<std::string>>());
    CHECK(keys(report["estimator"]) == golden["estimator"].get<std::vector<std::string>>());
    CHECK(keys(report["best"]) == golden["best"].get<std::vector<std::string>>());
    CHECK(keys(report["trace"][0]) == golden["trace_entry"].get<std::vector<std::string>>());
    CHECK(report["schema_version"] == kSchemaVersion);
    CHECK(report["trace"].size() == 2);
    CHECK(report["config"]["region"]["p"] == json({1, 2, 3, 4, 5}));
}

TEST_CASE("tune output is byte-identical across runs and worker counts") {
    const fs::path dir = scratch("determinism");
    cmd_simulate(simulate_config(dir, 5, 2, 30));
    std::string first;
    for (int workers : {1, 3}) {
        json j{{"data", (dir / "simulated.csv").string()}, {"output_dir", (dir / std::to_string(workers)).string()},
               {"seed", 2}, {"candidates", 3}, {"stride", 5}, {"workers", workers},
               {"region", {{"p", {1, 2}}}}, {"estimator", {{"m", 4}}}};
        cmd_tune(run_config_from_json(j));
        const std::string text = slurp(dir / std::to_string(workers) / "selection.json");
        if (first.empty())
            first = text;
        else
            CHECK(text == first);
    }
}

TEST_CASE("evaluate against the random-walk benchmark") {
    const fs::path dir = scratch("evaluate");
    std::mt19937_64 gen(8);
    std::normal_distribution<double> z;
    {
        std::ofstream out(dir / "rw.csv");
        out << "t,a,b\n";
        double a = 0.0, b = 0.0;
        for (int t = 1; t <= 200; ++t) {
            a += z(gen);
            b += z(gen);
            out << t << ',' << format_double(a) << ',' << (t == 150 ? std::string("NA") : format_double(b)) << '\n';
        }
    }
    json j{{"data", (dir / "rw.csv").string()}, {"output_dir", dir.string()}, {"tune_periods", 100},
           {"evaluation", {{"hyper", {{"p", 1}, {"lambda", 0.0}, {"alpha", 0.0}, {"beta", 1.0}}}, {"stride", 10}}}};
    const json r = cmd_evaluate(run_config_from_json(j));
    CHECK(r["relative_mse"].get<double>() > 0.8);
    CHECK(r["relative_mse"].get<double>() < 1.3);
    CHECK(r["window"]["first_target"] == 101);
    CHECK(r["per_series"][1]["scored"] == 99);
    const std::string csv = slurp(dir / "evaluation.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 100 * 2);

    j["evaluation"]["hyper"]["lambda"] = 1e9;
    j["evaluation"]["hyper"]["alpha"] = 1.0;
    const json flat = cmd_evaluate(run_config_from_json(j));
    CHECK(std::isfinite(flat["relative_mse"].get<double>()));

    j["evaluation"]["start"] = 50;
    CHECK_THROWS_AS(cmd_evaluate(run_config_from_json(j)), ConfigError);
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(IngestionError("x", 1, 1)) == 3);
    CHECK(exit_code_for(NumericalError("x")) == 4);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);

    const fs::path dir = scratch("exit");
    const std::string cli = AJK_CLI_PATH;
    const auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("--seed 1 -o " + dir.string() + " --set simulate.T=20 simulate") == 0);
    CHECK(run("--data " + (dir / "simulated.csv").string() + " -o " + dir.string() +
              " tune --estimator nonsense") == 2);
    {
        std::ofstream bad(dir / "bad.csv");
        bad << "t,a\n1,x\n";
    }
    CHECK(run("--data " + (dir / "bad.csv").string() + " tune") == 3);
    CHECK(run("tune") == 2);
}

}
