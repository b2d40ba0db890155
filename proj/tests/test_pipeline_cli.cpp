#include "laac/errors.hpp"
#include "laac/io.hpp"
#include "laac/pipeline.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>

using namespace laac;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("laac_pipeline_" + name);
    fs::remove_all(p);
    return p;
}

// Every file under `root`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path &root) {
    std::map<std::string, std::string> out;
    for (const auto &e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), root).string()] = read_file(e.path());
        }
    }
    return out;
}

std::size_t count_suffix(const fs::path &dir, const std::string &suffix) {
    std::size_t n = 0;
    for (const auto &e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        n += name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    }
    return n;
}

PipelineConfig tiny(const fs::path &out) {
    PipelineConfig c;
    c.dimension = 2;
    c.n_train_functions = 26;
    c.training_source = TrainingSource::mabbob;
    c.samples_per_dim = 50;
    c.run_budget_per_dim = 50;
    c.tpe_budget = 20;
    c.tpe_startup = 20;
    c.repetitions = 5;
    c.test_suite = {1, 2};
    c.grid = {{1, 16, 20}};
    c.grid_splits = 2;
    c.output_dir = out;
    return c;
}

int run_cli(const std::string &args) {
    const std::string cmd = std::string(LAAC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("configuration defaults, parsing and validation") {
    PipelineConfig c;
    CHECK(c.doe_samples_per_dim() == 50);
    CHECK(c.run_budget() == 5000);
    c.dimension = 20;
    CHECK(c.doe_samples_per_dim() == 20);
    CHECK(c.run_budget() == 2000);

    const nlohmann::json j = tiny("x");
    PipelineConfig back;
    from_json(j, back);
    CHECK(nlohmann::json(back) == j);

    PipelineConfig bad;
    CHECK_THROWS(from_json(nlohmann::json{{"dimensions", 5}}, bad));
    PipelineConfig zero = tiny("x");
    zero.n_train_functions = 0;
    CHECK_THROWS_AS(zero.validate(), ParameterError);
    PipelineConfig fid = tiny("x");
    fid.test_suite = {25};
    CHECK_THROWS_AS(fid.validate(), ParameterError);
}

TEST_CASE("generation writes the requested split deterministically") {
    PipelineConfig c = tiny("");
    c.n_train_functions = 10;
    c.training_source = TrainingSource::rgf;
    c.output_dir = scratch("gen_rgf");
    stage_generate(c);
    CHECK(count_suffix(c.output_dir / "pool", ".rgf") == 10);
    CHECK(fs::exists(c.output_dir / "pool" / "manifest.json"));

    c.training_source = TrainingSource::mixed;
    c.output_dir = scratch("gen_a");
    stage_generate(c);
    CHECK(count_suffix(c.output_dir / "pool", ".rgf") == 5);
    CHECK(count_suffix(c.output_dir / "pool", ".mabbob.json") == 5);
    const auto first = snapshot(c.output_dir);
    c.output_dir = scratch("gen_b");
    stage_generate(c);
    CHECK(snapshot(c.output_dir) == first);

    const FunctionPtr f = load_pool_function(c, "f0000");
    CHECK(f->dimension() == 2);
    CHECK_THROWS(load_pool_function(c, "nope"));
    for (const char *dir : {"gen_rgf", "gen_a", "gen_b"}) {
        fs::remove_all(scratch(dir));
    }
}

TEST_CASE("the stages run end to end and are idempotent") {
    const PipelineConfig c = tiny(scratch("e2e").string());
    CHECK_THROWS_AS(stage_label(c), IoError);
    stage_generate(c);
    CHECK_THROWS_AS(stage_train(c), IoError);
    stage_label(c);
    for (const char *f : {"features.csv", "verdicts.csv", "accepted.json", "feature_manifest.json"}) {
        CHECK(fs::exists(c.output_dir / "labels" / f));
    }
    CHECK(read_csv(c.output_dir / "labels" / "verdicts.csv").rows.size() == 26);
    const auto labeled = snapshot(c.output_dir);

    // a rerun changes nothing; a lost label is recomputed identically
    stage_label(c);
    CHECK(snapshot(c.output_dir) == labeled);
    fs::remove(c.output_dir / "labels" / "f0003.meta.json");
    fs::remove(c.output_dir / "labels" / "f0003.hpo.json");
    stage_label(c);
    CHECK(snapshot(c.output_dir) == labeled);

    CHECK_THROWS_AS(stage_evaluate(c), IoError);
    stage_train(c);
    const std::string model = read_file(c.output_dir / "model" / "model.json");
    fs::remove(c.output_dir / "model" / "model.json");
    stage_train(c);
    CHECK(read_file(c.output_dir / "model" / "model.json") == model);

    stage_evaluate(c);
    const CsvTable report = read_csv(c.output_dir / "eval" / "report.csv");
    CHECK(report.header == std::vector<std::string>{"function_id", "baseline", "median_auc_ours",
                                                    "median_auc_baseline", "p_value", "significant_at_0.05"});
    CHECK(report.rows.size() == 6);
    const std::string text = stage_report(c);
    CHECK(text.find("vs default") != std::string::npos);

    const auto done = snapshot(c.output_dir);
    stage_evaluate(c);
    CHECK(snapshot(c.output_dir) == done);

    // the same run in a fresh directory reproduces every artifact
    const PipelineConfig again = tiny(scratch("e2e_again").string());
    stage_generate(again);
    stage_label(again);
    stage_train(again);
    stage_evaluate(again);
    CHECK(snapshot(again.output_dir) == done);

    PipelineConfig few = c;
    few.repetitions = 4;
    CHECK_THROWS_AS(stage_evaluate(few), ParameterError);

    // the CLI on top of the same artifacts
    const fs::path cfg_path = c.output_dir / "config.json";
    write_file_atomic(cfg_path, nlohmann::json(c).dump());
    std::string doe = "x0,x1,y\n";
    for (int i = 0; i < 100; ++i) {
        const double a = -5 + 0.1 * i;
        const double b = 5 - 0.07 * i;
        doe += format_double(a) + ',' + format_double(b) + ',' + format_double(a * a + 3 * b) + '\n';
    }
    write_file_atomic(c.output_dir / "doe.csv", doe);
    const std::string base = "--config " + cfg_path.string() + " --out " + c.output_dir.string();
    CHECK(run_cli(base + " predict " + (c.output_dir / "doe.csv").string()) == 0);
    CHECK(run_cli(base + " report") == 0);
    CHECK(run_cli(base + " predict " + (c.output_dir / "missing.csv").string()) == 3);
    fs::remove_all(c.output_dir);
    fs::remove_all(again.output_dir);
}

TEST_CASE("training refuses too few accepted functions") {
    PipelineConfig c = tiny(scratch("few").string());
    c.n_train_functions = 6;
    stage_generate(c);
    stage_label(c);
    CHECK_THROWS_AS(stage_train(c), ParameterError);
    fs::remove_all(c.output_dir);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("--jobs 0 generate") == 2);
    CHECK(run_cli("--config " + (dir / "absent.json").string() + " generate") == 3);

    write_file_atomic(dir / "unknown.json", R"({"dimension": 2, "flavour": 1})");
    CHECK(run_cli("--config " + (dir / "unknown.json").string() + " generate") == 2);
    write_file_atomic(dir / "broken.json", "{\"dimension\": ");
    CHECK(run_cli("--config " + (dir / "broken.json").string() + " generate") == 2);

    CHECK(run_cli("--out " + (dir / "empty").string() + " report") == 3);
    CHECK(run_cli("--out " + (dir / "empty").string() + " train") == 3);

    write_file_atomic(dir / "small.json", R"({"dimension": 2, "n_train_functions": 4, "training_source": "rgf"})");
    CHECK(run_cli("--config " + (dir / "small.json").string() + " --out " + (dir / "run").string() +
                  " --seed 5 generate") == 0);
    CHECK(fs::exists(dir / "run" / "pool" / "manifest.json"));
    CHECK(read_file(dir / "run" / "pool" / "manifest.json").find("\"master_seed\": 5") != std::string::npos);
    fs::remove_all(dir);
}
