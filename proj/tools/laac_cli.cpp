// Command-line front end for the configuration pipeline.
#include "laac/errors.hpp"
#include "laac/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Landscape-aware configuration of a modular CMA-ES"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<std::size_t> jobs;
    app.add_option("--config", config_path, "pipeline configuration JSON");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "artifact directory");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto *generate = app.add_subcommand("generate", "write the training function pool");
    auto *label = app.add_subcommand("label", "tune and screen every pool function");
    auto *train = app.add_subcommand("train", "fit the configuration network");
    auto *predict = app.add_subcommand("predict", "predict a configuration from a DoE CSV");
    std::string doe_csv;
    predict->add_option("doe", doe_csv, "CSV with columns x0..x{d-1},y")->required();
    auto *evaluate = app.add_subcommand("evaluate", "compare predictions against the baselines on BBOB");
    auto *report = app.add_subcommand("report", "summarize the evaluation report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        laac::PipelineConfig cfg;
        if (!config_path.empty()) {
            cfg = laac::load_pipeline_config(config_path);
        }
        if (seed) {
            cfg.master_seed = *seed;
        }
        if (!out_dir.empty()) {
            cfg.output_dir = out_dir;
        }
        if (jobs) {
            cfg.jobs = *jobs;
        }
        cfg.validate();

        if (generate->parsed()) {
            laac::stage_generate(cfg);
        } else if (label->parsed()) {
            laac::stage_label(cfg);
        } else if (train->parsed()) {
            laac::stage_train(cfg);
        } else if (predict->parsed()) {
            std::cout << nlohmann::json(laac::predict_from_doe_csv(cfg, doe_csv)).dump(2) << '\n';
        } else if (evaluate->parsed()) {
            laac::stage_evaluate(cfg);
        } else if (report->parsed()) {
            std::cout << laac::stage_report(cfg);
        }
    } catch (const laac::IoError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception &e) {
        // parameter, parse, schema and JSON errors are all input validation failures
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
