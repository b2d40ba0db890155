#pragma once

#include "laac/configuration.hpp"
#include "laac/nn.hpp"
#include "laac/objective.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace laac {

enum class TrainingSource { rgf, mabbob, mixed };

struct PipelineConfig {
    std::size_t dimension = 5;
    std::size_t n_train_functions = 50;
    TrainingSource training_source = TrainingSource::mixed;
    std::size_t samples_per_dim = 0;     ///< 0 = dimension default (50, or 20 above d = 10)
    std::size_t run_budget_per_dim = 0;  ///< 0 = dimension default (1000, or 100 above d = 10)
    std::size_t tpe_budget = 50;
    std::size_t tpe_startup = 20;
    std::size_t repetitions = 5;
    bool restrict_to_continuous_hp = false;
    std::uint64_t master_seed = 20240917;
    std::filesystem::path output_dir = "laac_out";
    std::vector<int> test_suite{1, 5, 12};
    std::size_t jobs = 1;

    double tie_tolerance = 1e-6;
    double prune_threshold = 0.95;
    std::size_t grid_splits = 5;
    std::vector<NnArchitecture> grid = default_grid();
    TrainSettings train;

    std::size_t doe_samples_per_dim() const;
    std::size_t run_budget() const;
    /// Throws ParameterError on invalid values.
    void validate() const;
};

void to_json(nlohmann::json &j, const PipelineConfig &c);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json &j, PipelineConfig &c);
PipelineConfig load_pipeline_config(const std::filesystem::path &path);

/// Writes pool/<id>.rgf or pool/<id>.mabbob.json and pool/manifest.json.
void stage_generate(const PipelineConfig &cfg);

/// Samples a DoE, computes features, tunes and screens every pool function.
/// Functions already labeled are skipped; ledgers are rebuilt at the end.
void stage_label(const PipelineConfig &cfg);

/// Fits pruning and scaling on accepted functions, grid-searches the network,
/// retrains on all rows and writes model/model.json.
void stage_train(const PipelineConfig &cfg);

/// Predicts a configuration per BBOB test function and compares it against
/// the default, SBS and VBS configurations on paired seeded runs.
void stage_evaluate(const PipelineConfig &cfg);

/// Human-readable summary of eval/report.csv.
std::string stage_report(const PipelineConfig &cfg);

/// Predicts from a CSV with columns x0..x{d-1}, y using the trained model.
Configuration predict_from_doe_csv(const PipelineConfig &cfg, const std::filesystem::path &doe_csv);

/// Loads one pool function by id.
FunctionPtr load_pool_function(const PipelineConfig &cfg, const std::string &function_id);

} // namespace laac
