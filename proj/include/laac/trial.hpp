#pragma once

#include "laac/configuration.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace laac {

/// One evaluated configuration. `score` is the median AUC over repetitions;
/// `final_best` the median of the runs' final best-so-far values.
struct Trial {
    Configuration config;
    double score = 0.0;
    double final_best = 0.0;
};

using TrialHistory = std::vector<Trial>;

struct HpoResult {
    std::string function_id;
    TrialHistory history;
    Configuration best_config;
    double best_score = 0.0;
    double y_hpo = 0.0; ///< best raw objective value over every run of every trial
};

void to_json(nlohmann::json &j, const Trial &t);
void from_json(const nlohmann::json &j, Trial &t);
void to_json(nlohmann::json &j, const HpoResult &r);
void from_json(const nlohmann::json &j, HpoResult &r);

} // namespace laac
