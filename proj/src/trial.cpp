#include "laac/trial.hpp"

#include <cmath>

namespace laac {

void to_json(nlohmann::json &j, const Trial &t) {
    j = nlohmann::json{{"config", t.config}, {"score", t.score}, {"final_best", t.final_best}};
}

void from_json(const nlohmann::json &j, Trial &t) {
    j.at("config").get_to(t.config);
    t.score = j.at("score").get<double>();
    t.final_best = j.at("final_best").get<double>();
}

void to_json(nlohmann::json &j, const HpoResult &r) {
    j = nlohmann::json{{"function_id", r.function_id},
                       {"y_hpo", std::isfinite(r.y_hpo) ? nlohmann::json(r.y_hpo) : nlohmann::json()},
                       {"best", r.best_config},
                       {"best_score", r.best_score},
                       {"history", r.history}};
}

void from_json(const nlohmann::json &j, HpoResult &r) {
    r.function_id = j.at("function_id").get<std::string>();
    const auto &y = j.at("y_hpo");
    r.y_hpo = y.is_null() ? std::nan("") : y.get<double>();
    j.at("best").get_to(r.best_config);
    r.best_score = j.at("best_score").get<double>();
    j.at("history").get_to(r.history);
}

} // namespace laac
