#pragma once

#include "laac/configuration.hpp"
#include "laac/objective.hpp"
#include "laac/seed.hpp"
#include "laac/trial.hpp"

#include <cstdint>
#include <functional>

namespace laac {

struct TpeOptions {
    double gamma = 0.25;
    std::size_t n_startup = 20;
    std::size_t n_candidates = 24;
    double bandwidth_floor = 0.01; ///< fraction of each domain width
    double prior_weight = 1.0;
    double categorical_pseudo_count = 1.0;
    /// Freeze the four categoricals at their default values.
    bool restrict_to_continuous_hp = false;
};

/// Proposes configurations from a history with the tree-structured Parzen estimator.
class TpeSampler {
public:
    TpeSampler(TpeOptions options, std::uint64_t seed);

    /// Uniform sample while the history is shorter than n_startup, model-based afterwards.
    Configuration propose(const TrialHistory &history);

    const TpeOptions &options() const noexcept { return options_; }

private:
    Configuration sample_uniform();
    Configuration sample_model(const TrialHistory &history);

    TpeOptions options_;
    Rng rng_;
};

/// Minimizes `objective` for `budget` trials. y_hpo is left NaN.
HpoResult tpe_optimize(const std::function<double(const Configuration &)> &objective, std::size_t budget,
                       std::uint64_t seed, const TpeOptions &options = {});

struct LabelSettings {
    std::size_t budget_tpe = 50;
    std::size_t budget_run = 2500;
    std::size_t repetitions = 5;
    TpeOptions tpe;
};

/// Tunes the modular CMA-ES on `f`. Scores are median AUCs normalized by
/// `y_worst` (the worst DoE sample) and the optimum: known_optimum when the
/// function has one, otherwise the rounded-down best value found over the
/// whole search. Scores seen by the search use the running best instead and
/// are recomputed once the search ends.
HpoResult label_function(const ObjectiveFunction &f, double y_worst, const LabelSettings &settings,
                         std::uint64_t seed);

/// AUC normalization with a guarded range: y_worst is lifted above y_opt when
/// the run never got worse than the optimum estimate.
double guarded_auc(std::span<const double> trace, double y_opt, double y_worst);

} // namespace laac
