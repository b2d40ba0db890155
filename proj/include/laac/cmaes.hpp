#pragma once

#include "laac/configuration.hpp"
#include "laac/objective.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace laac {

/// Best-so-far objective value after each evaluation.
struct ConvergenceTrace {
    std::vector<double> best_so_far; ///< length == budget, non-increasing
    std::size_t evaluations_used = 0;
    std::size_t covariance_repairs = 0;
    double min_covariance_eigenvalue = 0.0; ///< smallest eigenvalue seen after each update (post repair)

    double final_best() const { return best_so_far.back(); }
};

/// Strategy constants derived from a configuration with every learning rate resolved.
struct StrategyParameters {
    std::vector<double> weights; ///< positive recombination weights, sum 1
    double mu_eff = 0.0;
    double c_sigma = 0.0;
    double c_c = 0.0;
    double c_1 = 0.0;
    double c_mu = 0.0;
    double d_sigma = 0.0;
};

/// Positive recombination weights for `mu` parents, normalized to sum 1.
std::vector<double> recombination_weights(WeightsScheme scheme, int mu);

double effective_mu(const std::vector<double> &weights);

/// Fills every automatic learning rate with the standard CMA-ES default.
Configuration resolve_auto_rates(const Configuration &cfg, std::size_t dimension);

StrategyParameters strategy_parameters(const Configuration &cfg, std::size_t dimension);

struct ThresholdSchedule {
    double initial = 0.2; ///< fraction of the box width
    double decay = 0.5;
};

/// Runs the modular (mu/mu_w, lambda)-CMA-ES for exactly `budget` evaluations
/// or until the covariance degenerates. No restarts. Throws ParameterError when
/// budget < lambda or the configuration is invalid.
ConvergenceTrace run_cmaes(const ObjectiveFunction &f, const Configuration &cfg, std::size_t budget,
                           std::uint64_t seed, const ThresholdSchedule &threshold = {});

/// CSV with columns eval_index (1-based), best_so_far.
void write_trace_csv(const std::filesystem::path &path, const ConvergenceTrace &trace);
ConvergenceTrace read_trace_csv(const std::filesystem::path &path);

} // namespace laac
