#pragma once

#include "laac/configuration.hpp"
#include "laac/trial.hpp"

#include <map>
#include <span>
#include <string>

namespace laac {

struct AucScore {
    double value = 0.0; ///< in [0, 1], lower is better
    double y_opt = 0.0;
    double y_worst = 0.0;
    std::size_t budget = 0;
};

/// Mean of the clamped, min-max normalized best-so-far values.
/// Throws ParameterError when y_worst <= y_opt or the trace is empty.
AucScore auc(std::span<const double> best_so_far, double y_opt, double y_worst);

/// Configuration with the lowest mean score over all functions. A configuration
/// missing from a function's history is scored with that history's median.
Configuration select_sbs(const std::map<std::string, TrialHistory> &per_function);

/// First configuration with the minimal score.
Configuration select_vbs(const TrialHistory &history);

/// One-sided Wilcoxon signed-rank test of H1: a < b for paired samples.
/// Exact for up to 25 non-zero differences, normal approximation beyond.
double wilcoxon_one_sided(std::span<const double> a, std::span<const double> b);

double median(std::vector<double> values);

} // namespace laac
