#pragma once

#include "laac/trial.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace laac {

inline constexpr double kDefaultTieTolerance = 1e-6;
inline constexpr double kAmbiguityThreshold = 0.9;
inline constexpr double kOutlierThreshold = 3.0;

/// Rounds y down to a coarse grid: integers below 10, tens below 100,
/// otherwise the two leading digits. Never exceeds y.
double estimate_yopt(double y_hpo);

/// Kendall tau-b between the tied ranking of `scores` and the strict ranking
/// that breaks ties in input order. Returns 0 when every score is tied.
double ranking_ambiguity(std::span<const double> scores, double tie_tolerance = kDefaultTieTolerance);

/// (y - mean) / sample std. Throws ParameterError for fewer than 3 values or zero spread.
double optimum_outlier(double y_opt_found, std::span<const double> final_values);

struct SelectionVerdict {
    std::string function_id;
    double y_opt = 0.0;
    double kendall_tau = 0.0;
    double z_score = 0.0;
    bool ambiguous = false;
    bool outlier = false;
    bool accepted = false;
    std::vector<std::string> reasons;
};

SelectionVerdict screen(const HpoResult &hpo, double tie_tolerance = kDefaultTieTolerance);

/// Ledger columns: function_id, y_opt, tau, z, accepted, reasons (joined by ';').
void write_verdicts_csv(const std::filesystem::path &path, const std::vector<SelectionVerdict> &verdicts);

} // namespace laac
