#include "laac/selection.hpp"

#include "laac/errors.hpp"
#include "laac/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace laac {

double estimate_yopt(double y_hpo) {
    if (!std::isfinite(y_hpo)) {
        throw ParameterError("y_hpo must be finite");
    }
    const double mag = std::abs(y_hpo);
    if (mag < 10.0) {
        return std::floor(y_hpo);
    }
    if (mag < 100.0) {
        return std::floor(y_hpo / 10.0) * 10.0;
    }
    const double unit = std::pow(10.0, std::floor(std::log10(mag)) - 1.0);
    return std::floor(y_hpo / unit) * unit;
}

double ranking_ambiguity(std::span<const double> scores, double tie_tolerance) {
    const std::size_t n = scores.size();
    if (n < 2) {
        throw ParameterError("ranking ambiguity needs at least 2 scores");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // neighbours within the tolerance share a rank; ties chain through the sorted order
    double tied_pairs = 0.0;
    std::size_t run = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        if (k < n && scores[order[k]] - scores[order[k - 1]] <= tie_tolerance) {
            ++run;
            continue;
        }
        tied_pairs += 0.5 * static_cast<double>(run) * static_cast<double>(run - 1);
        run = 1;
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    if (tied_pairs >= pairs) {
        return 0.0;
    }
    // the strict ranking refines the tied one: untied pairs are all concordant
    return std::sqrt((pairs - tied_pairs) / pairs);
}

double optimum_outlier(double y_opt_found, std::span<const double> final_values) {
    const std::size_t n = final_values.size();
    if (n < 3) {
        throw ParameterError("outlier test needs at least 3 values");
    }
    const double mean = std::accumulate(final_values.begin(), final_values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : final_values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
        throw ParameterError("outlier test needs a positive standard deviation");
    }
    return (y_opt_found - mean) / sd;
}

SelectionVerdict screen(const HpoResult &hpo, double tie_tolerance) {
    SelectionVerdict v;
    v.function_id = hpo.function_id;
    v.y_opt = estimate_yopt(hpo.y_hpo);

    std::vector<double> scores;
    std::vector<double> finals;
    for (const auto &t : hpo.history) {
        scores.push_back(t.score);
        finals.push_back(t.final_best);
    }
    v.kendall_tau = scores.size() >= 2 ? ranking_ambiguity(scores, tie_tolerance) : 0.0;
    v.ambiguous = v.kendall_tau < kAmbiguityThreshold;
    if (v.ambiguous) {
        v.reasons.push_back("ambiguous ranking (tau=" + format_double(v.kendall_tau) + ")");
    }

    try {
        v.z_score = optimum_outlier(hpo.y_hpo, finals);
        v.outlier = std::abs(v.z_score) > kOutlierThreshold;
        if (v.outlier) {
            v.reasons.push_back("optimum outlier (z=" + format_double(v.z_score) + ")");
        }
    } catch (const ParameterError &) {
        // no spread in final values: the outlier test cannot run, treat as ambiguous
        v.z_score = 0.0;
        if (!v.ambiguous) {
            v.ambiguous = true;
            v.reasons.push_back("no spread in final values");
        }
    }
    v.accepted = !v.ambiguous && !v.outlier;
    return v;
}

void write_verdicts_csv(const std::filesystem::path &path, const std::vector<SelectionVerdict> &verdicts) {
    std::string out = "function_id,y_opt,tau,z,accepted,reasons\n";
    for (const auto &v : verdicts) {
        std::string reasons;
        for (const auto &r : v.reasons) {
            if (!reasons.empty()) {
                reasons += ';';
            }
            reasons += r;
        }
        std::replace(reasons.begin(), reasons.end(), ',', ' ');
        out += v.function_id + ',' + format_double(v.y_opt) + ',' + format_double(v.kendall_tau) + ',' +
               format_double(v.z_score) + ',' + (v.accepted ? "true" : "false") + ',' + reasons + '\n';
    }
    write_file_atomic(path, out);
}

} // namespace laac
