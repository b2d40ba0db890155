#include "laac/metrics.hpp"

#include "laac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace laac {

double median(std::vector<double> values) {
    if (values.empty()) {
        throw ParameterError("median of an empty list");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

AucScore auc(std::span<const double> best_so_far, double y_opt, double y_worst) {
    if (best_so_far.empty()) {
        throw ParameterError("AUC of an empty trace");
    }
    if (!(y_worst > y_opt)) {
        throw ParameterError("AUC needs y_worst > y_opt");
    }
    const double range = y_worst - y_opt;
    double sum = 0.0;
    for (double v : best_so_far) {
        sum += std::clamp((v - y_opt) / range, 0.0, 1.0);
    }
    return {sum / static_cast<double>(best_so_far.size()), y_opt, y_worst, best_so_far.size()};
}

Configuration select_sbs(const std::map<std::string, TrialHistory> &per_function) {
    if (per_function.empty()) {
        throw ParameterError("SBS selection needs at least one function");
    }
    std::vector<Configuration> pool;
    for (const auto &[id, history] : per_function) {
        if (history.empty()) {
            throw ParameterError("empty history for function " + id);
        }
        for (const auto &t : history) {
            if (std::find(pool.begin(), pool.end(), t.config) == pool.end()) {
                pool.push_back(t.config);
            }
        }
    }
    std::vector<double> totals(pool.size(), 0.0);
    for (const auto &[id, history] : per_function) {
        std::vector<double> scores;
        scores.reserve(history.size());
        for (const auto &t : history) {
            scores.push_back(t.score);
        }
        const double fallback = median(scores);
        for (std::size_t c = 0; c < pool.size(); ++c) {
            const auto it = std::find_if(history.begin(), history.end(),
                                         [&](const Trial &t) { return t.config == pool[c]; });
            totals[c] += it != history.end() ? it->score : fallback;
        }
    }
    const auto best = std::min_element(totals.begin(), totals.end());
    return pool[static_cast<std::size_t>(best - totals.begin())];
}

Configuration select_vbs(const TrialHistory &history) {
    if (history.empty()) {
        throw ParameterError("VBS selection needs a non-empty history");
    }
    const auto best = std::min_element(history.begin(), history.end(),
                                       [](const Trial &a, const Trial &b) { return a.score < b.score; });
    return best->config;
}

double wilcoxon_one_sided(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ParameterError("Wilcoxon test needs paired samples of equal length");
    }
    if (a.size() < 5) {
        throw ParameterError("Wilcoxon test needs at least 5 pairs");
    }
    std::vector<double> diff;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            diff.push_back(a[i] - b[i]);
        }
    }
    const std::size_t n = diff.size();
    if (n == 0) {
        return 1.0;
    }

    // average ranks of |d|, kept doubled so they stay integral
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return std::abs(diff[i]) < std::abs(diff[j]); });
    std::vector<long> rank2(n);
    double tie_term = 0.0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && std::abs(diff[order[end]]) == std::abs(diff[order[start]])) {
            ++end;
        }
        const long doubled = static_cast<long>(start + 1 + end); // (start+1) + end = 2 * mean rank
        for (std::size_t k = start; k < end; ++k) {
            rank2[order[k]] = doubled;
        }
        const double t = static_cast<double>(end - start);
        tie_term += t * t * t - t;
        start = end;
    }
    long w2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diff[i] > 0) {
            w2 += rank2[i];
        }
    }

    if (n <= 25) {
        const long total = std::accumulate(rank2.begin(), rank2.end(), 0L);
        std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
        count[0] = 1.0;
        long reach = 0;
        for (long r : rank2) {
            for (long s = reach; s >= 0; --s) {
                count[static_cast<std::size_t>(s + r)] += count[static_cast<std::size_t>(s)];
            }
            reach += r;
        }
        double at_most = 0.0;
        for (long s = 0; s <= w2; ++s) {
            at_most += count[static_cast<std::size_t>(s)];
        }
        return at_most / std::ldexp(1.0, static_cast<int>(n));
    }

    const double nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (0.5 * static_cast<double>(w2) - mean + 0.5) / std::sqrt(var);
    return std::min(1.0, 0.5 * std::erfc(-z / std::sqrt(2.0)));
}

} // namespace laac
