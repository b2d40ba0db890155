#include "laac/tpe.hpp"

#include "laac/cmaes.hpp"
#include "laac/errors.hpp"
#include "laac/metrics.hpp"
#include "laac/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace laac {

namespace {

constexpr double kPriorMean = 0.5;
constexpr double kPriorSigma = 1.0;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Mixture of Gaussians truncated to [0, 1] (values are normalized to the unit interval).
class Parzen {
public:
    Parzen(std::vector<double> obs, const TpeOptions &opt) {
        std::sort(obs.begin(), obs.end());
        const std::size_t n = obs.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i > 0 ? obs[i] - obs[i - 1] : obs[i];
            const double right = i + 1 < n ? obs[i + 1] - obs[i] : 1.0 - obs[i];
            add(obs[i], std::clamp(std::max(left, right), opt.bandwidth_floor, kPriorSigma), 1.0);
        }
        add(kPriorMean, kPriorSigma, opt.prior_weight);
        const double total = std::accumulate(weight_.begin(), weight_.end(), 0.0);
        for (auto &w : weight_) {
            w /= total;
        }
    }

    double log_pdf(double x) const {
        double p = 0.0;
        for (std::size_t k = 0; k < mu_.size(); ++k) {
            const double z = (x - mu_[k]) / sigma_[k];
            p += weight_[k] * std::exp(-0.5 * z * z) / (sigma_[k] * std::sqrt(2.0 * M_PI) * mass_[k]);
        }
        return std::log(std::max(p, 1e-300));
    }

    double sample(Rng &rng) const {
        const double u = uniform01(rng);
        std::size_t k = 0;
        double acc = weight_[0];
        while (u > acc && k + 1 < weight_.size()) {
            acc += weight_[++k];
        }
        for (int attempt = 0; attempt < 100; ++attempt) {
            const double x = mu_[k] + sigma_[k] * standard_normal(rng);
            if (x >= 0.0 && x <= 1.0) {
                return x;
            }
        }
        return std::clamp(mu_[k], 0.0, 1.0);
    }

private:
    void add(double mu, double sigma, double weight) {
        mu_.push_back(mu);
        sigma_.push_back(sigma);
        weight_.push_back(weight);
        mass_.push_back(normal_cdf((1.0 - mu) / sigma) - normal_cdf(-mu / sigma));
    }

    std::vector<double> mu_;
    std::vector<double> sigma_;
    std::vector<double> weight_;
    std::vector<double> mass_;
};

std::vector<double> category_probs(const std::vector<std::size_t> &values, std::size_t k, double pseudo) {
    std::vector<double> p(k, pseudo);
    for (auto v : values) {
        p[v] += 1.0;
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto &x : p) {
        x /= total;
    }
    return p;
}

std::size_t sample_category(const std::vector<double> &p, Rng &rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t c = 0; c + 1 < p.size(); ++c) {
        acc += p[c];
        if (u < acc) {
            return c;
        }
    }
    return p.size() - 1;
}

double to_unit(std::size_t k, double v) { return (v - kNumericRanges[k].lo) / kNumericRanges[k].width(); }
double from_unit(std::size_t k, double u) { return kNumericRanges[k].lo + u * kNumericRanges[k].width(); }

} // namespace

TpeSampler::TpeSampler(TpeOptions options, std::uint64_t seed)
    : options_(options), rng_(derive_seed({seed, 0x747065ULL})) {
    if (!(options_.gamma > 0.0 && options_.gamma < 1.0) || options_.n_candidates == 0) {
        throw ParameterError("invalid TPE options");
    }
}

Configuration TpeSampler::propose(const TrialHistory &history) {
    if (history.size() < std::max<std::size_t>(options_.n_startup, 2)) {
        return sample_uniform();
    }
    return sample_model(history);
}

Configuration TpeSampler::sample_uniform() {
    Configuration c;
    c.lambda = static_cast<int>(kLambdaRange.lo) + static_cast<int>(uniform_index(rng_, 46));
    for (std::size_t k = 1; k < kNumericCount; ++k) {
        c.set_numeric(k, uniform(rng_, kNumericRanges[k].lo, kNumericRanges[k].hi));
    }
    if (!options_.restrict_to_continuous_hp) {
        for (std::size_t k = 0; k < kCategoricalCount; ++k) {
            c.set_categorical(k, uniform_index(rng_, kCategorySizes[k]));
        }
    }
    return c;
}

Configuration TpeSampler::sample_model(const TrialHistory &history) {
    std::vector<std::size_t> order(history.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return history[a].score < history[b].score; });
    const auto n_good = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(options_.gamma * static_cast<double>(history.size()))));

    std::vector<Parzen> good_num;
    std::vector<Parzen> bad_num;
    for (std::size_t k = 0; k < kNumericCount; ++k) {
        std::vector<double> g;
        std::vector<double> b;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const double u = std::clamp(to_unit(k, history[order[i]].config.numeric(k)), 0.0, 1.0);
            (i < n_good ? g : b).push_back(u);
        }
        good_num.emplace_back(std::move(g), options_);
        bad_num.emplace_back(std::move(b), options_);
    }
    std::vector<std::vector<double>> good_cat;
    std::vector<std::vector<double>> bad_cat;
    for (std::size_t k = 0; k < kCategoricalCount; ++k) {
        std::vector<std::size_t> g;
        std::vector<std::size_t> b;
        for (std::size_t i = 0; i < order.size(); ++i) {
            (i < n_good ? g : b).push_back(history[order[i]].config.categorical(k));
        }
        good_cat.push_back(category_probs(g, kCategorySizes[k], options_.categorical_pseudo_count));
        bad_cat.push_back(category_probs(b, kCategorySizes[k], options_.categorical_pseudo_count));
    }

    Configuration best;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < options_.n_candidates; ++c) {
        Configuration cand;
        double ratio = 0.0;
        for (std::size_t k = 0; k < kNumericCount; ++k) {
            const double u = good_num[k].sample(rng_);
            ratio += good_num[k].log_pdf(u) - bad_num[k].log_pdf(u);
            double v = from_unit(k, u);
            if (k == 0) {
                v = std::clamp(std::round(v), kLambdaRange.lo, kLambdaRange.hi);
            }
            cand.set_numeric(k, std::clamp(v, kNumericRanges[k].lo, kNumericRanges[k].hi));
        }
        if (!options_.restrict_to_continuous_hp) {
            for (std::size_t k = 0; k < kCategoricalCount; ++k) {
                const std::size_t v = sample_category(good_cat[k], rng_);
                ratio += std::log(good_cat[k][v]) - std::log(bad_cat[k][v]);
                cand.set_categorical(k, v);
            }
        }
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = cand;
        }
    }
    return best;
}

namespace {

void finalize(HpoResult &r) {
    const auto best = std::min_element(r.history.begin(), r.history.end(),
                                       [](const Trial &a, const Trial &b) { return a.score < b.score; });
    r.best_config = best->config;
    r.best_score = best->score;
}

} // namespace

HpoResult tpe_optimize(const std::function<double(const Configuration &)> &objective, std::size_t budget,
                       std::uint64_t seed, const TpeOptions &options) {
    if (budget < options.n_startup || budget == 0) {
        throw ParameterError("TPE budget is smaller than the startup count");
    }
    TpeSampler sampler(options, seed);
    HpoResult r;
    r.y_hpo = std::nan("");
    for (std::size_t t = 0; t < budget; ++t) {
        Configuration cfg = sampler.propose(r.history);
        const double score = objective(cfg);
        if (!std::isfinite(score)) {
            throw ParameterError("TPE objective returned a non-finite score");
        }
        r.history.push_back({cfg, score, score});
    }
    finalize(r);
    return r;
}

double guarded_auc(std::span<const double> trace, double y_opt, double y_worst) {
    const double min_range = 1e-12 * std::max(1.0, std::abs(y_opt));
    return auc(trace, y_opt, std::max(y_worst, y_opt + min_range)).value;
}

HpoResult label_function(const ObjectiveFunction &f, double y_worst, const LabelSettings &settings,
                         std::uint64_t seed) {
    if (settings.budget_tpe == 0 || settings.budget_run == 0 || settings.repetitions == 0) {
        throw ParameterError("labeling budgets must be positive");
    }
    if (settings.budget_tpe < settings.tpe.n_startup) {
        throw ParameterError("TPE budget is smaller than the startup count");
    }
    TpeSampler sampler(settings.tpe, seed);
    HpoResult r;
    r.function_id = f.id();
    double running_best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::vector<double>>> traces;
    traces.reserve(settings.budget_tpe);

    for (std::size_t t = 0; t < settings.budget_tpe; ++t) {
        Configuration cfg = sampler.propose(r.history);
        auto &runs = traces.emplace_back();
        std::vector<double> finals;
        for (std::size_t rep = 0; rep < settings.repetitions; ++rep) {
            ConvergenceTrace tr = run_cmaes(f, cfg, settings.budget_run, derive_seed({seed, 0x72756eULL, t, rep}));
            running_best = std::min(running_best, tr.final_best());
            finals.push_back(tr.final_best());
            runs.push_back(std::move(tr.best_so_far));
        }
        std::vector<double> aucs;
        for (const auto &tr : runs) {
            aucs.push_back(guarded_auc(tr, running_best, y_worst));
        }
        r.history.push_back({cfg, median(aucs), median(finals)});
    }

    r.y_hpo = running_best;
    const double y_opt = f.known_optimum() ? std::min(*f.known_optimum(), running_best) : estimate_yopt(running_best);
    for (std::size_t t = 0; t < r.history.size(); ++t) {
        std::vector<double> aucs;
        for (const auto &tr : traces[t]) {
            aucs.push_back(guarded_auc(tr, y_opt, y_worst));
        }
        r.history[t].score = median(aucs);
    }
    finalize(r);
    return r;
}

} // namespace laac
