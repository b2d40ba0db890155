#include "laac/mabbob.hpp"

#include "laac/errors.hpp"
#include "laac/seed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace laac {

void MaBbobSpec::validate() const {
    double sum = 0.0;
    bool any_positive = false;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw ParameterError("MA-BBOB weights must be finite and nonnegative");
        }
        sum += w;
        any_positive = any_positive || w > 0.0;
    }
    if (!any_positive || std::abs(sum - 1.0) > 1e-9) {
        throw ParameterError("MA-BBOB weights must sum to 1 with at least one positive entry");
    }
    if (optimum_location.empty()) {
        throw ParameterError("MA-BBOB optimum location is empty");
    }
    for (double v : optimum_location) {
        if (!(v > -4.0 && v < 4.0)) {
            throw ParameterError("MA-BBOB optimum location must lie strictly inside [-4, 4]^d");
        }
    }
}

void to_json(nlohmann::json &j, const MaBbobSpec &spec) {
    j = nlohmann::json{{"weights", spec.weights}, {"x_new", spec.optimum_location}, {"seed", spec.seed}};
}

void from_json(const nlohmann::json &j, MaBbobSpec &spec) {
    const auto weights = j.at("weights").get<std::vector<double>>();
    if (weights.size() != static_cast<std::size_t>(kBbobFunctionCount)) {
        throw ParameterError("MA-BBOB spec needs exactly 24 weights");
    }
    std::copy(weights.begin(), weights.end(), spec.weights.begin());
    spec.optimum_location = j.at("x_new").get<std::vector<double>>();
    spec.seed = j.at("seed").get<std::uint64_t>();
}

MaBbobFunction::MaBbobFunction(MaBbobSpec spec, std::size_t dimension)
    : ObjectiveFunction("mabbob_d" + std::to_string(dimension) + "_s" + std::to_string(spec.seed), dimension, 0.0),
      spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.optimum_location.size() != dimension) {
        throw ParameterError("MA-BBOB optimum location dimension does not match");
    }
    for (int i = 0; i < kBbobFunctionCount; ++i) {
        const double w = spec_.weights[static_cast<std::size_t>(i)];
        if (w <= 0.0) {
            continue;
        }
        auto component = make_bbob(i + 1, dimension, derive_seed({spec_.seed, 0x6d61626262ULL, static_cast<std::uint64_t>(i)}));

        // scale = 1 / median(f_i - f*_i) over a seeded uniform sample of the box
        Rng rng(derive_seed({spec_.seed, 0x7363616c65ULL, static_cast<std::uint64_t>(i)}));
        std::vector<double> gaps(kScaleSamples);
        std::vector<double> point(dimension);
        for (auto &g : gaps) {
            for (auto &v : point) {
                v = uniform(rng, kLowerBound, kUpperBound);
            }
            g = std::max(0.0, component->evaluate_unclamped(point) - component->fopt());
        }
        std::nth_element(gaps.begin(), gaps.begin() + kScaleSamples / 2, gaps.end());
        const double median = gaps[kScaleSamples / 2];

        active_ids_.push_back(i + 1);
        active_weights_.push_back(w);
        scales_.push_back(median > 0.0 ? 1.0 / median : 1.0);
        components_.push_back(std::move(component));
    }
}

double MaBbobFunction::evaluate_unclamped(std::span<const double> x) const {
    const std::size_t d = dimension();
    std::vector<double> shifted(d);
    double log_sum = 0.0;
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const auto &c = *components_[k];
        const auto &opt = c.optimum_location();
        for (std::size_t j = 0; j < d; ++j) {
            shifted[j] = x[j] - spec_.optimum_location[j] + opt[static_cast<Eigen::Index>(j)];
        }
        const double gap = std::max(0.0, c.evaluate_unclamped(shifted) - c.fopt());
        log_sum += active_weights_[k] * std::log(scales_[k] * gap + kEpsilon);
    }
    return std::exp(log_sum) - kEpsilon;
}

std::shared_ptr<const MaBbobFunction> make_mabbob(const MaBbobSpec &spec, std::size_t dimension) {
    return std::make_shared<const MaBbobFunction>(spec, dimension);
}

MaBbobSpec sample_mabbob_spec(std::size_t dimension, std::uint64_t seed, std::size_t max_components) {
    if (dimension < 2) {
        throw ParameterError("MA-BBOB dimension must be at least 2");
    }
    max_components = std::clamp<std::size_t>(max_components, 1, kBbobFunctionCount);
    Rng rng(derive_seed({seed, 0x73706563ULL}));

    // Dirichlet(1) == normalized Exp(1) draws
    std::array<double, kBbobFunctionCount> raw{};
    for (auto &w : raw) {
        double u = uniform01(rng);
        while (u <= 0.0) {
            u = uniform01(rng);
        }
        w = -std::log(u);
    }
    const std::size_t keep = 1 + uniform_index(rng, max_components);
    std::array<std::size_t, kBbobFunctionCount> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });

    MaBbobSpec spec;
    spec.seed = seed;
    double total = 0.0;
    for (std::size_t k = 0; k < keep; ++k) {
        total += raw[order[k]];
    }
    for (std::size_t k = 0; k < keep; ++k) {
        spec.weights[order[k]] = raw[order[k]] / total;
    }
    // force an exact unit sum on the largest entry
    const double sum = std::accumulate(spec.weights.begin(), spec.weights.end(), 0.0);
    spec.weights[order[0]] += 1.0 - sum;

    spec.optimum_location.resize(dimension);
    for (auto &v : spec.optimum_location) {
        v = uniform(rng, -3.999, 3.999);
    }
    return spec;
}

} // namespace laac
