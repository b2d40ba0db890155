#include "laac/configuration.hpp"

#include "laac/errors.hpp"

#include <cmath>
#include <limits>

namespace laac {

std::string_view to_string(Mirrored m) noexcept {
    switch (m) {
    case Mirrored::mirrored:
        return "mirrored";
    case Mirrored::mirrored_pairwise:
        return "mirrored_pairwise";
    default:
        return "none";
    }
}

std::string_view to_string(WeightsScheme w) noexcept {
    switch (w) {
    case WeightsScheme::equal:
        return "equal";
    case WeightsScheme::half_power_lambda:
        return "half_power_lambda";
    default:
        return "default";
    }
}

Mirrored parse_mirrored(std::string_view s) {
    if (s == "none") {
        return Mirrored::none;
    }
    if (s == "mirrored") {
        return Mirrored::mirrored;
    }
    if (s == "mirrored_pairwise") {
        return Mirrored::mirrored_pairwise;
    }
    throw ParameterError("unknown mirrored option '" + std::string(s) + "'");
}

WeightsScheme parse_weights_scheme(std::string_view s) {
    if (s == "default") {
        return WeightsScheme::default_;
    }
    if (s == "equal") {
        return WeightsScheme::equal;
    }
    if (s == "half_power_lambda") {
        return WeightsScheme::half_power_lambda;
    }
    throw ParameterError("unknown weights scheme '" + std::string(s) + "'");
}

int Configuration::mu() const noexcept {
    return std::max(1, static_cast<int>(std::lround(parent_ratio * lambda)));
}

namespace {

void check(double v, Range r, std::string_view name) {
    if (!(v >= r.lo && v <= r.hi)) {
        throw ParameterError(std::string(name) + " = " + std::to_string(v) + " outside [" + std::to_string(r.lo) +
                             ", " + std::to_string(r.hi) + "]");
    }
}

void check(const std::optional<double> &v, Range r, std::string_view name) {
    if (v) {
        check(*v, r, name);
    }
}

} // namespace

void Configuration::validate() const {
    check(static_cast<double>(lambda), kLambdaRange, "lambda");
    check(parent_ratio, kParentRatioRange, "parent_ratio");
    check(sigma0, kSigma0Range, "sigma0");
    check(lr_sigma, kLrSigmaRange, "lr_sigma");
    check(lr_cma, kLrCmaRange, "lr_cma");
    check(lr_rank_mu, kLrRankMuRange, "lr_rank_mu");
    check(lr_rank_one, kLrRankOneRange, "lr_rank_one");
}

double Configuration::numeric(std::size_t k) const {
    const auto opt = [](const std::optional<double> &v) { return v.value_or(std::numeric_limits<double>::quiet_NaN()); };
    switch (k) {
    case 0:
        return static_cast<double>(lambda);
    case 1:
        return parent_ratio;
    case 2:
        return sigma0;
    case 3:
        return opt(lr_sigma);
    case 4:
        return opt(lr_cma);
    case 5:
        return opt(lr_rank_mu);
    case 6:
        return opt(lr_rank_one);
    default:
        throw ParameterError("numeric hyperparameter index out of range");
    }
}

void Configuration::set_numeric(std::size_t k, double v) {
    switch (k) {
    case 0:
        lambda = static_cast<int>(std::lround(v));
        break;
    case 1:
        parent_ratio = v;
        break;
    case 2:
        sigma0 = v;
        break;
    case 3:
        lr_sigma = v;
        break;
    case 4:
        lr_cma = v;
        break;
    case 5:
        lr_rank_mu = v;
        break;
    case 6:
        lr_rank_one = v;
        break;
    default:
        throw ParameterError("numeric hyperparameter index out of range");
    }
}

std::size_t Configuration::categorical(std::size_t k) const {
    switch (k) {
    case 0:
        return active ? 1 : 0;
    case 1:
        return static_cast<std::size_t>(mirrored);
    case 2:
        return threshold_convergence ? 1 : 0;
    case 3:
        return static_cast<std::size_t>(weights_scheme);
    default:
        throw ParameterError("categorical hyperparameter index out of range");
    }
}

void Configuration::set_categorical(std::size_t k, std::size_t category) {
    if (k >= kCategoricalCount || category >= kCategorySizes[k]) {
        throw ParameterError("categorical value out of range");
    }
    switch (k) {
    case 0:
        active = category == 1;
        break;
    case 1:
        mirrored = static_cast<Mirrored>(category);
        break;
    case 2:
        threshold_convergence = category == 1;
        break;
    default:
        weights_scheme = static_cast<WeightsScheme>(category);
        break;
    }
}

Configuration default_config(std::size_t dimension) {
    if (dimension < 2) {
        throw ParameterError("dimension must be at least 2");
    }
    Configuration c;
    c.lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dimension))));
    return c;
}

namespace {

nlohmann::json rate_to_json(const std::optional<double> &v) { return v ? nlohmann::json(*v) : nlohmann::json("auto"); }

std::optional<double> rate_from_json(const nlohmann::json &j) {
    if (j.is_string()) {
        if (j.get<std::string>() != "auto") {
            throw ParameterError("learning rate must be a number or \"auto\"");
        }
        return std::nullopt;
    }
    return j.get<double>();
}

} // namespace

void to_json(nlohmann::json &j, const Configuration &c) {
    j = nlohmann::json{{"lambda", c.lambda},
                       {"parent_ratio", c.parent_ratio},
                       {"sigma0", c.sigma0},
                       {"lr_sigma", rate_to_json(c.lr_sigma)},
                       {"lr_cma", rate_to_json(c.lr_cma)},
                       {"lr_rank_mu", rate_to_json(c.lr_rank_mu)},
                       {"lr_rank_one", rate_to_json(c.lr_rank_one)},
                       {"active", c.active},
                       {"mirrored", to_string(c.mirrored)},
                       {"threshold_convergence", c.threshold_convergence},
                       {"weights_scheme", to_string(c.weights_scheme)}};
}

void from_json(const nlohmann::json &j, Configuration &c) {
    c.lambda = j.at("lambda").get<int>();
    c.parent_ratio = j.at("parent_ratio").get<double>();
    c.sigma0 = j.at("sigma0").get<double>();
    c.lr_sigma = rate_from_json(j.at("lr_sigma"));
    c.lr_cma = rate_from_json(j.at("lr_cma"));
    c.lr_rank_mu = rate_from_json(j.at("lr_rank_mu"));
    c.lr_rank_one = rate_from_json(j.at("lr_rank_one"));
    c.active = j.at("active").get<bool>();
    c.mirrored = parse_mirrored(j.at("mirrored").get<std::string>());
    c.threshold_convergence = j.at("threshold_convergence").get<bool>();
    c.weights_scheme = parse_weights_scheme(j.at("weights_scheme").get<std::string>());
    c.validate();
}

} // namespace laac
