#pragma once

#include <json.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace laac {

enum class Mirrored { none, mirrored, mirrored_pairwise };
enum class WeightsScheme { default_, equal, half_power_lambda };

std::string_view to_string(Mirrored m) noexcept;
std::string_view to_string(WeightsScheme w) noexcept;
Mirrored parse_mirrored(std::string_view s);
WeightsScheme parse_weights_scheme(std::string_view s);

/// Closed interval of one numeric hyperparameter.
struct Range {
    double lo;
    double hi;
    double width() const noexcept { return hi - lo; }
};

inline constexpr Range kLambdaRange{5.0, 50.0};
inline constexpr Range kParentRatioRange{0.3, 0.5};
inline constexpr Range kSigma0Range{0.1, 0.5};
inline constexpr Range kLrSigmaRange{0.0, 1.0};
inline constexpr Range kLrCmaRange{0.0, 1.0};
inline constexpr Range kLrRankMuRange{0.0, 0.35};
inline constexpr Range kLrRankOneRange{0.0, 0.35};

/// Numeric hyperparameters in encoding order.
inline constexpr std::size_t kNumericCount = 7;
inline constexpr std::array<std::string_view, kNumericCount> kNumericNames = {
    "lambda", "parent_ratio", "sigma0", "lr_sigma", "lr_cma", "lr_rank_mu", "lr_rank_one"};
inline constexpr std::array<Range, kNumericCount> kNumericRanges = {
    kLambdaRange, kParentRatioRange, kSigma0Range, kLrSigmaRange, kLrCmaRange, kLrRankMuRange, kLrRankOneRange};

/// Categorical hyperparameters in encoding order, with their category counts.
inline constexpr std::size_t kCategoricalCount = 4;
inline constexpr std::array<std::string_view, kCategoricalCount> kCategoricalNames = {
    "active", "mirrored", "threshold_convergence", "weights_scheme"};
inline constexpr std::array<std::size_t, kCategoricalCount> kCategorySizes = {2, 3, 2, 3};

/// One point of the modular CMA-ES configuration space.
///
/// Learning rates left empty are resolved at run time from the standard
/// CMA-ES formulas; an explicit 0 switches the corresponding update off.
struct Configuration {
    int lambda = 8;
    double parent_ratio = 0.5;
    double sigma0 = 0.2; ///< fraction of the box width
    std::optional<double> lr_sigma;
    std::optional<double> lr_cma;
    std::optional<double> lr_rank_mu;
    std::optional<double> lr_rank_one;
    bool active = false;
    Mirrored mirrored = Mirrored::none;
    bool threshold_convergence = false;
    WeightsScheme weights_scheme = WeightsScheme::default_;

    /// mu = round(parent_ratio * lambda), at least 1.
    int mu() const noexcept;

    /// Throws ParameterError when a field leaves its domain.
    void validate() const;

    /// Numeric value by encoding index; auto learning rates read as NaN.
    double numeric(std::size_t k) const;
    void set_numeric(std::size_t k, double v);
    /// Category index by encoding index.
    std::size_t categorical(std::size_t k) const;
    void set_categorical(std::size_t k, std::size_t category);

    friend bool operator==(const Configuration &, const Configuration &) = default;
};

/// lambda = 4 + floor(3 ln d), parent ratio 0.5, sigma0 0.2, automatic learning
/// rates, every module off.
Configuration default_config(std::size_t dimension);

void to_json(nlohmann::json &j, const Configuration &c);
void from_json(const nlohmann::json &j, Configuration &c);

} // namespace laac
