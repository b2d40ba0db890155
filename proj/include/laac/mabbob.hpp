#pragma once

#include "laac/bbob.hpp"
#include "laac/objective.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

namespace laac {

/// Weights and target optimum of a many-affine combination of the 24 BBOB functions.
struct MaBbobSpec {
    std::array<double, kBbobFunctionCount> weights{};
    std::vector<double> optimum_location; ///< x_new, strictly inside [-4, 4]^d
    std::uint64_t seed = 0;

    /// Throws ParameterError when the weights or the optimum location are invalid.
    void validate() const;
};

void to_json(nlohmann::json &j, const MaBbobSpec &spec);
void from_json(const nlohmann::json &j, MaBbobSpec &spec);

/// f(x) = exp(sum_i w_i ln(s_i (f_i(x - x_new + x*_i) - f*_i) + eps)) - eps
class MaBbobFunction final : public ObjectiveFunction {
public:
    static constexpr double kEpsilon = 1e-8;
    static constexpr std::size_t kScaleSamples = 1000;

    MaBbobFunction(MaBbobSpec spec, std::size_t dimension);

    double evaluate_unclamped(std::span<const double> x) const override;

    const MaBbobSpec &spec() const noexcept { return spec_; }
    /// Normalization scale per active component, aligned with active_ids().
    const std::vector<double> &scales() const noexcept { return scales_; }
    const std::vector<int> &active_ids() const noexcept { return active_ids_; }

private:
    MaBbobSpec spec_;
    std::vector<int> active_ids_;
    std::vector<double> active_weights_;
    std::vector<double> scales_;
    std::vector<std::shared_ptr<const BbobFunction>> components_;
};

std::shared_ptr<const MaBbobFunction> make_mabbob(const MaBbobSpec &spec, std::size_t dimension);

/// Seeded weight draw: Dirichlet(1) over the 24 components, truncated to the
/// k largest entries (k uniform in 1..max_components) and renormalized; the
/// optimum location is uniform in [-4, 4]^d.
MaBbobSpec sample_mabbob_spec(std::size_t dimension, std::uint64_t seed, std::size_t max_components = 5);

} // namespace laac
