#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace laac {

inline constexpr double kLowerBound = -5.0;
inline constexpr double kUpperBound = 5.0;

/// A bounded, deterministic scalar function on [-5, 5]^d.
///
/// Calls through operator() clamp the point coordinate-wise into the box
/// before evaluation. Implementations are immutable after construction, so
/// evaluation is safe from any number of threads.
class ObjectiveFunction {
public:
    ObjectiveFunction(std::string id, std::size_t dimension, std::optional<double> known_optimum = std::nullopt);
    virtual ~ObjectiveFunction() = default;

    ObjectiveFunction(const ObjectiveFunction &) = delete;
    ObjectiveFunction &operator=(const ObjectiveFunction &) = delete;

    const std::string &id() const noexcept { return id_; }
    std::size_t dimension() const noexcept { return dimension_; }
    double lower_bound() const noexcept { return kLowerBound; }
    double upper_bound() const noexcept { return kUpperBound; }
    const std::optional<double> &known_optimum() const noexcept { return known_optimum_; }

    double operator()(std::span<const double> x) const;
    double evaluate(std::span<const double> x) const { return (*this)(x); }

    /// Evaluation without clamping. Used by compositions that shift their
    /// argument (MA-BBOB components may be queried outside the box).
    virtual double evaluate_unclamped(std::span<const double> x) const = 0;

protected:
    void set_known_optimum(std::optional<double> value) noexcept { known_optimum_ = value; }

private:
    std::string id_;
    std::size_t dimension_;
    std::optional<double> known_optimum_;
};

using FunctionPtr = std::shared_ptr<const ObjectiveFunction>;

} // namespace laac
