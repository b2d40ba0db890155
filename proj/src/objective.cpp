#include "laac/objective.hpp"

#include "laac/errors.hpp"

#include <algorithm>

namespace laac {

ObjectiveFunction::ObjectiveFunction(std::string id, std::size_t dimension, std::optional<double> known_optimum)
    : id_(std::move(id)), dimension_(dimension), known_optimum_(known_optimum) {
    if (dimension_ == 0) {
        throw ParameterError("objective dimension must be positive");
    }
}

double ObjectiveFunction::operator()(std::span<const double> x) const {
    if (x.size() != dimension_) {
        throw ParameterError("point dimension " + std::to_string(x.size()) + " does not match function dimension " +
                             std::to_string(dimension_));
    }
    bool inside = true;
    for (double v : x) {
        inside = inside && v >= kLowerBound && v <= kUpperBound;
    }
    if (inside) {
        return evaluate_unclamped(x);
    }
    std::vector<double> clamped(x.begin(), x.end());
    for (auto &v : clamped) {
        v = std::clamp(v, kLowerBound, kUpperBound);
    }
    return evaluate_unclamped(clamped);
}

} // namespace laac
