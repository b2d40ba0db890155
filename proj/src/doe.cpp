#include "laac/doe.hpp"

#include "laac/errors.hpp"
#include "laac/seed.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace laac {

Eigen::MatrixXd latin_hypercube(std::size_t n, std::size_t d, double lb, double ub, std::uint64_t seed) {
    Rng rng(derive_seed({seed, 0x6c6873ULL}));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::vector<std::size_t> strata(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        shuffle(strata, rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(strata[i]) + uniform01(rng)) / static_cast<double>(n);
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lb + (ub - lb) * u;
        }
    }
    return x;
}

Doe make_doe(Eigen::MatrixXd x, const Eigen::VectorXd &y_raw) {
    if (x.rows() != y_raw.size()) {
        throw ParameterError("Doe row count differs from objective count");
    }
    if (x.rows() < 2) {
        throw ParameterError("Doe needs at least two rows");
    }
    for (double v : y_raw) {
        if (!std::isfinite(v)) {
            throw ParameterError("Doe objective values must be finite");
        }
    }
    Doe doe;
    doe.x = std::move(x);
    doe.y_raw_min = y_raw.minCoeff();
    doe.y_raw_max = y_raw.maxCoeff();
    const double range = doe.y_raw_max - doe.y_raw_min;
    const double magnitude = std::max({1.0, std::abs(doe.y_raw_min), std::abs(doe.y_raw_max)});
    if (!(range > 1e-12 * magnitude)) {
        doe.degenerate = true;
        doe.y = Eigen::VectorXd::Zero(y_raw.size());
        return doe;
    }
    doe.y = (y_raw.array() - doe.y_raw_min) / range;
    return doe;
}

Doe sample_doe(const ObjectiveFunction &f, std::size_t samples_per_dim, std::uint64_t seed) {
    if (samples_per_dim < 10) {
        throw ParameterError("samples_per_dim must be at least 10");
    }
    const std::size_t d = f.dimension();
    const std::size_t n = samples_per_dim * d;
    Eigen::MatrixXd x = latin_hypercube(n, d, f.lower_bound(), f.upper_bound(), seed);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    std::vector<double> row(d);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = x(i, static_cast<Eigen::Index>(j));
        }
        y[i] = f(row);
    }
    return make_doe(std::move(x), y);
}

} // namespace laac
