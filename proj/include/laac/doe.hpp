#pragma once

#include "laac/objective.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace laac {

/// Design of experiments: sample points and their (min-max normalized) objective values.
struct Doe {
    Eigen::MatrixXd x;      ///< n x d, rows inside the box
    Eigen::VectorXd y;      ///< normalized to [0, 1] unless degenerate
    double y_raw_min = 0.0;
    double y_raw_max = 0.0;
    bool degenerate = false; ///< constant objective; y is all zeros

    std::size_t size() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(x.cols()); }
};

/// Latin hypercube over [lb, ub]^d with n = samples_per_dim * d rows.
Eigen::MatrixXd latin_hypercube(std::size_t n, std::size_t d, double lb, double ub, std::uint64_t seed);

/// Builds a Doe from raw objective values, applying min-max normalization.
Doe make_doe(Eigen::MatrixXd x, const Eigen::VectorXd &y_raw);

/// Throws ParameterError when samples_per_dim < 10. A constant objective
/// yields a degenerate Doe rather than an error.
Doe sample_doe(const ObjectiveFunction &f, std::size_t samples_per_dim, std::uint64_t seed);

} // namespace laac
