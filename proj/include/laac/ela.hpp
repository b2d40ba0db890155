#pragma once

#include "laac/doe.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace laac {

inline constexpr std::string_view kElaManifestVersion = "ela-v1";

/// Names of all computed features, in the global order shared by every ElaVector.
const std::vector<std::string> &ela_feature_names();

/// Feature values keyed by name; `names` is always in manifest order.
struct ElaVector {
    std::vector<std::string> names;
    std::vector<double> values;

    /// Throws SchemaError for an unknown name.
    double at(std::string_view name) const;
};

/// Computes the feature set from a non-degenerate Doe. Every feature uses the
/// sample alone. Throws ParameterError("reject function") on a degenerate Doe.
ElaVector compute_ela(const Doe &doe);

/// Rows are functions, columns follow `names`.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<std::string> row_ids;
    Eigen::MatrixXd values;

    void append(const std::string &id, const ElaVector &v);
    Eigen::VectorXd column(std::string_view name) const;
};

/// CSV with a leading function-id column, features in `names` order.
void write_feature_csv(const std::filesystem::path &path, const FeatureMatrix &m);
FeatureMatrix read_feature_csv(const std::filesystem::path &path);

double pearson(const Eigen::VectorXd &a, const Eigen::VectorXd &b);

/// Greedy pass in column order: a feature is dropped when |r| with an already
/// kept feature exceeds `threshold`; zero-variance features are dropped.
std::vector<std::string> prune_correlated(const FeatureMatrix &m, double threshold = 0.95);

/// Per-feature min-max scaling fitted on training rows.
struct FeatureScaler {
    std::vector<std::string> names;
    std::vector<double> min;
    std::vector<double> max;

    /// Values outside the training range pass through unclipped. Throws SchemaError
    /// when a kept feature is missing from `v`.
    std::vector<double> apply(const ElaVector &v) const;
    std::vector<double> apply_row(const FeatureMatrix &m, Eigen::Index row) const;
};

/// Throws ParameterError for fewer than 2 rows, SchemaError for unknown names.
FeatureScaler fit_scaler(const FeatureMatrix &m, const std::vector<std::string> &kept);

void to_json(nlohmann::json &j, const FeatureScaler &s);
void from_json(const nlohmann::json &j, FeatureScaler &s);

namespace ela_detail {
double skewness(const Eigen::VectorXd &y);
double kurtosis(const Eigen::VectorXd &y);
/// Adjusted R^2 and coefficients (intercept first) of a least-squares fit.
struct LinearFit {
    double adj_r2 = 0.0;
    Eigen::VectorXd coef;
};
LinearFit least_squares(const Eigen::MatrixXd &design, const Eigen::VectorXd &y);
} // namespace ela_detail

} // namespace laac
