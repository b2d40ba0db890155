#pragma once

#include "laac/configuration.hpp"
#include "laac/ela.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace laac {

inline constexpr std::string_view kModelVersion = "nncfg-v1";
inline constexpr std::size_t kOneHotWidth = 10; // 2 + 3 + 2 + 3

/// Network target layout: 7 rescaled numeric values, then the one-hot blocks
/// (omitted when the categoricals are frozen).
std::size_t target_width(bool restrict_to_continuous_hp);

/// Every learning rate must be explicit. Throws ParameterError otherwise or
/// when a field leaves its domain.
Eigen::VectorXd encode(const Configuration &cfg, bool restrict_to_continuous_hp = false);

/// Inverse mapping with clamping; lambda is rounded, each categorical block is
/// decoded by argmax (first index on ties). Frozen categoricals take their defaults.
Configuration decode(std::span<const double> raw, bool restrict_to_continuous_hp = false);

struct NnArchitecture {
    int n_hidden = 1;
    int hidden_size = 16;
    int epochs = 100;

    friend bool operator==(const NnArchitecture &, const NnArchitecture &) = default;
};

struct TrainSettings {
    double learning_rate = 1e-3;
    double momentum = 0.9;
    std::size_t batch_size = 32;
};

/// Dense ReLU network with a linear regression head and softmax classification heads.
class Network {
public:
    Network() = default;
    Network(std::size_t input_width, const NnArchitecture &arch, bool restrict_to_continuous_hp, std::uint64_t seed);

    std::size_t input_width() const noexcept { return input_width_; }
    std::size_t output_width() const noexcept { return target_width(restrict_); }
    bool restricted() const noexcept { return restrict_; }

    /// Rows are samples. Regression columns are raw; each head is a softmax distribution.
    Eigen::MatrixXd forward(const Eigen::MatrixXd &x) const;

    /// MSE over the regression block plus the sum of the heads' cross-entropies,
    /// both averaged over rows.
    double loss(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y) const;

    /// Loss and its gradient with respect to parameters() in the same order.
    double loss_and_gradient(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y, Eigen::VectorXd &grad) const;

    Eigen::VectorXd parameters() const;
    void set_parameters(const Eigen::VectorXd &p);
    std::size_t parameter_count() const;

    friend void to_json(nlohmann::json &j, const Network &n);
    friend void from_json(const nlohmann::json &j, Network &n);

private:
    std::size_t input_width_ = 0;
    bool restrict_ = false;
    std::vector<Eigen::MatrixXd> weights_; // out x in
    std::vector<Eigen::VectorXd> biases_;
};

struct LabeledDataset {
    Eigen::MatrixXd x; ///< scaled ELA rows
    Eigen::MatrixXd y; ///< encoded targets
    bool restrict_to_continuous_hp = false;

    std::size_t size() const noexcept { return static_cast<std::size_t>(x.rows()); }
};

/// Mini-batch SGD with momentum. Throws TrainingDiverged on a non-finite loss.
Network train_network(const LabeledDataset &data, const NnArchitecture &arch, std::uint64_t seed,
                      const TrainSettings &settings = {});

struct GridCell {
    NnArchitecture arch;
    double validation_loss = 0.0;
};

struct GridSearchResult {
    NnArchitecture best;
    double best_loss = 0.0;
    std::vector<GridCell> cells;
};

/// Default grid: layers {1,2,3} x sizes {16,32,64,128} x epochs {100,150,200}.
std::vector<NnArchitecture> default_grid();

/// Mean held-out loss of each cell over `splits` seeded 80:20 splits. Ties
/// prefer fewer layers, then smaller width, then fewer epochs.
GridSearchResult grid_search(const LabeledDataset &data, std::uint64_t seed,
                             const std::vector<NnArchitecture> &grid = default_grid(), std::size_t splits = 5,
                             const TrainSettings &settings = {});

struct NnModel {
    NnArchitecture arch;
    FeatureScaler scaler;
    Network network;

    bool restricted() const noexcept { return network.restricted(); }
};

/// Scales the vector with the stored scaler, runs the network, decodes.
/// Throws SchemaError when a kept feature is missing.
Configuration predict(const NnModel &model, const ElaVector &ela);

void to_json(nlohmann::json &j, const NnArchitecture &a);
void from_json(const nlohmann::json &j, NnArchitecture &a);
void to_json(nlohmann::json &j, const NnModel &m);
void from_json(const nlohmann::json &j, NnModel &m);

} // namespace laac
