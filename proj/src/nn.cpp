#include "laac/nn.hpp"

#include "laac/errors.hpp"
#include "laac/seed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace laac {

std::size_t target_width(bool restrict_to_continuous_hp) {
    return kNumericCount + (restrict_to_continuous_hp ? 0 : kOneHotWidth);
}

Eigen::VectorXd encode(const Configuration &cfg, bool restrict_to_continuous_hp) {
    cfg.validate();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target_width(restrict_to_continuous_hp)));
    for (std::size_t k = 0; k < kNumericCount; ++k) {
        const double v = cfg.numeric(k);
        if (std::isnan(v)) {
            throw ParameterError("cannot encode an automatic " + std::string(kNumericNames[k]));
        }
        out[static_cast<Eigen::Index>(k)] = (v - kNumericRanges[k].lo) / kNumericRanges[k].width();
    }
    if (!restrict_to_continuous_hp) {
        std::size_t offset = kNumericCount;
        for (std::size_t k = 0; k < kCategoricalCount; ++k) {
            out[static_cast<Eigen::Index>(offset + cfg.categorical(k))] = 1.0;
            offset += kCategorySizes[k];
        }
    }
    return out;
}

Configuration decode(std::span<const double> raw, bool restrict_to_continuous_hp) {
    if (raw.size() != target_width(restrict_to_continuous_hp)) {
        throw ParameterError("decode: output width mismatch");
    }
    Configuration cfg;
    for (std::size_t k = 0; k < kNumericCount; ++k) {
        const Range r = kNumericRanges[k];
        double v = r.lo + raw[k] * r.width();
        if (k == 0) {
            v = std::round(v);
        }
        cfg.set_numeric(k, std::clamp(v, r.lo, r.hi));
    }
    if (!restrict_to_continuous_hp) {
        std::size_t offset = kNumericCount;
        for (std::size_t k = 0; k < kCategoricalCount; ++k) {
            const auto block = raw.subspan(offset, kCategorySizes[k]);
            cfg.set_categorical(k, static_cast<std::size_t>(std::max_element(block.begin(), block.end()) - block.begin()));
            offset += kCategorySizes[k];
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------

Network::Network(std::size_t input_width, const NnArchitecture &arch, bool restrict_to_continuous_hp,
                 std::uint64_t seed)
    : input_width_(input_width), restrict_(restrict_to_continuous_hp) {
    if (input_width == 0 || arch.n_hidden < 1 || arch.hidden_size < 1) {
        throw ParameterError("invalid network shape");
    }
    Rng rng(derive_seed({seed, 0x6e6e69ULL}));
    std::vector<std::size_t> widths{input_width};
    for (int l = 0; l < arch.n_hidden; ++l) {
        widths.push_back(static_cast<std::size_t>(arch.hidden_size));
    }
    widths.push_back(output_width());
    for (std::size_t l = 1; l < widths.size(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(widths[l - 1]));
        Eigen::MatrixXd w(static_cast<Eigen::Index>(widths[l]), static_cast<Eigen::Index>(widths[l - 1]));
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                w(r, c) = uniform(rng, -limit, limit);
            }
        }
        weights_.push_back(std::move(w));
        biases_.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(widths[l])));
    }
}

namespace {

/// Applies the per-head softmax in place to the logit columns.
void softmax_heads(Eigen::MatrixXd &out) {
    Eigen::Index offset = static_cast<Eigen::Index>(kNumericCount);
    for (std::size_t size : kCategorySizes) {
        auto block = out.middleCols(offset, static_cast<Eigen::Index>(size));
        for (Eigen::Index r = 0; r < block.rows(); ++r) {
            const double m = block.row(r).maxCoeff();
            block.row(r) = (block.row(r).array() - m).exp();
            block.row(r) /= block.row(r).sum();
        }
        offset += static_cast<Eigen::Index>(size);
    }
}

struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations; // input, hidden outputs
    Eigen::MatrixXd output;                   // regression raw, heads as probabilities
};

ForwardCache run_forward(const std::vector<Eigen::MatrixXd> &weights, const std::vector<Eigen::VectorXd> &biases,
                                const Eigen::MatrixXd &x, bool restricted) {
    ForwardCache cache;
    cache.activations.push_back(x);
    for (std::size_t l = 0; l < weights.size(); ++l) {
        Eigen::MatrixXd z = cache.activations.back() * weights[l].transpose();
        z.rowwise() += biases[l].transpose();
        if (l + 1 < weights.size()) {
            cache.activations.push_back(z.cwiseMax(0.0));
        } else {
            cache.output = std::move(z);
        }
    }
    if (!restricted) {
        softmax_heads(cache.output);
    }
    return cache;
}

} // namespace

Eigen::MatrixXd Network::forward(const Eigen::MatrixXd &x) const {
    if (static_cast<std::size_t>(x.cols()) != input_width_) {
        throw ParameterError("network input width mismatch");
    }
    return run_forward(weights_, biases_, x, restrict_).output;
}

namespace {

double loss_from_output(const Eigen::MatrixXd &out, const Eigen::MatrixXd &y, bool restricted) {
    const auto n = static_cast<double>(out.rows());
    const auto reg = static_cast<Eigen::Index>(kNumericCount);
    double loss = (out.leftCols(reg) - y.leftCols(reg)).squaredNorm() / (n * static_cast<double>(kNumericCount));
    if (!restricted) {
        const auto width = static_cast<Eigen::Index>(kOneHotWidth);
        const Eigen::ArrayXXd logp = out.middleCols(reg, width).array().max(1e-300).log();
        loss -= (y.middleCols(reg, width).array() * logp).sum() / n;
    }
    return loss;
}

} // namespace

double Network::loss(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y) const {
    return loss_from_output(forward(x), y, restrict_);
}

double Network::loss_and_gradient(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y, Eigen::VectorXd &grad) const {
    if (static_cast<std::size_t>(x.cols()) != input_width_ || static_cast<std::size_t>(y.cols()) != output_width() ||
        x.rows() != y.rows() || x.rows() == 0) {
        throw ParameterError("training batch shape mismatch");
    }
    const ForwardCache cache = run_forward(weights_, biases_, x, restrict_);
    const double loss = loss_from_output(cache.output, y, restrict_);

    const auto n = static_cast<double>(x.rows());
    const auto reg = static_cast<Eigen::Index>(kNumericCount);
    Eigen::MatrixXd delta(cache.output.rows(), cache.output.cols());
    delta.leftCols(reg) = 2.0 * (cache.output.leftCols(reg) - y.leftCols(reg)) / (n * static_cast<double>(kNumericCount));
    if (!restrict_) {
        // softmax + cross-entropy; holds when each target block sums to one
        const auto width = static_cast<Eigen::Index>(kOneHotWidth);
        delta.middleCols(reg, width) = (cache.output.middleCols(reg, width) - y.middleCols(reg, width)) / n;
    }

    grad.resize(static_cast<Eigen::Index>(parameter_count()));
    std::vector<Eigen::Index> offsets;
    Eigen::Index off = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        offsets.push_back(off);
        off += weights_[l].size() + biases_[l].size();
    }
    for (std::size_t l = weights_.size(); l-- > 0;) {
        const Eigen::MatrixXd dw = delta.transpose() * cache.activations[l];
        Eigen::Index p = offsets[l];
        for (Eigen::Index r = 0; r < dw.rows(); ++r) {
            for (Eigen::Index c = 0; c < dw.cols(); ++c) {
                grad[p++] = dw(r, c);
            }
        }
        grad.segment(p, biases_[l].size()) = delta.colwise().sum().transpose();
        if (l > 0) {
            delta = ((delta * weights_[l]).array() * (cache.activations[l].array() > 0.0).cast<double>()).matrix();
        }
    }
    return loss;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
    }
    return n;
}

Eigen::VectorXd Network::parameters() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) {
                p[k++] = weights_[l](r, c);
            }
        }
        p.segment(k, biases_[l].size()) = biases_[l];
        k += biases_[l].size();
    }
    return p;
}

void Network::set_parameters(const Eigen::VectorXd &p) {
    if (static_cast<std::size_t>(p.size()) != parameter_count()) {
        throw ParameterError("parameter vector size mismatch");
    }
    Eigen::Index k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) {
                weights_[l](r, c) = p[k++];
            }
        }
        biases_[l] = p.segment(k, biases_[l].size());
        k += biases_[l].size();
    }
}

// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd &m, const std::vector<std::size_t> &rows, std::size_t begin,
                          std::size_t end) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), m.cols());
    for (std::size_t i = begin; i < end; ++i) {
        out.row(static_cast<Eigen::Index>(i - begin)) = m.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

} // namespace

Network train_network(const LabeledDataset &data, const NnArchitecture &arch, std::uint64_t seed,
                      const TrainSettings &settings) {
    if (data.size() == 0) {
        throw ParameterError("training set is empty");
    }
    if (settings.batch_size == 0 || arch.epochs < 0) {
        throw ParameterError("invalid training settings");
    }
    Network net(static_cast<std::size_t>(data.x.cols()), arch, data.restrict_to_continuous_hp, seed);
    Eigen::VectorXd params = net.parameters();
    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(params.size());
    Eigen::VectorXd grad;
    Rng rng(derive_seed({seed, 0x626174ULL}));
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    for (int epoch = 0; epoch < arch.epochs; ++epoch) {
        shuffle(rows, rng);
        std::size_t batch = 0;
        for (std::size_t begin = 0; begin < rows.size(); begin += settings.batch_size, ++batch) {
            const std::size_t end = std::min(rows.size(), begin + settings.batch_size);
            const double loss =
                net.loss_and_gradient(take_rows(data.x, rows, begin, end), take_rows(data.y, rows, begin, end), grad);
            if (!std::isfinite(loss) || !grad.allFinite()) {
                throw TrainingDiverged(static_cast<std::size_t>(epoch), batch);
            }
            velocity = settings.momentum * velocity - settings.learning_rate * grad;
            params += velocity;
            net.set_parameters(params);
        }
    }
    return net;
}

std::vector<NnArchitecture> default_grid() {
    std::vector<NnArchitecture> grid;
    for (int layers : {1, 2, 3}) {
        for (int size : {16, 32, 64, 128}) {
            for (int epochs : {100, 150, 200}) {
                grid.push_back({layers, size, epochs});
            }
        }
    }
    return grid;
}

GridSearchResult grid_search(const LabeledDataset &data, std::uint64_t seed, const std::vector<NnArchitecture> &grid,
                             std::size_t splits, const TrainSettings &settings) {
    if (data.size() < 25) {
        throw ParameterError("grid search needs at least 25 rows, got " + std::to_string(data.size()));
    }
    if (grid.empty() || splits == 0) {
        throw ParameterError("grid search needs a non-empty grid and at least one split");
    }
    const std::size_t n = data.size();
    const auto n_val = static_cast<std::size_t>(std::lround(0.2 * static_cast<double>(n)));

    std::vector<std::vector<std::size_t>> permutations;
    for (std::size_t s = 0; s < splits; ++s) {
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        Rng rng(derive_seed({seed, 0x73706cULL, s}));
        shuffle(rows, rng);
        permutations.push_back(std::move(rows));
    }

    GridSearchResult result;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        double total = 0.0;
        for (std::size_t s = 0; s < splits; ++s) {
            const auto &rows = permutations[s];
            LabeledDataset train{take_rows(data.x, rows, n_val, n), take_rows(data.y, rows, n_val, n),
                                 data.restrict_to_continuous_hp};
            const Eigen::MatrixXd vx = take_rows(data.x, rows, 0, n_val);
            const Eigen::MatrixXd vy = take_rows(data.y, rows, 0, n_val);
            try {
                const Network net = train_network(train, grid[c], derive_seed({seed, 0x63656cULL, c, s}), settings);
                total += net.loss(vx, vy);
            } catch (const TrainingDiverged &) {
                total = std::numeric_limits<double>::infinity();
            }
        }
        const double mean = total / static_cast<double>(splits);
        result.cells.push_back({grid[c], std::isfinite(mean) ? mean : std::numeric_limits<double>::infinity()});
    }

    auto key = [](const GridCell &g) {
        return std::make_tuple(g.validation_loss, g.arch.n_hidden, g.arch.hidden_size, g.arch.epochs);
    };
    const auto best = std::min_element(result.cells.begin(), result.cells.end(),
                                       [&](const GridCell &a, const GridCell &b) { return key(a) < key(b); });
    result.best = best->arch;
    result.best_loss = best->validation_loss;
    return result;
}

Configuration predict(const NnModel &model, const ElaVector &ela) {
    const std::vector<double> scaled = model.scaler.apply(ela);
    Eigen::MatrixXd row(1, static_cast<Eigen::Index>(scaled.size()));
    for (std::size_t j = 0; j < scaled.size(); ++j) {
        row(0, static_cast<Eigen::Index>(j)) = scaled[j];
    }
    const Eigen::MatrixXd out = model.network.forward(row);
    const std::vector<double> raw(out.data(), out.data() + out.size());
    return decode(raw, model.restricted());
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json &j, const NnArchitecture &a) {
    j = nlohmann::json{{"n_hidden", a.n_hidden}, {"hidden_size", a.hidden_size}, {"epochs", a.epochs}};
}

void from_json(const nlohmann::json &j, NnArchitecture &a) {
    a.n_hidden = j.at("n_hidden").get<int>();
    a.hidden_size = j.at("hidden_size").get<int>();
    a.epochs = j.at("epochs").get<int>();
}

void to_json(nlohmann::json &j, const Network &n) {
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < n.weights_.size(); ++l) {
        const auto &w = n.weights_[l];
        std::vector<double> flat;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                flat.push_back(w(r, c));
            }
        }
        layers.push_back({{"rows", w.rows()},
                          {"cols", w.cols()},
                          {"weights", flat},
                          {"bias", std::vector<double>(n.biases_[l].data(), n.biases_[l].data() + n.biases_[l].size())}});
    }
    j = nlohmann::json{{"input_width", n.input_width_}, {"restrict_to_continuous_hp", n.restrict_}, {"layers", layers}};
}

void from_json(const nlohmann::json &j, Network &n) {
    n.input_width_ = j.at("input_width").get<std::size_t>();
    n.restrict_ = j.at("restrict_to_continuous_hp").get<bool>();
    n.weights_.clear();
    n.biases_.clear();
    std::size_t prev = n.input_width_;
    for (const auto &layer : j.at("layers")) {
        const auto rows = layer.at("rows").get<Eigen::Index>();
        const auto cols = layer.at("cols").get<Eigen::Index>();
        const auto flat = layer.at("weights").get<std::vector<double>>();
        const auto bias = layer.at("bias").get<std::vector<double>>();
        if (static_cast<std::size_t>(cols) != prev || flat.size() != static_cast<std::size_t>(rows * cols) ||
            bias.size() != static_cast<std::size_t>(rows)) {
            throw ParameterError("model layer shapes are inconsistent");
        }
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                w(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
            }
        }
        n.weights_.push_back(std::move(w));
        n.biases_.push_back(Eigen::Map<const Eigen::VectorXd>(bias.data(), rows));
        prev = static_cast<std::size_t>(rows);
    }
    if (n.weights_.empty() || prev != n.output_width()) {
        throw ParameterError("model output width is inconsistent");
    }
}

void to_json(nlohmann::json &j, const NnModel &m) {
    j = nlohmann::json{{"version", kModelVersion},
                       {"architecture", m.arch},
                       {"features", m.scaler.names},
                       {"scaler", m.scaler},
                       {"network", m.network}};
}

void from_json(const nlohmann::json &j, NnModel &m) {
    if (j.at("version").get<std::string>() != kModelVersion) {
        throw ParameterError("unsupported model version");
    }
    j.at("architecture").get_to(m.arch);
    j.at("scaler").get_to(m.scaler);
    j.at("network").get_to(m.network);
    if (m.network.input_width() != m.scaler.names.size()) {
        throw ParameterError("model input width does not match its feature list");
    }
}

} // namespace laac
