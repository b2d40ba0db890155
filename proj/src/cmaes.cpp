#include "laac/cmaes.hpp"

#include "laac/errors.hpp"
#include "laac/io.hpp"
#include "laac/seed.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace laac {

std::vector<double> recombination_weights(WeightsScheme scheme, int mu) {
    if (mu < 1) {
        throw ParameterError("mu must be positive");
    }
    std::vector<double> w(static_cast<std::size_t>(mu));
    for (int i = 0; i < mu; ++i) {
        const double rank = i + 1.0;
        switch (scheme) {
        case WeightsScheme::default_:
            w[static_cast<std::size_t>(i)] = std::log(mu + 0.5) - std::log(rank);
            break;
        case WeightsScheme::equal:
            w[static_cast<std::size_t>(i)] = 1.0;
            break;
        case WeightsScheme::half_power_lambda:
            w[static_cast<std::size_t>(i)] = std::pow(0.5, rank);
            break;
        }
    }
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto &v : w) {
        v /= sum;
    }
    return w;
}

double effective_mu(const std::vector<double> &weights) {
    double s = 0.0;
    double s2 = 0.0;
    for (double w : weights) {
        s += w;
        s2 += w * w;
    }
    return s * s / s2;
}

Configuration resolve_auto_rates(const Configuration &cfg, std::size_t dimension) {
    const double d = static_cast<double>(dimension);
    const double mu_eff = effective_mu(recombination_weights(cfg.weights_scheme, cfg.mu()));
    Configuration out = cfg;
    if (!out.lr_sigma) {
        out.lr_sigma = (mu_eff + 2.0) / (d + mu_eff + 5.0);
    }
    if (!out.lr_cma) {
        out.lr_cma = (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d);
    }
    const double c1 = 2.0 / ((d + 1.3) * (d + 1.3) + mu_eff);
    if (!out.lr_rank_one) {
        out.lr_rank_one = c1;
    }
    if (!out.lr_rank_mu) {
        out.lr_rank_mu = std::min(1.0 - *out.lr_rank_one,
                                  2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((d + 2.0) * (d + 2.0) + mu_eff));
        out.lr_rank_mu = std::max(0.0, *out.lr_rank_mu);
    }
    return out;
}

StrategyParameters strategy_parameters(const Configuration &cfg, std::size_t dimension) {
    const Configuration r = resolve_auto_rates(cfg, dimension);
    const double d = static_cast<double>(dimension);
    StrategyParameters p;
    p.weights = recombination_weights(r.weights_scheme, r.mu());
    p.mu_eff = effective_mu(p.weights);
    p.c_sigma = *r.lr_sigma;
    p.c_c = *r.lr_cma;
    p.c_1 = *r.lr_rank_one;
    p.c_mu = *r.lr_rank_mu;
    p.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (d + 1.0)) - 1.0) + p.c_sigma;
    return p;
}

namespace {

struct Candidate {
    Eigen::VectorXd step; ///< (x - m) / sigma, unclamped
    double value = 0.0;
};

} // namespace

ConvergenceTrace run_cmaes(const ObjectiveFunction &f, const Configuration &cfg, std::size_t budget,
                           std::uint64_t seed, const ThresholdSchedule &threshold) {
    cfg.validate();
    const std::size_t lambda = static_cast<std::size_t>(cfg.lambda);
    if (budget < lambda) {
        throw ParameterError("budget " + std::to_string(budget) + " is smaller than lambda " +
                             std::to_string(lambda));
    }
    const std::size_t dim = f.dimension();
    const auto n = static_cast<Eigen::Index>(dim);
    const double d = static_cast<double>(dim);
    const double lb = f.lower_bound();
    const double ub = f.upper_bound();
    const StrategyParameters sp = strategy_parameters(cfg, dim);
    const std::size_t mu = sp.weights.size();
    const double chi_n = std::sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));

    // negative weights for the active update, scaled per Hansen's bounds
    std::vector<double> neg_weights;
    if (cfg.active && sp.c_mu > 0.0) {
        const std::size_t k = std::min(mu, lambda - std::min(lambda, mu));
        if (k > 0) {
            neg_weights = recombination_weights(cfg.weights_scheme, static_cast<int>(k));
            const double mu_eff_neg = effective_mu(neg_weights);
            const double alpha = std::min({1.0 + sp.c_1 / sp.c_mu, 1.0 + 2.0 * mu_eff_neg / (sp.mu_eff + 2.0),
                                           (1.0 - sp.c_1 - sp.c_mu) / (d * sp.c_mu)});
            for (auto &w : neg_weights) {
                w *= -std::max(0.0, alpha);
            }
        }
    }
    const double weight_sum = 1.0 + std::accumulate(neg_weights.begin(), neg_weights.end(), 0.0);

    Rng rng(derive_seed({seed, 0x636d61ULL}));
    Eigen::VectorXd mean(n);
    for (auto &v : mean) {
        v = uniform(rng, lb, ub);
    }
    double sigma = cfg.sigma0 * (ub - lb);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd scales = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd path_sigma = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd path_c = Eigen::VectorXd::Zero(n);

    ConvergenceTrace trace;
    trace.best_so_far.reserve(budget);
    trace.min_covariance_eigenvalue = 1.0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> point(dim);

    const bool mirrored = cfg.mirrored != Mirrored::none;
    const std::size_t draws = mirrored ? (lambda + 1) / 2 : lambda;

    std::vector<Candidate> pop(lambda);
    for (std::size_t generation = 0; trace.evaluations_used < budget; ++generation) {
        // sample
        for (std::size_t k = 0; k < draws; ++k) {
            Eigen::VectorXd z(n);
            for (auto &v : z) {
                v = standard_normal(rng);
            }
            Eigen::VectorXd y = basis * scales.cwiseProduct(z);
            if (cfg.threshold_convergence) {
                const double remaining =
                    static_cast<double>(budget - trace.evaluations_used) / static_cast<double>(budget);
                const double t = threshold.initial * (ub - lb) * std::pow(remaining, threshold.decay);
                const double length = sigma * y.norm();
                if (length > 0.0 && length < t) {
                    y *= t / length;
                }
            }
            if (mirrored) {
                pop[2 * k].step = y;
                if (2 * k + 1 < lambda) {
                    pop[2 * k + 1].step = -y;
                }
            } else {
                pop[k].step = std::move(y);
            }
        }

        // evaluate
        std::size_t evaluated = 0;
        for (; evaluated < lambda && trace.evaluations_used < budget; ++evaluated) {
            auto &c = pop[evaluated];
            for (std::size_t j = 0; j < dim; ++j) {
                point[j] = std::clamp(mean[static_cast<Eigen::Index>(j)] + sigma * c.step[static_cast<Eigen::Index>(j)], lb, ub);
            }
            c.value = f(point);
            ++trace.evaluations_used;
            // adapt on the step actually taken to the projected point
            for (std::size_t j = 0; j < dim; ++j) {
                const auto k = static_cast<Eigen::Index>(j);
                c.step[k] = (point[j] - mean[k]) / sigma;
            }
            if (c.value < best) {
                best = c.value;
            }
            trace.best_so_far.push_back(best);
        }
        if (evaluated < lambda) {
            break;
        }

        // selection
        std::vector<std::size_t> order(lambda);
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto by_value = [&](std::size_t a, std::size_t b) { return pop[a].value < pop[b].value; };
        std::stable_sort(order.begin(), order.end(), by_value);

        std::vector<std::size_t> parents;
        if (cfg.mirrored == Mirrored::mirrored_pairwise) {
            for (std::size_t k = 0; k < lambda; k += 2) {
                if (k + 1 < lambda && pop[k + 1].value < pop[k].value) {
                    parents.push_back(k + 1);
                } else {
                    parents.push_back(k);
                }
            }
            std::stable_sort(parents.begin(), parents.end(), by_value);
        } else {
            parents = order;
        }
        const std::size_t n_parents = std::min(mu, parents.size());
        std::vector<double> w(sp.weights.begin(), sp.weights.begin() + static_cast<std::ptrdiff_t>(n_parents));
        if (n_parents < mu) {
            const double s = std::accumulate(w.begin(), w.end(), 0.0);
            for (auto &v : w) {
                v /= s;
            }
        }

        Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < n_parents; ++i) {
            y_w += w[i] * pop[parents[i]].step;
        }
        // steps are projected, so this only guards rounding
        mean = (mean + sigma * y_w).cwiseMax(lb).cwiseMin(ub);

        // step-size path and step size
        const Eigen::MatrixXd inv_sqrt = basis * scales.cwiseInverse().asDiagonal() * basis.transpose();
        path_sigma = (1.0 - sp.c_sigma) * path_sigma +
                     std::sqrt(sp.c_sigma * (2.0 - sp.c_sigma) * sp.mu_eff) * (inv_sqrt * y_w);
        sigma *= std::exp(sp.c_sigma / sp.d_sigma * (path_sigma.norm() / chi_n - 1.0));

        const double decay = 1.0 - std::pow(1.0 - sp.c_sigma, 2.0 * static_cast<double>(generation + 1));
        const double hsig_norm = decay > 0.0 ? path_sigma.norm() / std::sqrt(decay) : 0.0;
        const double h_sigma = hsig_norm < (1.4 + 2.0 / (d + 1.0)) * chi_n ? 1.0 : 0.0;

        path_c = (1.0 - sp.c_c) * path_c + h_sigma * std::sqrt(sp.c_c * (2.0 - sp.c_c) * sp.mu_eff) * y_w;

        // covariance
        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n_parents; ++i) {
            const auto &y = pop[parents[i]].step;
            rank_mu += w[i] * y * y.transpose();
        }
        for (std::size_t j = 0; j < neg_weights.size(); ++j) {
            const auto &y = pop[order[lambda - 1 - j]].step;
            const double mahal = (inv_sqrt * y).squaredNorm();
            const double scaled = mahal > 0.0 ? neg_weights[j] * d / mahal : 0.0;
            rank_mu += scaled * y * y.transpose();
        }
        const double delta_h = (1.0 - h_sigma) * sp.c_c * (2.0 - sp.c_c);
        cov = (1.0 + sp.c_1 * delta_h - sp.c_1 - sp.c_mu * weight_sum) * cov +
              sp.c_1 * path_c * path_c.transpose() + sp.c_mu * rank_mu;
        cov = 0.5 * (cov + cov.transpose()).eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        Eigen::VectorXd ev = eig.eigenvalues();
        if (eig.info() != Eigen::Success || !ev.allFinite() || !std::isfinite(sigma)) {
            break;
        }
        if (ev.minCoeff() <= 0.0) {
            ++trace.covariance_repairs;
            ev = ev.cwiseMax(1e-20);
            cov = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
        }
        trace.min_covariance_eigenvalue = std::min(trace.min_covariance_eigenvalue, ev.minCoeff());
        basis = eig.eigenvectors();
        scales = ev.cwiseSqrt();

        // numeric stop: vanishing steps or an ill-conditioned covariance
        if (ev.maxCoeff() > 1e14 * ev.minCoeff() || sigma * scales.maxCoeff() < 1e-14 || sigma > 1e14) {
            break;
        }
    }

    const double last = trace.best_so_far.back();
    trace.best_so_far.resize(budget, last);
    return trace;
}

void write_trace_csv(const std::filesystem::path &path, const ConvergenceTrace &trace) {
    std::string out = "eval_index,best_so_far\n";
    for (std::size_t i = 0; i < trace.best_so_far.size(); ++i) {
        out += std::to_string(i + 1) + ',' + format_double(trace.best_so_far[i]) + '\n';
    }
    write_file_atomic(path, out);
}

ConvergenceTrace read_trace_csv(const std::filesystem::path &path) {
    const CsvTable table = read_csv(path);
    if (table.header != std::vector<std::string>{"eval_index", "best_so_far"}) {
        throw SchemaError("trace CSV must have columns eval_index,best_so_far");
    }
    ConvergenceTrace trace;
    for (const auto &row : table.rows) {
        trace.best_so_far.push_back(parse_double(row.at(1)));
    }
    trace.evaluations_used = trace.best_so_far.size();
    return trace;
}

} // namespace laac
