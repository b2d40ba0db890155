#include "laac/ela.hpp"

#include "laac/errors.hpp"
#include "laac/io.hpp"
#include "laac/seed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace laac {

namespace {

constexpr std::array<double, 4> kDispQuantiles = {0.02, 0.05, 0.10, 0.25};
constexpr std::array<const char *, 4> kDispTags = {"02", "05", "10", "25"};

std::vector<std::string> build_names() {
    std::vector<std::string> n = {
        "ela_distr.skewness",
        "ela_distr.kurtosis",
        "ela_distr.number_of_peaks",
        "ela_meta.lin_simple.adj_r2",
        "ela_meta.lin_simple.intercept",
        "ela_meta.lin_simple.coef.min",
        "ela_meta.lin_simple.coef.max",
        "ela_meta.lin_simple.coef.max_by_min",
        "ela_meta.lin_w_interact.adj_r2",
        "ela_meta.quad_simple.adj_r2",
        "ela_meta.quad_simple.cond",
        "ela_meta.quad_w_interact.adj_r2",
    };
    for (const char *metric : {"disp", "disp_manhattan"}) {
        for (const char *stat : {"ratio_mean", "ratio_median", "diff_mean", "diff_median"}) {
            for (const char *q : kDispTags) {
                n.push_back(std::string(metric) + "." + stat + "_" + q);
            }
        }
    }
    for (const char *s : {"nbc.nn_nb.sd_ratio", "nbc.nn_nb.mean_ratio", "nbc.nn_nb.cor", "nbc.dist_ratio.coeff_var",
                          "nbc.nb_fitness.cor"}) {
        n.emplace_back(s);
    }
    for (const char *s : {"pca.expl_var.cov_x", "pca.expl_var.cor_x", "pca.expl_var.cov_init",
                          "pca.expl_var.cor_init", "pca.expl_var_PC1.cov_x", "pca.expl_var_PC1.cor_x",
                          "pca.expl_var_PC1.cov_init", "pca.expl_var_PC1.cor_init"}) {
        n.emplace_back(s);
    }
    for (const char *s : {"ic.h_max", "ic.eps_s", "ic.eps_max", "ic.eps_ratio", "ic.m0"}) {
        n.emplace_back(s);
    }
    return n;
}

double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

double mean(const std::vector<double> &v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double> &v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

/// Sample quantile, linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double vec_cor(const std::vector<double> &a, const std::vector<double> &b) {
    return pearson(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())),
                   Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())));
}

double number_of_peaks(const Eigen::VectorXd &y) {
    const std::vector<double> v(y.begin(), y.end());
    const auto n = static_cast<double>(v.size());
    const double sd = sample_sd(v);
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) {
        spread = sd > 0.0 ? sd : 1.0;
    }
    const double bw = 0.9 * spread * std::pow(n, -0.2);

    constexpr int grid = 512;
    const double lo = y.minCoeff() - 3.0 * bw;
    const double hi = y.maxCoeff() + 3.0 * bw;
    const double step = (hi - lo) / (grid - 1);
    std::vector<double> dens(grid, 0.0);
    const double norm = 1.0 / (n * bw * std::sqrt(2.0 * std::numbers::pi));
    for (int g = 0; g < grid; ++g) {
        const double t = lo + step * g;
        double s = 0.0;
        for (double yi : v) {
            const double u = (t - yi) / bw;
            s += std::exp(-0.5 * u * u);
        }
        dens[static_cast<std::size_t>(g)] = s * norm;
    }
    // split the density at interior local minima and count modes with > 1% mass
    std::vector<int> cuts = {0};
    for (int g = 1; g + 1 < grid; ++g) {
        const auto k = static_cast<std::size_t>(g);
        if (dens[k] < dens[k - 1] && dens[k] <= dens[k + 1]) {
            cuts.push_back(g);
        }
    }
    cuts.push_back(grid - 1);
    int peaks = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        double mass = 0.0;
        for (int g = cuts[c]; g < cuts[c + 1]; ++g) {
            mass += dens[static_cast<std::size_t>(g)] * step;
        }
        if (mass > 0.01) {
            ++peaks;
        }
    }
    return static_cast<double>(std::max(peaks, 1));
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd &x, bool squares, bool interactions) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    Eigen::Index cols = 1 + d + (squares ? d : 0) + (interactions ? d * (d - 1) / 2 : 0);
    Eigen::MatrixXd m(n, cols);
    m.col(0).setOnes();
    m.middleCols(1, d) = x;
    Eigen::Index c = 1 + d;
    if (squares) {
        m.middleCols(c, d) = x.array().square().matrix();
        c += d;
    }
    if (interactions) {
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = i + 1; j < d; ++j) {
                m.col(c++) = x.col(i).cwiseProduct(x.col(j));
            }
        }
    }
    return m;
}

/// Explained-variance features of a covariance-like matrix.
std::pair<double, double> explained_variance(const Eigen::MatrixXd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = solver.eigenvalues().reverse().cwiseMax(0.0);
    const double total = ev.sum();
    if (!(total > 0.0)) {
        return {1.0, 1.0};
    }
    double cum = 0.0;
    Eigen::Index needed = ev.size();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        cum += ev[i];
        if (cum / total >= 0.9) {
            needed = i + 1;
            break;
        }
    }
    return {static_cast<double>(needed) / static_cast<double>(ev.size()), ev[0] / total};
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd &a) {
    const Eigen::MatrixXd centered = a.rowwise() - a.colwise().mean();
    return centered.transpose() * centered / static_cast<double>(a.rows() - 1);
}

Eigen::MatrixXd correlation(const Eigen::MatrixXd &a) {
    Eigen::MatrixXd c = covariance(a);
    const Eigen::VectorXd sd = c.diagonal().cwiseMax(0.0).cwiseSqrt();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            const double denom = sd[i] * sd[j];
            c(i, j) = denom > 0.0 ? c(i, j) / denom : (i == j ? 1.0 : 0.0);
        }
    }
    return c;
}

struct IcResult {
    double h_max, eps_s, eps_max, eps_ratio, m0;
};

IcResult information_content(const Eigen::MatrixXd &x_in, const Eigen::VectorXd &y_in) {
    const Eigen::Index n = x_in.rows();
    const Eigen::Index d = x_in.cols();

    // canonical order: rows sorted lexicographically by (x, y)
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (x_in(a, j) != x_in(b, j)) {
                return x_in(a, j) < x_in(b, j);
            }
        }
        return y_in[a] < y_in[b];
    });
    Eigen::MatrixXd x(n, d);
    Eigen::VectorXd y(n);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = order[static_cast<std::size_t>(i)];
        x.row(i) = x_in.row(src);
        y[i] = y_in[src];
        for (Eigen::Index j = 0; j <= d; ++j) {
            const double v = j < d ? x(i, j) : y[i];
            std::uint64_t bits = 0;
            std::memcpy(&bits, &v, sizeof bits);
            h = splitmix64(h ^ bits);
        }
    }

    // nearest-neighbour tour from a sample-derived start
    Rng rng(h);
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> tour;
    tour.reserve(static_cast<std::size_t>(n));
    Eigen::Index current = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
    visited[static_cast<std::size_t>(current)] = 1;
    tour.push_back(current);
    for (Eigen::Index step = 1; step < n; ++step) {
        Eigen::Index best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (visited[static_cast<std::size_t>(j)] != 0) {
                continue;
            }
            const double dist = (x.row(j) - x.row(current)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = j;
            }
        }
        current = best;
        visited[static_cast<std::size_t>(current)] = 1;
        tour.push_back(current);
    }

    std::vector<double> ratio;
    ratio.reserve(static_cast<std::size_t>(n - 1));
    for (std::size_t i = 0; i + 1 < tour.size(); ++i) {
        const double dist = (x.row(tour[i + 1]) - x.row(tour[i])).norm();
        ratio.push_back(safe_div(y[tour[i + 1]] - y[tour[i]], dist));
    }

    auto symbols = [&](double eps) {
        std::vector<int> s(ratio.size());
        for (std::size_t i = 0; i < ratio.size(); ++i) {
            s[i] = ratio[i] > eps ? 1 : (ratio[i] < -eps ? -1 : 0);
        }
        return s;
    };
    auto entropy = [](const std::vector<int> &s) {
        if (s.size() < 2) {
            return 0.0;
        }
        std::array<double, 9> counts{};
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            counts[static_cast<std::size_t>((s[i] + 1) * 3 + (s[i + 1] + 1))] += 1.0;
        }
        const auto pairs = static_cast<double>(s.size() - 1);
        double e = 0.0;
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) {
                const double c = counts[static_cast<std::size_t>(p * 3 + q)];
                if (p != q && c > 0.0) {
                    const double prob = c / pairs;
                    e -= prob * std::log(prob) / std::log(6.0);
                }
            }
        }
        return e;
    };
    auto partial_information = [](const std::vector<int> &s) {
        int last = 0;
        int changes = 0;
        for (int v : s) {
            if (v != 0 && v != last) {
                ++changes;
                last = v;
            }
        }
        return s.empty() ? 0.0 : static_cast<double>(changes) / static_cast<double>(s.size());
    };

    IcResult r{};
    r.m0 = partial_information(symbols(0.0));
    r.h_max = -1.0;
    r.eps_s = std::numeric_limits<double>::quiet_NaN();
    r.eps_ratio = -5.0;
    for (int k = 0; k <= 400; ++k) {
        const double log_eps = -5.0 + 0.05 * k;
        const auto s = symbols(std::pow(10.0, log_eps));
        const double e = entropy(s);
        if (e > r.h_max) {
            r.h_max = e;
            r.eps_max = log_eps;
        }
        if (std::isnan(r.eps_s) && e < 0.05) {
            r.eps_s = log_eps;
        }
        if (partial_information(s) > 0.5 * r.m0) {
            r.eps_ratio = log_eps;
        }
    }
    if (std::isnan(r.eps_s)) {
        r.eps_s = 15.0;
    }
    return r;
}

} // namespace

namespace ela_detail {

double skewness(const Eigen::VectorXd &y) {
    const double n = static_cast<double>(y.size());
    const double m = y.mean();
    const Eigen::ArrayXd c = y.array() - m;
    const double m2 = c.square().sum() / n;
    const double m3 = (c * c * c).sum() / n;
    if (!(m2 > 0.0)) {
        return 0.0;
    }
    return m3 / std::pow(m2, 1.5) * std::pow((n - 1.0) / n, 1.5);
}

double kurtosis(const Eigen::VectorXd &y) {
    const double n = static_cast<double>(y.size());
    const double m = y.mean();
    const Eigen::ArrayXd c = y.array() - m;
    const double m2 = c.square().sum() / n;
    const double m4 = c.square().square().sum() / n;
    if (!(m2 > 0.0)) {
        return 0.0;
    }
    const double ratio = (n - 1.0) / n;
    return m4 / (m2 * m2) * ratio * ratio - 3.0;
}

LinearFit least_squares(const Eigen::MatrixXd &design, const Eigen::VectorXd &y) {
    LinearFit fit;
    fit.coef = design.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd residual = y - design * fit.coef;
    const double ss_res = residual.squaredNorm();
    const double ss_tot = (y.array() - y.mean()).square().sum();
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    const double n = static_cast<double>(design.rows());
    const double p = static_cast<double>(design.cols() - 1);
    fit.adj_r2 = n - p - 1.0 > 0.0 ? 1.0 - (1.0 - r2) * (n - 1.0) / (n - p - 1.0) : r2;
    return fit;
}

} // namespace ela_detail

using namespace ela_detail;

const std::vector<std::string> &ela_feature_names() {
    static const std::vector<std::string> names = build_names();
    return names;
}

double ElaVector::at(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return values[i];
        }
    }
    throw SchemaError("unknown feature '" + std::string(name) + "'");
}

double pearson(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
    if (a.size() != b.size() || a.size() < 2) {
        return 0.0;
    }
    const Eigen::ArrayXd ca = a.array() - a.mean();
    const Eigen::ArrayXd cb = b.array() - b.mean();
    const double denom = std::sqrt(ca.square().sum() * cb.square().sum());
    return denom > 0.0 ? (ca * cb).sum() / denom : 0.0;
}

ElaVector compute_ela(const Doe &doe) {
    if (doe.degenerate) {
        throw ParameterError("reject function: degenerate Doe (constant objective)");
    }
    const Eigen::MatrixXd &x = doe.x;
    const Eigen::VectorXd &y = doe.y;
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    if (n < 3) {
        throw ParameterError("Doe too small for feature computation");
    }

    std::vector<double> f;
    f.reserve(ela_feature_names().size());

    // y-distribution
    f.push_back(skewness(y));
    f.push_back(kurtosis(y));
    f.push_back(number_of_peaks(y));

    // meta-models
    {
        const auto lin = least_squares(design_matrix(x, false, false), y);
        const Eigen::VectorXd abs_coef = lin.coef.tail(d).cwiseAbs();
        f.push_back(lin.adj_r2);
        f.push_back(lin.coef[0]);
        f.push_back(abs_coef.minCoeff());
        f.push_back(abs_coef.maxCoeff());
        f.push_back(safe_div(abs_coef.maxCoeff(), abs_coef.minCoeff()));
        f.push_back(least_squares(design_matrix(x, false, true), y).adj_r2);
        const auto quad = least_squares(design_matrix(x, true, false), y);
        const Eigen::VectorXd quad_abs = quad.coef.tail(d).cwiseAbs();
        f.push_back(quad.adj_r2);
        f.push_back(safe_div(quad_abs.maxCoeff(), quad_abs.minCoeff()));
        f.push_back(least_squares(design_matrix(x, true, true), y).adj_r2);
    }

    // pairwise distances, shared by dispersion and nearest-better features
    Eigen::MatrixXd dist(n, n);
    Eigen::MatrixXd manhattan(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        manhattan(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto diff = (x.row(i) - x.row(j)).array();
            dist(i, j) = dist(j, i) = std::sqrt(diff.square().sum());
            manhattan(i, j) = manhattan(j, i) = diff.abs().sum();
        }
    }

    // dispersion
    const std::vector<double> yv(y.begin(), y.end());
    for (const Eigen::MatrixXd *dm : {&dist, &manhattan}) {
        auto pair_stats = [&](const std::vector<Eigen::Index> &idx) {
            std::vector<double> ds;
            ds.reserve(idx.size() * (idx.size() - 1) / 2);
            for (std::size_t a = 0; a < idx.size(); ++a) {
                for (std::size_t b = a + 1; b < idx.size(); ++b) {
                    ds.push_back((*dm)(idx[a], idx[b]));
                }
            }
            return std::pair{mean(ds), median(std::move(ds))};
        };
        std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        const auto [mean_all, median_all] = pair_stats(all);

        std::array<std::pair<double, double>, 4> sub{};
        for (std::size_t q = 0; q < kDispQuantiles.size(); ++q) {
            const double threshold = quantile(yv, kDispQuantiles[q]);
            std::vector<Eigen::Index> idx;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (y[i] <= threshold) {
                    idx.push_back(i);
                }
            }
            if (idx.size() < 2) {
                // fall back to the two best points
                std::vector<Eigen::Index> ranked = all;
                std::partial_sort(ranked.begin(), ranked.begin() + 2, ranked.end(),
                                  [&](Eigen::Index a, Eigen::Index b) { return y[a] < y[b]; });
                idx.assign(ranked.begin(), ranked.begin() + 2);
            }
            sub[q] = pair_stats(idx);
        }
        for (const auto &s : sub) {
            f.push_back(safe_div(s.first, mean_all));
        }
        for (const auto &s : sub) {
            f.push_back(safe_div(s.second, median_all));
        }
        for (const auto &s : sub) {
            f.push_back(s.first - mean_all);
        }
        for (const auto &s : sub) {
            f.push_back(s.second - median_all);
        }
    }

    // nearest-better clustering
    {
        std::vector<double> nn_all(static_cast<std::size_t>(n));
        std::vector<double> nn;
        std::vector<double> nb;
        std::vector<double> indegree(static_cast<std::size_t>(n), 0.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            double best_nn = std::numeric_limits<double>::infinity();
            double best_nb = std::numeric_limits<double>::infinity();
            Eigen::Index nb_idx = -1;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) {
                    continue;
                }
                best_nn = std::min(best_nn, dist(i, j));
                if (y[j] < y[i] && dist(i, j) < best_nb) {
                    best_nb = dist(i, j);
                    nb_idx = j;
                }
            }
            nn_all[static_cast<std::size_t>(i)] = best_nn;
            if (nb_idx >= 0) {
                nn.push_back(best_nn);
                nb.push_back(best_nb);
                indegree[static_cast<std::size_t>(nb_idx)] += 1.0;
            }
        }
        std::vector<double> ratio(nn.size());
        for (std::size_t k = 0; k < nn.size(); ++k) {
            ratio[k] = safe_div(nn[k], nb[k]);
        }
        f.push_back(safe_div(sample_sd(nn), sample_sd(nb)));
        f.push_back(safe_div(mean(nn), mean(nb)));
        f.push_back(vec_cor(nn, nb));
        f.push_back(safe_div(sample_sd(ratio), mean(ratio)));
        f.push_back(vec_cor(indegree, yv));
    }

    // principal components
    {
        Eigen::MatrixXd xy(n, d + 1);
        xy.leftCols(d) = x;
        xy.col(d) = y;
        const auto cov_x = explained_variance(covariance(x));
        const auto cor_x = explained_variance(correlation(x));
        const auto cov_init = explained_variance(covariance(xy));
        const auto cor_init = explained_variance(correlation(xy));
        f.push_back(cov_x.first);
        f.push_back(cor_x.first);
        f.push_back(cov_init.first);
        f.push_back(cor_init.first);
        f.push_back(cov_x.second);
        f.push_back(cor_x.second);
        f.push_back(cov_init.second);
        f.push_back(cor_init.second);
    }

    // information content
    {
        const auto ic = information_content(x, y);
        f.push_back(ic.h_max);
        f.push_back(ic.eps_s);
        f.push_back(ic.eps_max);
        f.push_back(ic.eps_ratio);
        f.push_back(ic.m0);
    }

    for (auto &v : f) {
        if (!std::isfinite(v)) {
            v = 0.0;
        }
    }
    return ElaVector{ela_feature_names(), std::move(f)};
}

void FeatureMatrix::append(const std::string &id, const ElaVector &v) {
    if (names.empty() && values.rows() == 0) {
        names = v.names;
    }
    if (v.names != names) {
        throw SchemaError("feature vector ordering differs from matrix ordering");
    }
    const Eigen::Index r = values.rows();
    Eigen::MatrixXd grown(r + 1, static_cast<Eigen::Index>(names.size()));
    if (r > 0) {
        grown.topRows(r) = values;
    }
    for (std::size_t j = 0; j < names.size(); ++j) {
        grown(r, static_cast<Eigen::Index>(j)) = v.values[j];
    }
    values = std::move(grown);
    row_ids.push_back(id);
}

Eigen::VectorXd FeatureMatrix::column(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw SchemaError("unknown feature '" + std::string(name) + "'");
    }
    return values.col(it - names.begin());
}

void write_feature_csv(const std::filesystem::path &path, const FeatureMatrix &m) {
    std::ostringstream out;
    out << "function_id";
    for (const auto &n : m.names) {
        out << ',' << n;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        out << m.row_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
            out << ',' << format_double(m.values(i, j));
        }
        out << '\n';
    }
    write_file_atomic(path, out.str());
}

FeatureMatrix read_feature_csv(const std::filesystem::path &path) {
    const auto table = read_csv(path);
    FeatureMatrix m;
    m.names.assign(table.header.begin() + 1, table.header.end());
    m.values.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(m.names.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        m.row_ids.push_back(table.rows[i][0]);
        for (std::size_t j = 0; j < m.names.size(); ++j) {
            m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(table.rows[i][j + 1]);
        }
    }
    return m;
}

std::vector<std::string> prune_correlated(const FeatureMatrix &m, double threshold) {
    if (m.values.rows() < 3) {
        throw ParameterError("prune_correlated needs at least 3 rows");
    }
    if (!m.values.allFinite()) {
        throw ParameterError("prune_correlated needs a finite matrix");
    }
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
        const Eigen::VectorXd col = m.values.col(j);
        if (!((col.array() - col.mean()).square().sum() > 0.0)) {
            continue;
        }
        const bool correlated = std::any_of(kept.begin(), kept.end(), [&](Eigen::Index k) {
            return std::abs(pearson(col, m.values.col(k))) > threshold;
        });
        if (!correlated) {
            kept.push_back(j);
        }
    }
    std::vector<std::string> out;
    for (auto k : kept) {
        out.push_back(m.names[static_cast<std::size_t>(k)]);
    }
    return out;
}

FeatureScaler fit_scaler(const FeatureMatrix &m, const std::vector<std::string> &kept) {
    if (m.values.rows() < 2) {
        throw ParameterError("scaler needs at least 2 training rows");
    }
    FeatureScaler s;
    s.names = kept;
    for (const auto &name : kept) {
        const Eigen::VectorXd col = m.column(name);
        s.min.push_back(col.minCoeff());
        s.max.push_back(col.maxCoeff());
    }
    return s;
}

namespace {
double scale_value(double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
} // namespace

std::vector<double> FeatureScaler::apply(const ElaVector &v) const {
    std::vector<double> out;
    out.reserve(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
        out.push_back(scale_value(v.at(names[k]), min[k], max[k]));
    }
    return out;
}

std::vector<double> FeatureScaler::apply_row(const FeatureMatrix &m, Eigen::Index row) const {
    std::vector<double> out;
    out.reserve(names.size());
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto it = std::find(m.names.begin(), m.names.end(), names[k]);
        if (it == m.names.end()) {
            throw SchemaError("unknown feature '" + names[k] + "'");
        }
        out.push_back(scale_value(m.values(row, it - m.names.begin()), min[k], max[k]));
    }
    return out;
}

void to_json(nlohmann::json &j, const FeatureScaler &s) {
    j = nlohmann::json{{"names", s.names}, {"min", s.min}, {"max", s.max}};
}

void from_json(const nlohmann::json &j, FeatureScaler &s) {
    j.at("names").get_to(s.names);
    j.at("min").get_to(s.min);
    j.at("max").get_to(s.max);
    if (s.min.size() != s.names.size() || s.max.size() != s.names.size()) {
        throw SchemaError("scaler arrays have inconsistent lengths");
    }
}

} // namespace laac
