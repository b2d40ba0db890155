#include "laac/bbob.hpp"

#include "laac/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace laac {

namespace bbob_detail {

Eigen::VectorXd t_osz(Eigen::VectorXd x) {
    for (auto &v : x) {
        if (v == 0.0) {
            continue;
        }
        const double xhat = std::log(std::abs(v));
        const double c1 = v > 0 ? 10.0 : 5.5;
        const double c2 = v > 0 ? 7.9 : 3.1;
        const double sign = v > 0 ? 1.0 : -1.0;
        v = sign * std::exp(xhat + 0.049 * (std::sin(c1 * xhat) + std::sin(c2 * xhat)));
    }
    return x;
}

Eigen::VectorXd t_asy(Eigen::VectorXd x, double beta) {
    const auto d = static_cast<double>(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] > 0) {
            const double e = 1.0 + beta * (static_cast<double>(i) / (d - 1.0)) * std::sqrt(x[i]);
            x[i] = std::pow(x[i], e);
        }
    }
    return x;
}

Eigen::VectorXd lambda_diag(std::size_t d, double alpha) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        out[static_cast<Eigen::Index>(i)] =
            std::pow(alpha, 0.5 * static_cast<double>(i) / (static_cast<double>(d) - 1.0));
    }
    return out;
}

double penalty(const Eigen::VectorXd &x) {
    double s = 0.0;
    for (double v : x) {
        const double excess = std::abs(v) - 5.0;
        if (excess > 0) {
            s += excess * excess;
        }
    }
    return s;
}

Eigen::MatrixXd random_rotation(std::size_t d, Rng &rng) {
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = standard_normal(rng);
        }
    }
    // Gram-Schmidt on columns
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < j; ++k) {
            m.col(j) -= m.col(j).dot(m.col(k)) * m.col(k);
        }
        m.col(j) /= m.col(j).norm();
    }
    return m;
}

} // namespace bbob_detail

using namespace bbob_detail;

namespace {

constexpr const char *kNames[kBbobFunctionCount] = {
    "sphere",           "ellipsoid_separable",  "rastrigin_separable",   "buche_rastrigin",
    "linear_slope",     "attractive_sector",    "step_ellipsoid",        "rosenbrock",
    "rosenbrock_rotated", "ellipsoid",          "discus",                "bent_cigar",
    "sharp_ridge",      "different_powers",     "rastrigin",             "weierstrass",
    "schaffers_f7",     "schaffers_f7_illcond", "griewank_rosenbrock",   "schwefel",
    "gallagher_101",    "gallagher_21",         "katsuura",              "lunacek_bi_rastrigin"};

double ellipsoid_sum(const Eigen::VectorXd &z, double cond_exponent) {
    const auto d = static_cast<double>(z.size());
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        s += std::pow(10.0, cond_exponent * static_cast<double>(i) / (d - 1.0)) * z[i] * z[i];
    }
    return s;
}

double rastrigin_sum(const Eigen::VectorXd &z) {
    const auto d = static_cast<double>(z.size());
    double c = 0.0;
    for (double v : z) {
        c += std::cos(2.0 * std::numbers::pi * v);
    }
    return 10.0 * (d - c) + z.squaredNorm();
}

double schaffers(const Eigen::VectorXd &z) {
    const auto d = static_cast<double>(z.size());
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < z.size(); ++i) {
        const double si = std::sqrt(z[i] * z[i] + z[i + 1] * z[i + 1]);
        const double root = std::sqrt(si);
        const double sn = std::sin(50.0 * std::pow(si, 0.2));
        s += root + root * sn * sn;
    }
    s /= (d - 1.0);
    return s * s;
}

double osz_scalar(double v) {
    Eigen::VectorXd t(1);
    t[0] = v;
    return t_osz(t)[0];
}

} // namespace

const char *bbob_name(int fid) {
    if (fid < 1 || fid > kBbobFunctionCount) {
        throw ParameterError("BBOB function id must be in 1..24, got " + std::to_string(fid));
    }
    return kNames[fid - 1];
}

BbobFunction::BbobFunction(int fid, std::size_t dimension, std::uint64_t seed)
    : ObjectiveFunction("bbob_f" + std::to_string(fid) + "_d" + std::to_string(dimension) + "_s" +
                            std::to_string(seed),
                        dimension),
      fid_(fid) {
    if (fid < 1 || fid > kBbobFunctionCount) {
        throw ParameterError("BBOB function id must be in 1..24, got " + std::to_string(fid));
    }
    if (dimension < 2) {
        throw ParameterError("BBOB dimension must be at least 2");
    }
    const auto n = static_cast<Eigen::Index>(dimension);
    const double d = static_cast<double>(dimension);
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(fid), dimension}));

    const double g1 = standard_normal(rng);
    double g2 = standard_normal(rng);
    if (g2 == 0.0) {
        g2 = 1e-300;
    }
    fopt_ = std::clamp(std::round(100.0 * 100.0 * g1 / g2) / 100.0, -1000.0, 1000.0);

    xopt_.resize(n);
    for (auto &v : xopt_) {
        v = uniform(rng, -4.0, 4.0);
    }
    rot_r_ = random_rotation(dimension, rng);
    rot_q_ = random_rotation(dimension, rng);

    switch (fid) {
    case 4:
        for (Eigen::Index i = 0; i < n; i += 2) {
            xopt_[i] = std::abs(xopt_[i]);
        }
        break;
    case 5:
        for (auto &v : xopt_) {
            v = v >= 0 ? 5.0 : -5.0;
        }
        break;
    case 8:
        xopt_ *= 0.75;
        break;
    case 20:
        for (auto &v : xopt_) {
            v = (v >= 0 ? 1.0 : -1.0) * 0.5 * 4.2096874633;
        }
        break;
    case 24:
        for (auto &v : xopt_) {
            v = (v >= 0 ? 1.0 : -1.0) * 0.5 * 2.5;
        }
        break;
    default:
        break;
    }
    optimum_ = xopt_;

    if (fid == 9 || fid == 19) {
        // z = c R x + 1/2 reaches z = 1 at x = R^T (1 / (2c))
        const double c = std::max(1.0, std::sqrt(d) / 8.0);
        optimum_ = rot_r_.transpose() * Eigen::VectorXd::Constant(n, 0.5 / c);
    }

    if (fid == 21 || fid == 22) {
        const std::size_t npeaks = fid == 21 ? 101 : 21;
        const double first_cond = fid == 21 ? 1000.0 : 1000.0 * 1000.0;
        const double spread = fid == 21 ? 5.0 : 4.9;

        std::vector<double> conds(npeaks);
        conds[0] = first_cond;
        std::vector<std::size_t> perm(npeaks - 1);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        shuffle(perm, rng);
        for (std::size_t i = 1; i < npeaks; ++i) {
            conds[i] = std::pow(1000.0, 2.0 * static_cast<double>(perm[i - 1]) / static_cast<double>(npeaks - 2));
        }

        peak_heights_.resize(npeaks);
        peak_heights_[0] = 10.0;
        for (std::size_t i = 1; i < npeaks; ++i) {
            peak_heights_[i] = 1.1 + 8.0 * static_cast<double>(i - 1) / static_cast<double>(npeaks - 2);
        }

        for (std::size_t i = 0; i < npeaks; ++i) {
            std::vector<std::size_t> axis(dimension);
            std::iota(axis.begin(), axis.end(), std::size_t{0});
            shuffle(axis, rng);
            Eigen::VectorXd scale(n);
            for (Eigen::Index j = 0; j < n; ++j) {
                scale[j] = std::pow(conds[i], static_cast<double>(axis[static_cast<std::size_t>(j)]) / (d - 1.0) - 0.5);
            }
            peak_scales_.push_back(std::move(scale));

            Eigen::VectorXd y(n);
            for (auto &v : y) {
                v = uniform(rng, -spread, spread);
            }
            if (i == 0) {
                y *= 0.8;
            }
            peaks_.push_back(std::move(y));
        }
        xopt_ = peaks_[0];
        optimum_ = peaks_[0];
    }

    set_known_optimum(fopt_);
}

double BbobFunction::gallagher(const Eigen::VectorXd &x) const {
    const double d = static_cast<double>(x.size());
    double best = 0.0;
    for (std::size_t i = 0; i < peaks_.size(); ++i) {
        const Eigen::VectorXd r = rot_r_ * (x - peaks_[i]);
        const double q = (peak_scales_[i].array() * r.array().square()).sum();
        best = std::max(best, peak_heights_[i] * std::exp(-0.5 / d * q));
    }
    const double v = osz_scalar(10.0 - best);
    return v * v + penalty(x);
}

double BbobFunction::raw(const Eigen::VectorXd &x) const {
    const auto n = x.size();
    const double d = static_cast<double>(n);
    switch (fid_) {
    case 1:
        return (x - xopt_).squaredNorm();
    case 2:
        return ellipsoid_sum(t_osz(x - xopt_), 6.0);
    case 3: {
        const Eigen::VectorXd z = lambda_diag(static_cast<std::size_t>(n), 10.0).cwiseProduct(t_asy(t_osz(x - xopt_), 0.2));
        return rastrigin_sum(z);
    }
    case 4: {
        Eigen::VectorXd z = t_osz(x - xopt_);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = std::pow(10.0, 0.5 * static_cast<double>(i) / (d - 1.0));
            if (z[i] > 0 && i % 2 == 0) {
                s *= 10.0;
            }
            z[i] *= s;
        }
        return rastrigin_sum(z) + 100.0 * penalty(x);
    }
    case 5: {
        double f = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double s = (xopt_[i] > 0 ? 1.0 : -1.0) * std::pow(10.0, static_cast<double>(i) / (d - 1.0));
            const double z = xopt_[i] * x[i] < 25.0 ? x[i] : xopt_[i];
            f += 5.0 * std::abs(s) - s * z;
        }
        return f;
    }
    case 6: {
        Eigen::VectorXd z = rot_q_ * lambda_diag(static_cast<std::size_t>(n), 10.0).cwiseProduct(rot_r_ * (x - xopt_));
        for (Eigen::Index i = 0; i < n; ++i) {
            if (z[i] * xopt_[i] > 0) {
                z[i] *= 100.0;
            }
        }
        return std::pow(osz_scalar(z.squaredNorm()), 0.9);
    }
    case 7: {
        const Eigen::VectorXd zhat =
            lambda_diag(static_cast<std::size_t>(n), 10.0).cwiseProduct(rot_r_ * (x - xopt_));
        Eigen::VectorXd ztilde(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            ztilde[i] = std::abs(zhat[i]) > 0.5 ? std::floor(0.5 + zhat[i]) : std::floor(0.5 + 10.0 * zhat[i]) / 10.0;
        }
        const Eigen::VectorXd z = rot_q_ * ztilde;
        return 0.1 * std::max(std::abs(zhat[0]) / 1e4, ellipsoid_sum(z, 2.0)) + penalty(x);
    }
    case 8:
    case 9: {
        const double c = std::max(1.0, std::sqrt(d) / 8.0);
        const Eigen::VectorXd z =
            fid_ == 8 ? Eigen::VectorXd((c * (x - xopt_)).array() + 1.0)
                      : Eigen::VectorXd((c * (rot_r_ * x)).array() + 0.5);
        double f = 0.0;
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            const double a = z[i] * z[i] - z[i + 1];
            const double b = z[i] - 1.0;
            f += 100.0 * a * a + b * b;
        }
        return f;
    }
    case 10:
        return ellipsoid_sum(t_osz(rot_r_ * (x - xopt_)), 6.0);
    case 11: {
        const Eigen::VectorXd z = t_osz(rot_r_ * (x - xopt_));
        return 1e6 * z[0] * z[0] + z.tail(n - 1).squaredNorm();
    }
    case 12: {
        const Eigen::VectorXd z = rot_r_ * t_asy(rot_r_ * (x - xopt_), 0.5);
        return z[0] * z[0] + 1e6 * z.tail(n - 1).squaredNorm();
    }
    case 13: {
        const Eigen::VectorXd z =
            rot_q_ * lambda_diag(static_cast<std::size_t>(n), 10.0).cwiseProduct(rot_r_ * (x - xopt_));
        return z[0] * z[0] + 100.0 * std::sqrt(z.tail(n - 1).squaredNorm());
    }
    case 14: {
        const Eigen::VectorXd z = rot_r_ * (x - xopt_);
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            s += std::pow(std::abs(z[i]), 2.0 + 4.0 * static_cast<double>(i) / (d - 1.0));
        }
        return std::sqrt(s);
    }
    case 15: {
        const Eigen::VectorXd z =
            rot_r_ * lambda_diag(static_cast<std::size_t>(n), 10.0)
                         .cwiseProduct(rot_q_ * t_asy(t_osz(rot_r_ * (x - xopt_)), 0.2));
        return rastrigin_sum(z);
    }
    case 16: {
        const Eigen::VectorXd z =
            rot_r_ * lambda_diag(static_cast<std::size_t>(n), 0.01).cwiseProduct(rot_q_ * t_osz(rot_r_ * (x - xopt_)));
        double f0 = 0.0;
        for (int k = 0; k < 12; ++k) {
            f0 += std::pow(0.5, k) * std::cos(std::numbers::pi * std::pow(3.0, k));
        }
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (int k = 0; k < 12; ++k) {
                s += std::pow(0.5, k) * std::cos(2.0 * std::numbers::pi * std::pow(3.0, k) * (z[i] + 0.5));
            }
        }
        const double inner = s / d - f0;
        return 10.0 * inner * inner * inner + 10.0 / d * penalty(x);
    }
    case 17:
    case 18: {
        const double cond = fid_ == 17 ? 10.0 : 1000.0;
        const Eigen::VectorXd z = lambda_diag(static_cast<std::size_t>(n), cond)
                                      .cwiseProduct(rot_q_ * t_asy(rot_r_ * (x - xopt_), 0.5));
        return schaffers(z) + 10.0 * penalty(x);
    }
    case 19: {
        const double c = std::max(1.0, std::sqrt(d) / 8.0);
        const Eigen::VectorXd z = (c * (rot_r_ * x)).array() + 0.5;
        double s = 0.0;
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            const double a = z[i] * z[i] - z[i + 1];
            const double b = z[i] - 1.0;
            const double si = 100.0 * a * a + b * b;
            s += si / 4000.0 - std::cos(si);
        }
        return 10.0 / (d - 1.0) * s + 10.0;
    }
    case 20: {
        const Eigen::VectorXd two_abs = 2.0 * xopt_.cwiseAbs();
        Eigen::VectorXd xhat(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            xhat[i] = 2.0 * (xopt_[i] > 0 ? 1.0 : -1.0) * x[i];
        }
        Eigen::VectorXd zhat = xhat;
        for (Eigen::Index i = 1; i < n; ++i) {
            zhat[i] = xhat[i] + 0.25 * (xhat[i - 1] - two_abs[i - 1]);
        }
        const Eigen::VectorXd z =
            100.0 * (lambda_diag(static_cast<std::size_t>(n), 10.0).cwiseProduct(zhat - two_abs) + two_abs);
        double s = 0.0;
        for (double v : z) {
            s += v * std::sin(std::sqrt(std::abs(v)));
        }
        return -s / (100.0 * d) + 4.189828872724339 + 100.0 * penalty(z / 100.0);
    }
    case 21:
    case 22:
        return gallagher(x);
    case 23: {
        const Eigen::VectorXd z =
            rot_q_ * lambda_diag(static_cast<std::size_t>(n), 100.0).cwiseProduct(rot_r_ * (x - xopt_));
        double prod = 1.0;
        const double expo = 10.0 / std::pow(d, 1.2);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 1; j <= 32; ++j) {
                const double p = std::ldexp(1.0, j);
                s += std::abs(p * z[i] - std::round(p * z[i])) / p;
            }
            prod *= std::pow(1.0 + static_cast<double>(i + 1) * s, expo);
        }
        return 10.0 / (d * d) * prod - 10.0 / (d * d) + penalty(x);
    }
    case 24: {
        constexpr double mu0 = 2.5;
        const double s = 1.0 - 1.0 / (2.0 * std::sqrt(d + 20.0) - 8.2);
        const double mu1 = -std::sqrt((mu0 * mu0 - 1.0) / s);
        Eigen::VectorXd xhat(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            xhat[i] = 2.0 * (xopt_[i] > 0 ? 1.0 : -1.0) * x[i];
        }
        const Eigen::VectorXd z = rot_q_ * lambda_diag(static_cast<std::size_t>(n), 100.0)
                                               .cwiseProduct(rot_r_ * (xhat.array() - mu0).matrix());
        double s0 = 0.0;
        double s1 = 0.0;
        double c = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            s0 += (xhat[i] - mu0) * (xhat[i] - mu0);
            s1 += (xhat[i] - mu1) * (xhat[i] - mu1);
            c += std::cos(2.0 * std::numbers::pi * z[i]);
        }
        return std::min(s0, d + s * s1) + 10.0 * (d - c) + 1e4 * penalty(x);
    }
    default:
        throw ParameterError("unreachable BBOB id");
    }
}

double BbobFunction::evaluate_unclamped(std::span<const double> x) const {
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    return raw(v) + fopt_;
}

std::shared_ptr<const BbobFunction> make_bbob(int fid, std::size_t dimension, std::uint64_t seed) {
    return std::make_shared<const BbobFunction>(fid, dimension, seed);
}

} // namespace laac
