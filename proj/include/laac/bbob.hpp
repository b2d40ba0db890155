#pragma once

#include "laac/objective.hpp"
#include "laac/seed.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

namespace laac {

inline constexpr int kBbobFunctionCount = 24;

/// One deterministic instance of a noiseless BBOB function.
///
/// The seed drives the rotation matrices, the optimum shift and the optimum
/// value; it plays the role of the instance id in the reference suite.
class BbobFunction final : public ObjectiveFunction {
public:
    BbobFunction(int fid, std::size_t dimension, std::uint64_t seed);

    double evaluate_unclamped(std::span<const double> x) const override;

    int fid() const noexcept { return fid_; }
    double fopt() const noexcept { return fopt_; }
    /// Location of the global minimum, i.e. f(optimum_location()) == fopt().
    const Eigen::VectorXd &optimum_location() const noexcept { return optimum_; }
    /// Shift used inside the function definition (differs from the optimum for f9 and f19).
    const Eigen::VectorXd &xopt() const noexcept { return xopt_; }
    const Eigen::MatrixXd &rotation() const noexcept { return rot_r_; }
    const Eigen::MatrixXd &rotation_q() const noexcept { return rot_q_; }

private:
    double raw(const Eigen::VectorXd &x) const;
    double gallagher(const Eigen::VectorXd &x) const;

    int fid_;
    double fopt_{};
    Eigen::VectorXd xopt_;
    Eigen::VectorXd optimum_;
    Eigen::MatrixXd rot_r_;
    Eigen::MatrixXd rot_q_;

    // Gallagher peaks (f21, f22)
    std::vector<Eigen::VectorXd> peaks_;
    std::vector<Eigen::VectorXd> peak_scales_;
    std::vector<double> peak_heights_;
};

/// Builds BBOB function `fid` (1..24). Throws ParameterError for an invalid id or dimension < 2.
std::shared_ptr<const BbobFunction> make_bbob(int fid, std::size_t dimension, std::uint64_t seed);

const char *bbob_name(int fid);

namespace bbob_detail {
Eigen::VectorXd t_osz(Eigen::VectorXd x);
Eigen::VectorXd t_asy(Eigen::VectorXd x, double beta);
Eigen::VectorXd lambda_diag(std::size_t d, double alpha);
double penalty(const Eigen::VectorXd &x);
Eigen::MatrixXd random_rotation(std::size_t d, Rng &rng);
} // namespace bbob_detail

} // namespace laac
