#include "laac/bbob.hpp"
#include "laac/cmaes.hpp"
#include "laac/errors.hpp"
#include "laac/seed.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>

using namespace laac;

namespace {

class Counting final : public ObjectiveFunction {
public:
    Counting(std::size_t d, std::function<double(std::span<const double>)> fn)
        : ObjectiveFunction("counting", d), fn_(std::move(fn)) {}
    double evaluate_unclamped(std::span<const double> x) const override {
        ++calls;
        return fn_(x);
    }
    mutable std::atomic<std::size_t> calls{0};

private:
    std::function<double(std::span<const double>)> fn_;
};

double sum_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); }


void check_trace_contract(const ConvergenceTrace &t, std::size_t budget) {
    REQUIRE(t.best_so_far.size() == budget);
    CHECK(t.evaluations_used <= budget);
    for (std::size_t i = 1; i < budget; ++i) {
        REQUIRE(t.best_so_far[i] <= t.best_so_far[i - 1]);
    }
}

} // namespace

TEST_CASE("default population size follows 4 + floor(3 ln d)") {
    CHECK(default_config(5).lambda == 8);
    CHECK(default_config(20).lambda == 12);
    CHECK(default_config(2).lambda == 6);
    const Configuration c = default_config(5);
    CHECK(c.parent_ratio == 0.5);
    CHECK(c.sigma0 == 0.2);
    CHECK_FALSE(c.lr_sigma.has_value());
    CHECK_FALSE(c.active);
    CHECK(c.mirrored == Mirrored::none);
    CHECK(c.weights_scheme == WeightsScheme::default_);
    CHECK(c.mu() == 4);
}

TEST_CASE("automatic learning rates use the standard formulas") {
    const Configuration c = default_config(5);
    // default weights for mu = 4, computed by hand
    double w[4];
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
        w[i] = std::log(4.5) - std::log(i + 1.0);
        s += w[i];
    }
    double s2 = 0.0;
    for (double &v : w) {
        v /= s;
        s2 += v * v;
    }
    const double mu_eff = 1.0 / s2;
    const Configuration r = resolve_auto_rates(c, 5);
    CHECK(*r.lr_rank_one == doctest::Approx(2.0 / (6.3 * 6.3 + mu_eff)).epsilon(1e-14));
    CHECK(*r.lr_sigma == doctest::Approx((mu_eff + 2.0) / (5.0 + mu_eff + 5.0)).epsilon(1e-14));
    CHECK(*r.lr_cma == doctest::Approx((4.0 + mu_eff / 5.0) / (9.0 + 2.0 * mu_eff / 5.0)).epsilon(1e-14));
    CHECK(*r.lr_rank_mu ==
          doctest::Approx(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / (49.0 + mu_eff)).epsilon(1e-14));

    CHECK(effective_mu(recombination_weights(WeightsScheme::equal, 4)) == doctest::Approx(4.0));

    // explicit values survive, including zero
    Configuration fixed = c;
    fixed.lr_cma = 0.0;
    CHECK(*resolve_auto_rates(fixed, 5).lr_cma == 0.0);

    for (std::size_t d : {2u, 3u, 5u, 10u, 40u}) {
        for (int lambda : {5, 8, 20, 50}) {
            Configuration k = default_config(d);
            k.lambda = lambda;
            const Configuration rr = resolve_auto_rates(k, d);
            CHECK(*rr.lr_rank_mu <= 1.0 - *rr.lr_rank_one);
        }
    }
}

TEST_CASE("recombination weights are normalized and shaped per scheme") {
    for (int mu = 1; mu <= 25; ++mu) {
        for (auto scheme : {WeightsScheme::default_, WeightsScheme::equal, WeightsScheme::half_power_lambda}) {
            const auto w = recombination_weights(scheme, mu);
            CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-12);
            for (std::size_t i = 1; i < w.size(); ++i) {
                CHECK(w[i] <= w[i - 1]);
            }
        }
    }
    const auto half = recombination_weights(WeightsScheme::half_power_lambda, 5);
    for (std::size_t i = 1; i < half.size(); ++i) {
        CHECK(half[i] / half[i - 1] == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(recombination_weights(WeightsScheme::equal, 0), ParameterError);
}

TEST_CASE("traces have the budget length, never increase and count evaluations") {
    Rng rng(5);
    for (int k = 0; k < 40; ++k) {
        const Configuration c = oracle::random_config(rng);
        CAPTURE(nlohmann::json(c).dump());
        const auto bbob = make_bbob(1 + k % 24, 3, static_cast<std::uint64_t>(k));
        const Counting f(3, [&](std::span<const double> x) { return (*bbob)(x); });
        const std::size_t budget = 300 + static_cast<std::size_t>(k);
        const ConvergenceTrace t = run_cmaes(f, c, budget, static_cast<std::uint64_t>(k));
        check_trace_contract(t, budget);
        CHECK(f.calls.load() == t.evaluations_used);
        CHECK(t.min_covariance_eigenvalue > 0.0);
    }
}

TEST_CASE("a linear slope improves on its first evaluation") {
    Rng rng(9);
    for (int k = 0; k < 10; ++k) {
        const Configuration c = oracle::random_config(rng);
        const Counting f(5, sum_of);
        const ConvergenceTrace t = run_cmaes(f, c, 500, static_cast<std::uint64_t>(k));
        CHECK(t.final_best() <= t.best_so_far.front());
        CHECK(t.final_best() >= -25.0);
    }
}

TEST_CASE("default configuration solves the sphere") {
    const auto f = make_bbob(1, 5, 1);
    int solved = 0;
    for (std::uint64_t seed = 101; seed <= 110; ++seed) {
        const ConvergenceTrace t = run_cmaes(*f, default_config(5), 5000, seed);
        check_trace_contract(t, 5000);
        CHECK(t.covariance_repairs == 0);
        if (t.final_best() - f->fopt() < 1e-8) {
            ++solved;
        }
    }
    CHECK(solved >= 9);
}

TEST_CASE("budget below lambda and invalid configurations are rejected") {
    const auto f = make_bbob(1, 5, 1);
    CHECK_THROWS_AS(run_cmaes(*f, default_config(5), 7, 1), ParameterError);
    CHECK_NOTHROW(run_cmaes(*f, default_config(5), 8, 1));
    Configuration bad = default_config(5);
    bad.sigma0 = 0.9;
    CHECK_THROWS_AS(run_cmaes(*f, bad, 100, 1), ParameterError);
    bad = default_config(5);
    bad.lr_rank_mu = 0.5;
    CHECK_THROWS_AS(run_cmaes(*f, bad, 100, 1), ParameterError);
}

TEST_CASE("runs are reproducible and seed dependent") {
    const auto f = make_bbob(10, 5, 3);
    Configuration c = default_config(5);
    c.active = true;
    c.mirrored = Mirrored::mirrored_pairwise;
    c.threshold_convergence = true;
    const auto a = run_cmaes(*f, c, 1000, 42);
    const auto b = run_cmaes(*f, c, 1000, 42);
    const auto other = run_cmaes(*f, c, 1000, 43);
    CHECK(a.best_so_far == b.best_so_far);
    CHECK(a.best_so_far != other.best_so_far);
}

TEST_CASE("zero learning rates switch the updates off without breaking the run") {
    const auto f = make_bbob(2, 4, 1);
    Configuration c = default_config(4);
    c.lr_sigma = 0.0;
    c.lr_cma = 0.0;
    c.lr_rank_mu = 0.0;
    c.lr_rank_one = 0.0;
    const auto t = run_cmaes(*f, c, 400, 1);
    check_trace_contract(t, 400);
    CHECK(t.min_covariance_eigenvalue == doctest::Approx(1.0));
}

TEST_CASE("trace CSV and configuration JSON round trip") {
    const auto f = make_bbob(3, 2, 1);
    const auto t = run_cmaes(*f, default_config(2), 60, 4);
    const auto path = std::filesystem::temp_directory_path() / "laac_test_trace.csv";
    write_trace_csv(path, t);
    CHECK(read_trace_csv(path).best_so_far == t.best_so_far);
    std::filesystem::remove(path);

    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        const Configuration c = oracle::random_config(rng);
        const nlohmann::json j = c;
        CHECK(j.size() == 11);
        CHECK(j.get<Configuration>() == c);
    }
    const nlohmann::json j = default_config(5);
    CHECK(j.at("lr_sigma") == "auto");
    CHECK(j.at("weights_scheme") == "default");
    CHECK(j.get<Configuration>() == default_config(5));
}
