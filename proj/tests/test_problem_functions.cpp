#include "laac/bbob.hpp"
#include "laac/errors.hpp"
#include "laac/mabbob.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace laac;

namespace {

std::vector<double> random_point(Rng &rng, std::size_t d, double lo = -5.0, double hi = 5.0) {
    std::vector<double> x(d);
    for (auto &v : x) {
        v = uniform(rng, lo, hi);
    }
    return x;
}

std::vector<double> to_std(const Eigen::VectorXd &v) { return {v.data(), v.data() + v.size()}; }

// Written from the published definition, independent of the library transforms.
double bent_cigar_reference(const BbobFunction &f, const std::vector<double> &x) {
    const auto d = static_cast<Eigen::Index>(x.size());
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        z[i] = x[static_cast<std::size_t>(i)] - f.xopt()[i];
    }
    z = f.rotation() * z;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (z[i] > 0) {
            z[i] = std::pow(z[i], 1.0 + 0.5 * std::sqrt(z[i]) * static_cast<double>(i) / static_cast<double>(d - 1));
        }
    }
    z = f.rotation() * z;
    double s = z[0] * z[0];
    for (Eigen::Index i = 1; i < d; ++i) {
        s += 1e6 * z[i] * z[i];
    }
    return s + f.fopt();
}

MaBbobSpec one_hot(int fid, std::vector<double> x_new, std::uint64_t seed = 3) {
    MaBbobSpec s;
    s.weights.fill(0.0);
    s.weights[static_cast<std::size_t>(fid - 1)] = 1.0;
    s.optimum_location = std::move(x_new);
    s.seed = seed;
    return s;
}

} // namespace

TEST_CASE("bbob rejects invalid ids and dimensions") {
    CHECK_THROWS_AS(make_bbob(0, 5, 1), ParameterError);
    CHECK_THROWS_AS(make_bbob(25, 5, 1), ParameterError);
    CHECK_THROWS_AS(make_bbob(1, 1, 1), ParameterError);
}

TEST_CASE("every bbob function attains its optimum value and nothing lower") {
    Rng rng(11);
    for (std::size_t d : {2u, 5u}) {
        for (int fid = 1; fid <= kBbobFunctionCount; ++fid) {
            CAPTURE(fid);
            CAPTURE(d);
            const auto f = make_bbob(fid, d, 1000 + static_cast<std::uint64_t>(fid));
            REQUIRE(f->known_optimum().has_value());
            CHECK(*f->known_optimum() == f->fopt());
            const auto opt = to_std(f->optimum_location());
            CHECK(std::all_of(opt.begin(), opt.end(), [](double v) { return std::abs(v) <= 5.0; }));
            CHECK(std::abs((*f)(opt) - f->fopt()) <= 1e-8 * std::max(1.0, std::abs(f->fopt())));
            const int samples = d == 5 ? 100000 : 20000;
            double lowest = INFINITY;
            for (int k = 0; k < samples; ++k) {
                const double y = (*f)(random_point(rng, d));
                REQUIRE(std::isfinite(y));
                lowest = std::min(lowest, y);
            }
            CHECK(lowest >= f->fopt() - 1e-9);
        }
    }
}

TEST_CASE("sphere value one unit away from the optimum") {
    const auto f = make_bbob(1, 5, 7);
    auto x = to_std(f->optimum_location());
    x[2] += 1.0;
    CHECK((*f)(x) == doctest::Approx(f->fopt() + 1.0).epsilon(1e-12));
}

TEST_CASE("bent cigar matches a reference evaluation") {
    const auto f = make_bbob(12, 5, 99);
    Rng rng(5);
    for (int k = 0; k < 5; ++k) {
        const auto x = random_point(rng, 5);
        const double ref = bent_cigar_reference(*f, x);
        CHECK(std::abs((*f)(x) - ref) <= 1e-6 * std::abs(ref));
    }
}

TEST_CASE("bbob construction is deterministic and evaluation clamps to the box") {
    for (int fid : {3, 15, 21, 24}) {
        const auto a = make_bbob(fid, 5, 42);
        const auto b = make_bbob(fid, 5, 42);
        Rng rng(8);
        for (int k = 0; k < 1000; ++k) {
            const auto x = random_point(rng, 5);
            REQUIRE((*a)(x) == (*b)(x));
        }
        std::vector<double> outside{7.0, -9.0, 0.5, 5.5, -5.0};
        std::vector<double> clamped{5.0, -5.0, 0.5, 5.0, -5.0};
        CHECK((*a)(outside) == (*a)(clamped));
    }
    CHECK_THROWS_AS((*make_bbob(1, 5, 1))(std::vector<double>(4, 0.0)), ParameterError);
}

TEST_CASE("different seeds give different instances") {
    const auto a = make_bbob(7, 5, 1);
    const auto b = make_bbob(7, 5, 2);
    CHECK((a->xopt() - b->xopt()).norm() > 0.0);
}

TEST_CASE("single sphere component vanishes at the new optimum") {
    const auto f = make_mabbob(one_hot(1, std::vector<double>(5, 0.0)), 5);
    CHECK(std::abs((*f)(std::vector<double>(5, 0.0))) <= 1e-6);
    CHECK(f->known_optimum() == 0.0);
}

TEST_CASE("single component optimum sits at x_new") {
    Rng rng(21);
    for (int fid : {1, 2, 8, 10, 14, 16, 23}) {
        CAPTURE(fid);
        const auto x_new = random_point(rng, 3, -4.0, 4.0);
        const auto f = make_mabbob(one_hot(fid, x_new), 3);
        const double at_opt = (*f)(x_new);
        // local search around x_new never improves on it
        for (double radius : {1e-3, 1e-2, 1e-1}) {
            for (int k = 0; k < 200; ++k) {
                auto x = x_new;
                for (auto &v : x) {
                    v += uniform(rng, -radius, radius);
                }
                REQUIRE((*f)(x) >= at_opt);
            }
        }
    }
}

TEST_CASE("single sphere component preserves the ranking of points") {
    Rng rng(4);
    const auto x_new = random_point(rng, 4, -4.0, 4.0);
    const auto f = make_mabbob(one_hot(1, x_new), 4);
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 200; ++k) {
        pts.push_back(random_point(rng, 4));
    }
    auto dist = [&](const std::vector<double> &x) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            s += (x[j] - x_new[j]) * (x[j] - x_new[j]);
        }
        return s;
    };
    std::vector<std::size_t> by_f(pts.size());
    std::vector<std::size_t> by_d(pts.size());
    std::iota(by_f.begin(), by_f.end(), std::size_t{0});
    std::iota(by_d.begin(), by_d.end(), std::size_t{0});
    std::sort(by_f.begin(), by_f.end(), [&](auto a, auto b) { return (*f)(pts[a]) < (*f)(pts[b]); });
    std::sort(by_d.begin(), by_d.end(), [&](auto a, auto b) { return dist(pts[a]) < dist(pts[b]); });
    CHECK(by_f == by_d);
}

TEST_CASE("two-component combination is non-negative and minimal at x_new") {
    MaBbobSpec s;
    s.weights.fill(0.0);
    s.weights[0] = 0.5;
    s.weights[1] = 0.5;
    s.optimum_location = {1.5, -2.0};
    s.seed = 77;
    const auto f = make_mabbob(s, 2);
    const double at_opt = (*f)(s.optimum_location);
    Rng rng(2);
    for (int k = 0; k < 100; ++k) {
        const double y = (*f)(random_point(rng, 2));
        CHECK(std::isfinite(y));
        CHECK(y >= -1e-9);
        CHECK(at_opt < y);
    }
}

TEST_CASE("MA-BBOB spec validation and JSON round trip") {
    MaBbobSpec bad = one_hot(1, {0.0, 0.0});
    bad.weights[1] = 0.5;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    MaBbobSpec outside = one_hot(1, {4.5, 0.0});
    CHECK_THROWS_AS(outside.validate(), ParameterError);
    MaBbobSpec empty = one_hot(1, {0.0, 0.0});
    empty.weights.fill(0.0);
    CHECK_THROWS_AS(empty.validate(), ParameterError);

    const MaBbobSpec spec = sample_mabbob_spec(6, 123);
    spec.validate();
    const nlohmann::json j = spec;
    CHECK(j.contains("weights"));
    CHECK(j.contains("x_new"));
    CHECK(j.contains("seed"));
    const MaBbobSpec back = j.get<MaBbobSpec>();
    CHECK(back.weights == spec.weights);
    CHECK(back.optimum_location == spec.optimum_location);
    CHECK(back.seed == spec.seed);
}

TEST_CASE("sampled specs are sparse, normalized and seed-reproducible") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const MaBbobSpec s = sample_mabbob_spec(5, seed);
        const double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
        CHECK(std::abs(total - 1.0) <= 1e-9);
        const auto active = std::count_if(s.weights.begin(), s.weights.end(), [](double w) { return w > 0.0; });
        CHECK(active >= 1);
        CHECK(active <= 5);
        CHECK(std::all_of(s.optimum_location.begin(), s.optimum_location.end(),
                          [](double v) { return std::abs(v) < 4.0; }));
    }
    CHECK(sample_mabbob_spec(5, 9).weights == sample_mabbob_spec(5, 9).weights);
}
