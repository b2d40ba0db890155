#include "laac/errors.hpp"
#include "laac/metrics.hpp"
#include "laac/seed.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace laac;

namespace {

Configuration cfg_with_lambda(int lambda) {
    Configuration c = default_config(5);
    c.lambda = lambda;
    return c;
}

} // namespace

TEST_CASE("AUC examples") {
    CHECK(auc(std::vector<double>(10, 2.0), 2.0, 7.0).value == 0.0);
    CHECK(auc(std::vector<double>(10, 7.0), 2.0, 7.0).value == 1.0);
    CHECK(auc(std::vector<double>{1.0, 1.0, 0.0, 0.0}, 0.0, 1.0).value == 0.5);
    // clamped on both sides
    CHECK(auc(std::vector<double>{50.0, -3.0}, 0.0, 1.0).value == 0.5);
    const AucScore s = auc(std::vector<double>{3.0, 2.0}, 1.0, 5.0);
    CHECK(s.budget == 2);
    CHECK(s.y_opt == 1.0);
    CHECK(s.y_worst == 5.0);
    CHECK_THROWS_AS(auc(std::vector<double>{1.0}, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(auc(std::vector<double>{}, 0.0, 1.0), ParameterError);
}

TEST_CASE("AUC is monotone and affine invariant") {
    Rng rng(2);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + uniform_index(rng, 200);
        std::vector<double> worse(n), better(n);
        double level = uniform(rng, -2, 12);
        for (std::size_t i = 0; i < n; ++i) {
            level -= uniform01(rng) * 0.2;
            worse[i] = level;
            better[i] = level - (uniform01(rng) < 0.5 ? 0.0 : uniform01(rng));
        }
        const double lo = uniform(rng, -1, 1);
        const double hi = lo + uniform(rng, 0.1, 10);
        REQUIRE(auc(better, lo, hi).value <= auc(worse, lo, hi).value);

        const double scale = uniform(rng, 0.01, 100);
        const double shift = uniform(rng, -50, 50);
        std::vector<double> moved(n);
        std::transform(worse.begin(), worse.end(), moved.begin(), [&](double v) { return scale * v + shift; });
        CHECK(auc(moved, scale * lo + shift, scale * hi + shift).value ==
              doctest::Approx(auc(worse, lo, hi).value).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("virtual best solver is the first minimum") {
    TrialHistory h{{cfg_with_lambda(9), 0.4, 0.0}};
    CHECK(select_vbs(h) == cfg_with_lambda(9));
    h = {{cfg_with_lambda(5), 0.3, 0}, {cfg_with_lambda(6), 0.1, 0}, {cfg_with_lambda(7), 0.1, 0}};
    CHECK(select_vbs(h) == cfg_with_lambda(6));
    CHECK_THROWS_AS(select_vbs(TrialHistory{}), ParameterError);

    Rng rng(5);
    TrialHistory big;
    for (int i = 0; i < 50; ++i) {
        big.push_back({cfg_with_lambda(5 + i % 46), uniform01(rng), 0});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < big.size(); ++i) {
        if (big[i].score < big[best].score) {
            best = i;
        }
    }
    CHECK(select_vbs(big) == big[best].config);
}

TEST_CASE("single best solver matches an exhaustive mean") {
    CHECK_THROWS_AS(select_sbs({}), ParameterError);
    const TrialHistory one{{cfg_with_lambda(5), 0.4, 0}, {cfg_with_lambda(8), 0.2, 0}};
    CHECK(select_sbs({{"f1", one}}) == cfg_with_lambda(8));

    const TrialHistory shared_a{{cfg_with_lambda(5), 0.4, 0}, {cfg_with_lambda(20), 0.1, 0}};
    const TrialHistory shared_b{{cfg_with_lambda(20), 0.2, 0}, {cfg_with_lambda(7), 0.9, 0}};
    CHECK(select_sbs({{"a", shared_a}, {"b", shared_b}}) == cfg_with_lambda(20));

    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        std::map<std::string, TrialHistory> per;
        for (const char *id : {"f1", "f2", "f3"}) {
            // distinct configurations within a history, overlapping across histories
            std::vector<int> lambdas(12);
            std::iota(lambdas.begin(), lambdas.end(), 5);
            shuffle(lambdas, rng);
            TrialHistory h;
            const std::size_t n = 3 + uniform_index(rng, 10);
            for (std::size_t i = 0; i < n; ++i) {
                h.push_back({cfg_with_lambda(lambdas[i]), uniform01(rng), 0});
            }
            per[id] = h;
        }
        std::vector<Configuration> pool;
        for (const auto &[id, h] : per) {
            for (const auto &t : h) {
                if (std::find(pool.begin(), pool.end(), t.config) == pool.end()) {
                    pool.push_back(t.config);
                }
            }
        }
        double best_mean = INFINITY;
        Configuration best;
        for (const auto &c : pool) {
            double total = 0.0;
            for (const auto &[id, h] : per) {
                std::vector<double> all;
                double own = NAN;
                for (const auto &t : h) {
                    all.push_back(t.score);
                    if (t.config == c && std::isnan(own)) {
                        own = t.score;
                    }
                }
                total += std::isnan(own) ? median(all) : own;
            }
            if (total / 3.0 < best_mean) {
                best_mean = total / 3.0;
                best = c;
            }
        }
        const Configuration sbs = select_sbs(per);
        CHECK(sbs == best);
        for (const auto &[id, h] : per) {
            const Configuration vbs = select_vbs(h);
            const auto score_of = [&](const Configuration &c) {
                std::vector<double> all;
                for (const auto &t : h) {
                    all.push_back(t.score);
                }
                for (const auto &t : h) {
                    if (t.config == c) {
                        return t.score;
                    }
                }
                return median(all);
            };
            CHECK(score_of(vbs) <= score_of(sbs));
        }
    }
}

TEST_CASE("Wilcoxon exact p-values equal full enumeration") {
    const std::vector<double> zero(5, 0.0);
    CHECK(wilcoxon_one_sided(std::vector<double>{-1, -2, -3, -4, -5}, zero) == 0.03125);
    CHECK(wilcoxon_one_sided(zero, zero) == 1.0);
    CHECK_THROWS_AS(wilcoxon_one_sided(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 3, 4}),
                    ParameterError);
    CHECK_THROWS_AS(wilcoxon_one_sided(std::vector<double>(5, 1.0), std::vector<double>(6, 1.0)), ParameterError);

    const std::vector<double> a{125, 115, 130, 140, 140, 115, 140, 125, 140, 135};
    const std::vector<double> b{110, 122, 125, 120, 140, 124, 123, 137, 135, 145};
    CHECK(wilcoxon_one_sided(a, b) == doctest::Approx(oracle::wilcoxon_enumerated(a, b)).epsilon(1e-12));

    Rng rng(13);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 5 + uniform_index(rng, 8);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            // coarse values produce ties and zero differences
            x[i] = std::round(uniform(rng, 0, 6));
            y[i] = std::round(uniform(rng, 0, 6));
        }
        const double p = wilcoxon_one_sided(x, y);
        CHECK(std::abs(p - oracle::wilcoxon_enumerated(x, y)) <= 1e-12);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("one-sided p-values in both directions cover at least one") {
    Rng rng(21);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 5 + uniform_index(rng, 35);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = uniform01(rng);
            y[i] = uniform01(rng) + 0.1;
        }
        CHECK(wilcoxon_one_sided(x, y) + wilcoxon_one_sided(y, x) >= 1.0 - 1e-12);
    }
}

TEST_CASE("normal approximation tracks the exact distribution beyond 25 pairs") {
    Rng rng(4);
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 26 + uniform_index(rng, 10);
        std::vector<double> x(n), y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            // distinct magnitudes 1..n with random signs, mostly negative
            x[i] = (uniform01(rng) < 0.35 ? 1.0 : -1.0) * static_cast<double>(i + 1);
        }
        // exact null distribution of W+ by dynamic programming over ranks 1..n
        const std::size_t max_w = n * (n + 1) / 2;
        std::vector<double> count(max_w + 1, 0.0);
        count[0] = 1.0;
        for (std::size_t r = 1; r <= n; ++r) {
            for (std::size_t w = max_w; w >= r; --w) {
                count[w] += count[w - r];
            }
        }
        std::size_t observed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            observed += x[i] > 0 ? i + 1 : 0;
        }
        double cum = 0.0;
        for (std::size_t w = 0; w <= observed; ++w) {
            cum += count[w];
        }
        const double exact = cum / std::ldexp(1.0, static_cast<int>(n));
        CHECK(std::abs(wilcoxon_one_sided(x, y) - exact) <= 0.01);
    }
}

TEST_CASE("median") {
    CHECK(median({3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK_THROWS_AS(median({}), ParameterError);
}
