// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include "laac/bbob.hpp"
#include "laac/cmaes.hpp"
#include "laac/doe.hpp"
#include "laac/ela.hpp"
#include "laac/io.hpp"
#include "laac/metrics.hpp"
#include "laac/nn.hpp"
#include "laac/pipeline.hpp"
#include "laac/selection.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <thread>

using namespace laac;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Lambda final : public ObjectiveFunction {
public:
    Lambda(std::size_t d, std::function<double(std::span<const double>)> fn)
        : ObjectiveFunction("lambda", d), fn_(std::move(fn)) {}
    double evaluate_unclamped(std::span<const double> x) const override { return fn_(x); }

private:
    std::function<double(std::span<const double>)> fn_;
};

std::map<std::string, std::string> snapshot(const fs::path &root) {
    std::map<std::string, std::string> out;
    for (const auto &e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) {
            out[fs::relative(e.path(), root).string()] = read_file(e.path());
        }
    }
    return out;
}

Outcome optimum_estimate() {
    const std::vector<std::pair<double, double>> cases{{7.3, 7},     {-3.2, -4}, {57.2, 50}, {-1234.5, -1300},
                                                       {0.0, 0},     {9.999, 9}, {10.0, 10}};
    int ok = 0;
    for (const auto &[y, want] : cases) {
        ok += estimate_yopt(y) == want;
    }
    return {ok == 7, std::to_string(ok) + "/7 cases exact"};
}

Outcome encode_round_trip() {
    Rng rng(2024);
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
        const Configuration c = oracle::random_config(rng);
        const Eigen::VectorXd e = encode(c);
        const Configuration back = decode(std::span<const double>(e.data(), static_cast<std::size_t>(e.size())));
        bool same = back.lambda == c.lambda;
        for (std::size_t j = 1; j < kNumericCount; ++j) {
            same = same && std::abs(back.numeric(j) - c.numeric(j)) <= 1e-12;
        }
        for (std::size_t j = 0; j < kCategoricalCount; ++j) {
            same = same && back.categorical(j) == c.categorical(j);
        }
        bad += !same;
    }
    return {bad == 0, std::to_string(1000 - bad) + "/1000 configurations restored"};
}

Outcome kendall_brute_force() {
    Rng rng(7);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 2 + uniform_index(rng, 99);
        const std::size_t levels = 1 + uniform_index(rng, n);
        std::vector<double> s(n);
        for (auto &v : s) {
            v = 0.01 * static_cast<double>(uniform_index(rng, levels));
        }
        worst = std::max(worst, std::abs(ranking_ambiguity(s) - oracle::tau_b_pairs(s)));
    }
    char buf[80];
    std::snprintf(buf, sizeof buf, "max deviation %.3g over 200 rankings", worst);
    return {worst <= 1e-12, buf};
}

Outcome wilcoxon_exact() {
    Rng rng(13);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 5 + uniform_index(rng, 8);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = std::round(uniform(rng, 0, 6));
            b[i] = std::round(uniform(rng, 0, 6));
        }
        worst = std::max(worst, std::abs(wilcoxon_one_sided(a, b) - oracle::wilcoxon_enumerated(a, b)));
    }
    const double p = wilcoxon_one_sided(std::vector<double>{-1, -2, -3, -4, -5}, std::vector<double>(5, 0.0));
    char buf[96];
    std::snprintf(buf, sizeof buf, "max deviation %.3g over 50 samples, all-negative n=5 gives %.17g", worst, p);
    return {worst <= 1e-12 && p == 0.03125, buf};
}

Outcome auc_metric() {
    const bool examples = auc(std::vector<double>(10, 2.0), 2.0, 7.0).value == 0.0 &&
                          auc(std::vector<double>(10, 7.0), 2.0, 7.0).value == 1.0 &&
                          auc(std::vector<double>{1, 1, 0, 0}, 0.0, 1.0).value == 0.5;
    Rng rng(2);
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + uniform_index(rng, 200);
        std::vector<double> worse(n), better(n);
        double level = uniform(rng, -2, 12);
        for (std::size_t i = 0; i < n; ++i) {
            level -= uniform01(rng) * 0.2;
            worse[i] = level;
            better[i] = level - (uniform01(rng) < 0.5 ? 0.0 : uniform01(rng));
        }
        violations += auc(better, 0.0, 10.0).value > auc(worse, 0.0, 10.0).value;
    }
    return {examples && violations == 0,
            std::string(examples ? "examples exact" : "examples wrong") + ", " + std::to_string(violations) +
                " monotonicity violations in 1000 pairs"};
}

Outcome cmaes_sphere(const fs::path &dir) {
    fs::create_directories(dir);
    const auto f = make_bbob(1, 5, 1);
    int solved = 0;
    std::size_t repairs = 0;
    bool spd = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ConvergenceTrace t = run_cmaes(*f, default_config(5), 5000, seed);
        write_trace_csv(dir / ("sphere_seed" + std::to_string(seed) + ".csv"), t);
        solved += t.final_best() - f->fopt() < 1e-8;
        repairs += t.covariance_repairs;
        spd = spd && t.min_covariance_eigenvalue > 0.0;
    }
    return {solved >= 9 && spd, std::to_string(solved) + "/10 seeds below 1e-8, " + std::to_string(repairs) +
                                    " logged repairs, covariance " + (spd ? "positive definite" : "degenerate")};
}

Outcome gradient_check() {
    const double worst = oracle::worst_gradient_error(20, 1e-5, 10);
    char buf[80];
    std::snprintf(buf, sizeof buf, "max relative error %.3g over 20 probes", worst);
    return {worst < 1e-4, buf};
}

Outcome ela_sanity() {
    const Lambda linear(5, [](std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); });
    const Lambda sphere(5, [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) {
            s += (v - 0.5) * (v - 0.5);
        }
        return s;
    });
    const double lin_r2 = compute_ela(sample_doe(linear, 50, 5)).at("ela_meta.lin_simple.adj_r2");
    const double quad_r2 = compute_ela(sample_doe(sphere, 50, 5)).at("ela_meta.quad_simple.adj_r2");

    Rng rng(6);
    Eigen::VectorXd y(200);
    for (Eigen::Index i = 0; i < 100; ++i) {
        y[i] = std::exp(standard_normal(rng));
        y[i + 100] = -y[i];
    }
    const double skew = compute_ela(make_doe(latin_hypercube(200, 2, -5, 5, 8), y)).at("ela_distr.skewness");

    int bad_pairs = 0;
    for (int trial = 0; trial < 20; ++trial) {
        FeatureMatrix m;
        m.values.resize(15, 10);
        for (int j = 0; j < 10; ++j) {
            m.names.push_back("f" + std::to_string(j));
        }
        for (Eigen::Index i = 0; i < 15; ++i) {
            const double base = uniform01(rng);
            for (Eigen::Index j = 0; j < 10; ++j) {
                m.values(i, j) = base * (j % 3 == 0 ? 1.0 : 0.2) + 0.05 * uniform01(rng) * static_cast<double>(j + 1);
            }
        }
        const auto kept = prune_correlated(m);
        for (std::size_t p = 0; p < kept.size(); ++p) {
            for (std::size_t q = p + 1; q < kept.size(); ++q) {
                bad_pairs += std::abs(oracle::pearson(m.column(kept[p]), m.column(kept[q]))) > 0.95;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "linear R2 %.6f, sphere R2 %.6f, mirrored skewness %.2g, %d kept pairs above 0.95",
                  lin_r2, quad_r2, skew, bad_pairs);
    return {lin_r2 >= 0.999 && quad_r2 >= 0.999 && std::abs(skew) <= 1e-9 && bad_pairs == 0, buf};
}

Outcome rgf_screen() {
    const std::size_t n = 40;
    std::vector<double> finals(n), distinct(n), tied(n, 0.25);
    for (std::size_t i = 0; i < n; ++i) {
        finals[i] = 8.0 + static_cast<double>(i % 5);
        distinct[i] = 0.01 * static_cast<double>((i * 17) % n + 1);
    }
    for (std::size_t i = 0; i < n / 10; ++i) {
        tied[i] = 0.5 + 0.1 * static_cast<double>(i);
    }
    const auto make = [&](const std::vector<double> &scores, double y_hpo) {
        HpoResult r;
        for (std::size_t i = 0; i < n; ++i) {
            r.history.push_back({Configuration{}, scores[i], finals[i]});
        }
        r.y_hpo = y_hpo;
        return screen(r);
    };
    double sd = 0.0;
    for (double v : finals) {
        sd += (v - 10.0) * (v - 10.0);
    }
    sd = std::sqrt(sd / (n - 1));
    const SelectionVerdict clear = make(distinct, 10.0);
    const SelectionVerdict flat = make(tied, 10.0);
    const SelectionVerdict far = make(distinct, 10.0 - 5.0 * sd);
    const bool ok = clear.accepted && flat.ambiguous && !flat.outlier && far.outlier && !far.ambiguous;
    const auto label = [](const SelectionVerdict &v) {
        return std::string(v.accepted ? "accepted" : v.ambiguous ? "ambiguous" : "outlier");
    };
    return {ok, "clear-ranking " + label(clear) + ", all-tied " + label(flat) + ", outlier-optimum " + label(far)};
}

PipelineConfig desk_config(const fs::path &out, std::size_t jobs) {
    PipelineConfig c;
    c.dimension = 5;
    c.n_train_functions = 50;
    c.training_source = TrainingSource::mixed;
    c.tpe_budget = 50;
    c.run_budget_per_dim = 500;
    c.repetitions = 5;
    c.test_suite = {1, 5, 12};
    c.output_dir = out;
    c.jobs = jobs;
    return c;
}

void run_pipeline(const PipelineConfig &c) {
    stage_generate(c);
    stage_label(c);
    stage_train(c);
    stage_evaluate(c);
}

Outcome desk_scale(const fs::path &dir, std::size_t jobs) {
    const PipelineConfig c = desk_config(dir, jobs);
    run_pipeline(c);
    const CsvTable report = read_csv(dir / "eval" / "report.csv");
    int not_worse = 0;
    std::string detail;
    for (const auto &row : report.rows) {
        if (row[1] != "default") {
            continue;
        }
        const double ours = parse_double(row[2]);
        const double theirs = parse_double(row[3]);
        not_worse += ours <= theirs;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s%s %.4g vs %.4g", detail.empty() ? "" : "; ", row[0].c_str(), ours, theirs);
        detail += buf;
    }
    return {not_worse >= 2, std::to_string(not_worse) + "/3 functions not worse than default (" + detail + ")"};
}

Outcome determinism(const fs::path &first, const fs::path &second, std::size_t jobs) {
    fs::remove_all(second);
    cmaes_sphere(second / "criterion6");
    run_pipeline(desk_config(second / "criterion10", jobs));
    const auto a = snapshot(first);
    const auto b = snapshot(second);
    std::size_t differing = 0;
    for (const auto &[name, bytes] : a) {
        const auto it = b.find(name);
        differing += it == b.end() || it->second != bytes;
    }
    differing += b.size() > a.size() ? b.size() - a.size() : 0;
    return {differing == 0 && !a.empty(),
            std::to_string(a.size()) + " artifacts compared, " + std::to_string(differing) + " differ"};
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"acceptance criteria"};
    std::string out = "acceptance_out";
    std::size_t jobs = std::max(1U, std::thread::hardware_concurrency());
    bool quick = false;
    app.add_option("--out", out, "artifact directory");
    app.add_option("--jobs", jobs, "worker threads");
    app.add_flag("--quick", quick, "skip the end-to-end criteria 10 and 11");
    CLI11_PARSE(app, argc, argv);

    const fs::path root = fs::absolute(out);
    fs::remove_all(root / "run_a");

    struct Criterion {
        int id;
        std::string name;
        double limit_seconds; // 0 = no limit enforced
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "optimum estimate", 1, optimum_estimate},
        {2, "encode/decode round trip", 1, encode_round_trip},
        {3, "Kendall tau-b", 10, kendall_brute_force},
        {4, "Wilcoxon exactness", 30, wilcoxon_exact},
        {5, "AUC metric", 5, auc_metric},
        {6, "CMA-ES sphere", 60, [&] { return cmaes_sphere(root / "run_a" / "criterion6"); }},
        {7, "NN gradient check", 30, gradient_check},
        {8, "ELA sanity", 30, ela_sanity},
        {9, "RGF screen", 1, rgf_screen},
        {10, "desk-scale end to end", 0, [&] { return desk_scale(root / "run_a" / "criterion10", jobs); }},
        {11, "determinism", 0, [&] { return determinism(root / "run_a", root / "run_b", jobs); }},
    };

    int failed = 0;
    for (const auto &c : criteria) {
        if (quick && c.id >= 10) {
            std::printf("SKIP criterion %2d %s\n", c.id, c.name.c_str());
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && secs > c.limit_seconds) {
            o.pass = false;
            o.detail += "; over the time limit";
        }
        failed += !o.pass;
        std::printf("%s criterion %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
