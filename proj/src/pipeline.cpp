#include "laac/pipeline.hpp"

#include "laac/bbob.hpp"
#include "laac/cmaes.hpp"
#include "laac/doe.hpp"
#include "laac/ela.hpp"
#include "laac/errors.hpp"
#include "laac/io.hpp"
#include "laac/mabbob.hpp"
#include "laac/metrics.hpp"
#include "laac/parallel.hpp"
#include "laac/rgf.hpp"
#include "laac/selection.hpp"
#include "laac/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace laac {

// ---------------------------------------------------------------------------
// configuration

std::size_t PipelineConfig::doe_samples_per_dim() const {
    return samples_per_dim != 0 ? samples_per_dim : (dimension <= 10 ? 50 : 20);
}

std::size_t PipelineConfig::run_budget() const {
    return dimension * (run_budget_per_dim != 0 ? run_budget_per_dim : (dimension <= 10 ? 1000 : 100));
}

void PipelineConfig::validate() const {
    if (dimension < 2) {
        throw ParameterError("dimension must be at least 2");
    }
    if (n_train_functions == 0 || tpe_budget == 0 || repetitions == 0 || grid_splits == 0) {
        throw ParameterError("pipeline counts must be positive");
    }
    if (tpe_budget < tpe_startup) {
        throw ParameterError("tpe_budget is smaller than tpe_startup");
    }
    if (grid.empty()) {
        throw ParameterError("architecture grid is empty");
    }
    for (int fid : test_suite) {
        if (fid < 1 || fid > kBbobFunctionCount) {
            throw ParameterError("test suite holds an invalid BBOB id " + std::to_string(fid));
        }
    }
    if (run_budget() < 50) {
        throw ParameterError("run budget is too small for the largest population size");
    }
}

namespace {

std::string_view to_string(TrainingSource s) {
    switch (s) {
    case TrainingSource::rgf:
        return "rgf";
    case TrainingSource::mabbob:
        return "mabbob";
    default:
        return "mixed";
    }
}

TrainingSource parse_source(const std::string &s) {
    if (s == "rgf") {
        return TrainingSource::rgf;
    }
    if (s == "mabbob") {
        return TrainingSource::mabbob;
    }
    if (s == "mixed") {
        return TrainingSource::mixed;
    }
    throw ParameterError("unknown training_source '" + s + "'");
}

} // namespace

void to_json(json &j, const PipelineConfig &c) {
    j = json{{"dimension", c.dimension},
             {"n_train_functions", c.n_train_functions},
             {"training_source", to_string(c.training_source)},
             {"samples_per_dim", c.doe_samples_per_dim()},
             {"run_budget_per_dim", c.run_budget() / c.dimension},
             {"tpe_budget", c.tpe_budget},
             {"tpe_startup", c.tpe_startup},
             {"repetitions", c.repetitions},
             {"restrict_to_continuous_hp", c.restrict_to_continuous_hp},
             {"master_seed", c.master_seed},
             {"test_suite", c.test_suite},
             {"tie_tolerance", c.tie_tolerance},
             {"prune_threshold", c.prune_threshold},
             {"grid_splits", c.grid_splits},
             {"grid", c.grid},
             {"learning_rate", c.train.learning_rate},
             {"momentum", c.train.momentum},
             {"batch_size", c.train.batch_size}};
}

void from_json(const json &j, PipelineConfig &c) {
    if (!j.is_object()) {
        throw ParameterError("pipeline config must be a JSON object");
    }
    for (const auto &[key, value] : j.items()) {
        if (key == "dimension") {
            c.dimension = value.get<std::size_t>();
        } else if (key == "n_train_functions") {
            c.n_train_functions = value.get<std::size_t>();
        } else if (key == "training_source") {
            c.training_source = parse_source(value.get<std::string>());
        } else if (key == "samples_per_dim") {
            c.samples_per_dim = value.get<std::size_t>();
        } else if (key == "run_budget_per_dim") {
            c.run_budget_per_dim = value.get<std::size_t>();
        } else if (key == "tpe_budget") {
            c.tpe_budget = value.get<std::size_t>();
        } else if (key == "tpe_startup") {
            c.tpe_startup = value.get<std::size_t>();
        } else if (key == "repetitions") {
            c.repetitions = value.get<std::size_t>();
        } else if (key == "restrict_to_continuous_hp") {
            c.restrict_to_continuous_hp = value.get<bool>();
        } else if (key == "master_seed") {
            c.master_seed = value.get<std::uint64_t>();
        } else if (key == "output_dir") {
            c.output_dir = value.get<std::string>();
        } else if (key == "test_suite") {
            c.test_suite = value.get<std::vector<int>>();
        } else if (key == "jobs") {
            c.jobs = value.get<std::size_t>();
        } else if (key == "tie_tolerance") {
            c.tie_tolerance = value.get<double>();
        } else if (key == "prune_threshold") {
            c.prune_threshold = value.get<double>();
        } else if (key == "grid_splits") {
            c.grid_splits = value.get<std::size_t>();
        } else if (key == "grid") {
            c.grid = value.get<std::vector<NnArchitecture>>();
        } else if (key == "learning_rate") {
            c.train.learning_rate = value.get<double>();
        } else if (key == "momentum") {
            c.train.momentum = value.get<double>();
        } else if (key == "batch_size") {
            c.train.batch_size = value.get<std::size_t>();
        } else {
            throw ParameterError("unknown pipeline config key '" + key + "'");
        }
    }
}

PipelineConfig load_pipeline_config(const fs::path &path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError("invalid JSON in " + path.string(), e.byte);
    }
    PipelineConfig c;
    try {
        from_json(j, c);
    } catch (const json::exception &e) {
        throw ParameterError(std::string("invalid pipeline config: ") + e.what());
    }
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// helpers

namespace {

std::string function_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "f%04zu", index);
    return buf;
}

std::string bbob_id(int fid) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "bbob_f%02d", fid);
    return buf;
}

void write_json(const fs::path &path, const json &j) { write_file_atomic(path, j.dump(2) + "\n"); }

json read_json(const fs::path &path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError("invalid JSON in " + path.string(), e.byte);
    }
}

json ela_to_json(const ElaVector &v) { return json{{"version", kElaManifestVersion}, {"names", v.names}, {"values", v.values}}; }

ElaVector ela_from_json(const json &j) {
    ElaVector v;
    j.at("names").get_to(v.names);
    j.at("values").get_to(v.values);
    return v;
}

LabelSettings label_settings(const PipelineConfig &cfg) {
    LabelSettings s;
    s.budget_tpe = cfg.tpe_budget;
    s.budget_run = cfg.run_budget();
    s.repetitions = cfg.repetitions;
    s.tpe.n_startup = cfg.tpe_startup;
    s.tpe.restrict_to_continuous_hp = cfg.restrict_to_continuous_hp;
    return s;
}

fs::path pool_dir(const PipelineConfig &c) { return c.output_dir / "pool"; }
fs::path labels_dir(const PipelineConfig &c) { return c.output_dir / "labels"; }
fs::path model_dir(const PipelineConfig &c) { return c.output_dir / "model"; }
fs::path eval_dir(const PipelineConfig &c) { return c.output_dir / "eval"; }

struct PoolEntry {
    std::string id;
    std::string kind; // "rgf" or "mabbob"
    std::string file;
};

std::vector<PoolEntry> read_manifest(const PipelineConfig &cfg) {
    const fs::path path = pool_dir(cfg) / "manifest.json";
    if (!fs::exists(path)) {
        throw IoError("missing function pool manifest " + path.string() + " (run 'generate' first)");
    }
    const json j = read_json(path);
    if (j.at("dimension").get<std::size_t>() != cfg.dimension) {
        throw ParameterError("pool dimension differs from the configured dimension");
    }
    std::vector<PoolEntry> out;
    for (const auto &e : j.at("functions")) {
        out.push_back({e.at("id").get<std::string>(), e.at("kind").get<std::string>(), e.at("file").get<std::string>()});
    }
    return out;
}

NnModel load_model(const PipelineConfig &cfg) {
    const fs::path path = model_dir(cfg) / "model.json";
    if (!fs::exists(path)) {
        throw IoError("missing model " + path.string() + " (run 'train' first)");
    }
    NnModel m;
    try {
        read_json(path).get_to(m);
    } catch (const json::exception &e) {
        throw ParameterError(std::string("invalid model file: ") + e.what());
    }
    return m;
}

} // namespace

FunctionPtr load_pool_function(const PipelineConfig &cfg, const std::string &id) {
    for (const auto &e : read_manifest(cfg)) {
        if (e.id != id) {
            continue;
        }
        const fs::path path = pool_dir(cfg) / e.file;
        if (e.kind == "rgf") {
            std::istringstream in(read_file(path));
            auto trees = read_rgf_batch(in);
            if (trees.size() != 1) {
                throw ParseError("expected one tree in " + path.string(), 0);
            }
            return std::make_shared<const RgfFunction>(id, std::move(trees.front()));
        }
        MaBbobSpec spec;
        read_json(path).get_to(spec);
        return make_mabbob(spec, cfg.dimension);
    }
    throw ParameterError("unknown pool function '" + id + "'");
}

// ---------------------------------------------------------------------------
// stages

void stage_generate(const PipelineConfig &cfg) {
    cfg.validate();
    json manifest{{"dimension", cfg.dimension},
                  {"training_source", to_string(cfg.training_source)},
                  {"master_seed", cfg.master_seed},
                  {"functions", json::array()}};
    for (std::size_t i = 0; i < cfg.n_train_functions; ++i) {
        const std::string id = function_id(i);
        const bool rgf = cfg.training_source == TrainingSource::rgf ||
                         (cfg.training_source == TrainingSource::mixed && i % 2 == 0);
        std::string file;
        if (rgf) {
            RgfGenParams params;
            params.seed = derive_seed(cfg.master_seed, "generate", i);
            const ExprTree tree = generate_tree(params, cfg.dimension);
            std::ostringstream out;
            write_rgf_batch(out, std::span<const ExprTree>(&tree, 1), cfg.dimension);
            file = id + ".rgf";
            write_file_atomic(pool_dir(cfg) / file, out.str());
        } else {
            const MaBbobSpec spec = sample_mabbob_spec(cfg.dimension, derive_seed(cfg.master_seed, "generate", i));
            file = id + ".mabbob.json";
            write_json(pool_dir(cfg) / file, spec);
        }
        manifest["functions"].push_back({{"id", id}, {"kind", rgf ? "rgf" : "mabbob"}, {"file", file}});
    }
    write_json(pool_dir(cfg) / "manifest.json", manifest);
}

namespace {

/// Labels one pool function; the meta file is written last and marks completion.
void label_one(const PipelineConfig &cfg, const PoolEntry &entry, std::size_t index) {
    const fs::path meta_path = labels_dir(cfg) / (entry.id + ".meta.json");
    if (fs::exists(meta_path)) {
        return;
    }
    const FunctionPtr f = load_pool_function(cfg, entry.id);
    const Doe doe = sample_doe(*f, cfg.doe_samples_per_dim(), derive_seed(cfg.master_seed, "doe", index));
    json meta{{"id", entry.id}, {"kind", entry.kind}};
    if (doe.degenerate) {
        meta["labeled"] = false;
        meta["verdict"] = {{"accepted", false}, {"reasons", {"constant objective on the DoE"}}};
        write_json(meta_path, meta);
        return;
    }
    const ElaVector ela = compute_ela(doe);
    HpoResult hpo = label_function(*f, doe.y_raw_max, label_settings(cfg), derive_seed(cfg.master_seed, "label", index));
    hpo.function_id = entry.id;
    write_json(labels_dir(cfg) / (entry.id + ".hpo.json"), hpo);

    SelectionVerdict v;
    if (entry.kind == "rgf") {
        v = screen(hpo, cfg.tie_tolerance);
    } else {
        v.function_id = entry.id;
        v.y_opt = *f->known_optimum();
        v.accepted = true;
        v.reasons.push_back("screen skipped: optimum known");
    }
    meta["labeled"] = true;
    meta["ela"] = ela_to_json(ela);
    meta["verdict"] = {{"y_opt", v.y_opt},          {"tau", v.kendall_tau},     {"z", v.z_score},
                       {"ambiguous", v.ambiguous}, {"outlier", v.outlier},     {"accepted", v.accepted},
                       {"reasons", v.reasons}};
    write_json(meta_path, meta);
}

} // namespace

void stage_label(const PipelineConfig &cfg) {
    cfg.validate();
    const auto pool = read_manifest(cfg);
    parallel_for(pool.size(), cfg.jobs, [&](std::size_t i) { label_one(cfg, pool[i], i); });

    // rebuild ledgers from disk, in id order
    FeatureMatrix features;
    std::vector<SelectionVerdict> verdicts;
    json accepted = json::array();
    std::vector<PoolEntry> sorted = pool;
    std::sort(sorted.begin(), sorted.end(), [](const PoolEntry &a, const PoolEntry &b) { return a.id < b.id; });
    for (const auto &e : sorted) {
        const fs::path meta_path = labels_dir(cfg) / (e.id + ".meta.json");
        if (!fs::exists(meta_path)) {
            continue;
        }
        const json meta = read_json(meta_path);
        const json &vj = meta.at("verdict");
        SelectionVerdict v;
        v.function_id = e.id;
        v.y_opt = vj.value("y_opt", std::nan(""));
        v.kendall_tau = vj.value("tau", std::nan(""));
        v.z_score = vj.value("z", std::nan(""));
        v.accepted = vj.at("accepted").get<bool>();
        v.reasons = vj.at("reasons").get<std::vector<std::string>>();
        verdicts.push_back(v);
        if (meta.at("labeled").get<bool>()) {
            features.append(e.id, ela_from_json(meta.at("ela")));
            if (v.accepted) {
                accepted.push_back(e.id);
            }
        }
    }
    write_feature_csv(labels_dir(cfg) / "features.csv", features);
    write_verdicts_csv(labels_dir(cfg) / "verdicts.csv", verdicts);
    write_json(labels_dir(cfg) / "accepted.json", accepted);
    write_json(labels_dir(cfg) / "feature_manifest.json",
               json{{"version", kElaManifestVersion}, {"names", ela_feature_names()}});
}

void stage_train(const PipelineConfig &cfg) {
    cfg.validate();
    const fs::path accepted_path = labels_dir(cfg) / "accepted.json";
    if (!fs::exists(accepted_path)) {
        throw IoError("missing " + accepted_path.string() + " (run 'label' first)");
    }
    const auto accepted = read_json(accepted_path).get<std::vector<std::string>>();
    if (accepted.size() < 25) {
        throw ParameterError("training needs at least 25 accepted functions, found " + std::to_string(accepted.size()));
    }
    const FeatureMatrix all = read_feature_csv(labels_dir(cfg) / "features.csv");
    FeatureMatrix train;
    train.names = all.names;
    train.values.resize(static_cast<Eigen::Index>(accepted.size()), all.values.cols());
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        const auto it = std::find(all.row_ids.begin(), all.row_ids.end(), accepted[i]);
        if (it == all.row_ids.end()) {
            throw ParameterError("accepted function " + accepted[i] + " has no feature row");
        }
        train.values.row(static_cast<Eigen::Index>(i)) = all.values.row(it - all.row_ids.begin());
        train.row_ids.push_back(accepted[i]);
    }

    const std::vector<std::string> kept = prune_correlated(train, cfg.prune_threshold);
    if (kept.empty()) {
        throw ParameterError("no informative features left after pruning");
    }
    NnModel model;
    model.scaler = fit_scaler(train, kept);

    const std::size_t width = target_width(cfg.restrict_to_continuous_hp);
    LabeledDataset data;
    data.restrict_to_continuous_hp = cfg.restrict_to_continuous_hp;
    data.x.resize(train.values.rows(), static_cast<Eigen::Index>(kept.size()));
    data.y.resize(train.values.rows(), static_cast<Eigen::Index>(width));
    for (Eigen::Index i = 0; i < train.values.rows(); ++i) {
        const auto row = model.scaler.apply_row(train, i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            data.x(i, static_cast<Eigen::Index>(j)) = row[j];
        }
        HpoResult hpo;
        read_json(labels_dir(cfg) / (train.row_ids[static_cast<std::size_t>(i)] + ".hpo.json")).get_to(hpo);
        data.y.row(i) = encode(hpo.best_config, cfg.restrict_to_continuous_hp).transpose();
    }

    const GridSearchResult grid = grid_search(data, derive_seed(cfg.master_seed, "grid", 0), cfg.grid, cfg.grid_splits, cfg.train);
    model.arch = grid.best;
    model.network = train_network(data, grid.best, derive_seed(cfg.master_seed, "train", 0), cfg.train);

    std::string grid_csv = "n_hidden,hidden_size,epochs,validation_loss\n";
    for (const auto &c : grid.cells) {
        grid_csv += std::to_string(c.arch.n_hidden) + ',' + std::to_string(c.arch.hidden_size) + ',' +
                    std::to_string(c.arch.epochs) + ',' + format_double(c.validation_loss) + '\n';
    }
    write_file_atomic(model_dir(cfg) / "grid.csv", grid_csv);
    write_json(model_dir(cfg) / "feature_manifest.json",
               json{{"version", kElaManifestVersion}, {"training_rows", accepted.size()}, {"kept", kept}});
    write_json(model_dir(cfg) / "model.json", model);
}

namespace {

struct TestFunction {
    int fid = 0;
    std::string id;
    FunctionPtr f;
    double y_worst = 0.0;
    ElaVector ela;
};

TestFunction prepare_test_function(const PipelineConfig &cfg, int fid) {
    TestFunction t;
    t.fid = fid;
    t.id = bbob_id(fid);
    t.f = make_bbob(fid, cfg.dimension, derive_seed(cfg.master_seed, "bbob", static_cast<std::uint64_t>(fid)));
    const Doe doe = sample_doe(*t.f, cfg.doe_samples_per_dim(),
                               derive_seed(cfg.master_seed, "eval-doe", static_cast<std::uint64_t>(fid)));
    t.y_worst = doe.y_raw_max;
    t.ela = compute_ela(doe);
    return t;
}

} // namespace

void stage_evaluate(const PipelineConfig &cfg) {
    cfg.validate();
    if (cfg.repetitions < 5) {
        throw ParameterError("evaluation needs at least 5 repetitions for the signed-rank test");
    }
    const NnModel model = load_model(cfg);
    const std::size_t n = cfg.test_suite.size();
    std::vector<TestFunction> tests(n);
    std::vector<HpoResult> hpo(n);

    parallel_for(n, cfg.jobs, [&](std::size_t i) {
        const int fid = cfg.test_suite[i];
        tests[i] = prepare_test_function(cfg, fid);
        const fs::path path = eval_dir(cfg) / (tests[i].id + ".hpo.json");
        if (fs::exists(path)) {
            read_json(path).get_to(hpo[i]);
            return;
        }
        hpo[i] = label_function(*tests[i].f, tests[i].y_worst, label_settings(cfg),
                                derive_seed(cfg.master_seed, "eval-hpo", static_cast<std::uint64_t>(fid)));
        hpo[i].function_id = tests[i].id;
        write_json(path, hpo[i]);
    });

    std::map<std::string, TrialHistory> histories;
    for (std::size_t i = 0; i < n; ++i) {
        histories[tests[i].id] = hpo[i].history;
    }
    const Configuration sbs = select_sbs(histories);

    struct Row {
        std::string config_name;
        std::size_t rep;
        double auc;
        double final_best;
    };
    std::vector<std::vector<Row>> runs(n);
    std::vector<Configuration> predicted(n);
    parallel_for(n, cfg.jobs, [&](std::size_t i) {
        const TestFunction &t = tests[i];
        predicted[i] = predict(model, t.ela);
        const std::vector<std::pair<std::string, Configuration>> configs{
            {"predicted", predicted[i]}, {"default", default_config(cfg.dimension)}, {"sbs", sbs}, {"vbs", select_vbs(hpo[i].history)}};
        const double y_opt = *t.f->known_optimum();
        for (const auto &[name, c] : configs) {
            for (std::size_t r = 0; r < cfg.repetitions; ++r) {
                // seeds depend on the function and repetition only, so runs are paired across configurations
                const auto trace = run_cmaes(*t.f, c, cfg.run_budget(),
                                             derive_seed(cfg.master_seed, "eval-run", static_cast<std::uint64_t>(t.fid), 0, r));
                runs[i].push_back({name, r, guarded_auc(trace.best_so_far, y_opt, t.y_worst), trace.final_best()});
            }
        }
    });

    std::string runs_csv = "function_id,configuration,repetition,auc,final_best\n";
    std::string report = "function_id,baseline,median_auc_ours,median_auc_baseline,p_value,significant_at_0.05\n";
    json predictions = json::object();
    for (std::size_t i = 0; i < n; ++i) {
        std::map<std::string, std::vector<double>> aucs;
        for (const auto &r : runs[i]) {
            runs_csv += tests[i].id + ',' + r.config_name + ',' + std::to_string(r.rep) + ',' + format_double(r.auc) +
                        ',' + format_double(r.final_best) + '\n';
            aucs[r.config_name].push_back(r.auc);
        }
        const auto &ours = aucs["predicted"];
        for (const std::string baseline : {"default", "sbs", "vbs"}) {
            const auto &theirs = aucs[baseline];
            const double p = wilcoxon_one_sided(ours, theirs);
            report += tests[i].id + ',' + baseline + ',' + format_double(median(ours)) + ',' +
                      format_double(median(theirs)) + ',' + format_double(p) + ',' + (p < 0.05 ? "true" : "false") + '\n';
        }
        predictions[tests[i].id] = predicted[i];
    }
    write_file_atomic(eval_dir(cfg) / "runs.csv", runs_csv);
    write_file_atomic(eval_dir(cfg) / "report.csv", report);
    write_json(eval_dir(cfg) / "predictions.json", json{{"predicted", predictions}, {"sbs", sbs}});
}

std::string stage_report(const PipelineConfig &cfg) {
    const fs::path path = eval_dir(cfg) / "report.csv";
    if (!fs::exists(path)) {
        throw IoError("missing " + path.string() + " (run 'evaluate' first)");
    }
    const CsvTable table = read_csv(path);
    std::map<std::string, std::pair<int, int>> tally; // baseline -> (not worse, significant)
    std::ostringstream out;
    out << "function     baseline  ours       baseline   p\n";
    for (const auto &row : table.rows) {
        const double ours = parse_double(row[2]);
        const double theirs = parse_double(row[3]);
        char line[160];
        std::snprintf(line, sizeof line, "%-12s %-9s %-10.6f %-10.6f %.4g%s\n", row[0].c_str(), row[1].c_str(), ours,
                      theirs, parse_double(row[4]), row[5] == "true" ? " *" : "");
        out << line;
        auto &t = tally[row[1]];
        t.first += ours <= theirs ? 1 : 0;
        t.second += row[5] == "true" ? 1 : 0;
    }
    for (const auto &[baseline, t] : tally) {
        out << "vs " << baseline << ": median AUC not worse on " << t.first << " function(s), significantly better on "
            << t.second << "\n";
    }
    return out.str();
}

Configuration predict_from_doe_csv(const PipelineConfig &cfg, const fs::path &doe_csv) {
    const CsvTable table = read_csv(doe_csv);
    const std::size_t d = cfg.dimension;
    if (table.header.size() != d + 1) {
        throw ParameterError("DoE CSV needs columns x0..x" + std::to_string(d - 1) + ",y");
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(d));
    Eigen::VectorXd y(static_cast<Eigen::Index>(table.rows.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(table.rows[i][j]);
        }
        y[static_cast<Eigen::Index>(i)] = parse_double(table.rows[i][d]);
    }
    const Doe doe = make_doe(std::move(x), y);
    return predict(load_model(cfg), compute_ela(doe));
}

} // namespace laac
