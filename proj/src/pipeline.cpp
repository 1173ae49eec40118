#include "esnevo/pipeline.hpp"

#include "esnevo/errors.hpp"
#include "esnevo/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

namespace esnevo::pipeline {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string mode_to_string(mopso::ObjectiveMode m) {
    return m == mopso::ObjectiveMode::tri ? "tri" : "bi";
}

mopso::ObjectiveMode mode_from_string(const std::string& s) {
    if (s == "bi") return mopso::ObjectiveMode::bi;
    if (s == "tri") return mopso::ObjectiveMode::tri;
    throw ConfigError("unknown mode '" + s + "' (expected bi|tri)");
}

std::string weight_mode_to_string(wpso::WeightMode m) {
    return m == wpso::WeightMode::scaling_only ? "scaling-only" : "full";
}

wpso::WeightMode weight_mode_from_string(const std::string& s) {
    if (s == "full") return wpso::WeightMode::full;
    if (s == "scaling-only" || s == "scaling_only") return wpso::WeightMode::scaling_only;
    throw ConfigError("unknown weight mode '" + s + "' (expected full|scaling-only)");
}

std::string format_to_string(DatasetFormat f) {
    return f == DatasetFormat::uci_csv ? "uci_csv" : "ucr_csv";
}

DatasetFormat format_from_string(const std::string& s) {
    if (s == "ucr_csv") return DatasetFormat::ucr_csv;
    if (s == "uci_csv") return DatasetFormat::uci_csv;
    throw ConfigError("unknown dataset format '" + s + "' (expected ucr_csv|uci_csv)");
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vector(const std::vector<double>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    std::copy(v.begin(), v.end(), out.data());
    return out;
}

}  // namespace

void RunConfig::validate() const {
    search.validate();
    if (num_runs < 1) throw ConfigError("num_runs must be >= 1");
    if (mopso_params.population < 1 || pso_params.population < 1)
        throw ConfigError("population sizes must be >= 1");
    if (mopso_params.iterations < 0 || pso_params.iterations < 0)
        throw ConfigError("iteration counts must be >= 0");
    if (!(esn.spectral_radius > 0.0)) throw ConfigError("spectral_radius must be positive");
    if (esn.ridge_lambda < 0.0) throw ConfigError("ridge_lambda must be >= 0");
    if (noise_snr_db && !std::isfinite(*noise_snr_db))
        throw ConfigError("noise_snr_db must be finite");
}

RunConfig config_from_json(const Json& j) {
    RunConfig c;
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        c.dataset.name = d.value("name", "");
        c.dataset.format = format_from_string(d.value("format", "ucr_csv"));
        c.dataset.train_path = d.value("train_path", "");
        c.dataset.test_path = d.value("test_path", "");
        c.dataset.path = d.value("path", "");
        c.dataset.split_ratio = d.value("split_ratio", 0.715);
    }
    c.mode = mode_from_string(j.value("mode", "bi"));
    if (j.contains("esn")) {
        const auto& e = j.at("esn");
        c.esn.spectral_radius = e.value("spectral_radius", 0.9);
        c.esn.ridge_lambda = e.value("ridge_lambda", 1e-6);
        c.esn.washout = e.value("washout", 0);
    }
    if (j.contains("search")) {
        const auto& s = j.at("search");
        c.search.num_layers = s.value("num_layers", 2);
        c.search.max_sizes = s.value("max_sizes", std::vector<int>{});
        if (c.search.max_sizes.empty())
            c.search.max_sizes.assign(static_cast<std::size_t>(c.search.num_layers), 500);
        c.search.conn_lower = s.value("conn_lower", 0.0);
        c.search.conn_upper = s.value("conn_upper", 1.0);
    }
    if (j.contains("mopso")) {
        const auto& m = j.at("mopso");
        c.mopso_params.population = m.value("population", 20);
        c.mopso_params.iterations = m.value("iterations", 50);
        c.mopso_params.inertia = m.value("inertia", 0.5);
        c.mopso_params.c1 = m.value("c1", 0.1);
        c.mopso_params.c2 = m.value("c2", 0.2);
        c.mopso_params.leaders = m.value("leaders", 10);
        c.mopso_params.mutation_rate = m.value("mutation_rate", 0.5);
    }
    if (j.contains("pso")) {
        const auto& p = j.at("pso");
        c.pso_params.population = p.value("population", 10);
        c.pso_params.iterations = p.value("iterations", 50);
        c.pso_params.inertia = p.value("inertia", 0.9);
        c.pso_params.c1 = p.value("c1", 0.1);
        c.pso_params.c2 = p.value("c2", 0.2);
    }
    c.weight_mode = weight_mode_from_string(j.value("weight_mode", "full"));
    c.pooling = pooling_from_string(j.value("pooling", "last"));
    if (j.contains("classifier")) {
        const auto& cl = j.at("classifier");
        c.classifier = classify::classifier_from_string(cl.value("kind", "svm"));
        c.classifier_hyper = cl.value("hyper", 1.0);
    }
    if (j.contains("baseline")) {
        const auto& b = j.at("baseline");
        c.baseline.connectivity = b.value("connectivity", 0.5);
        c.baseline.input_connectivity = b.value("input_connectivity", 1.0);
    }
    if (j.contains("noise_snr_db") && !j.at("noise_snr_db").is_null())
        c.noise_snr_db = j.at("noise_snr_db").get<double>();
    c.num_runs = j.value("num_runs", 5);
    c.master_seed = j.value("master_seed", static_cast<std::uint64_t>(42));
    c.out_dir = j.value("out_dir", "out");
    return c;
}

Json config_to_json(const RunConfig& c) {
    Json j;
    j["dataset"] = {{"name", c.dataset.name},
                    {"format", format_to_string(c.dataset.format)},
                    {"train_path", c.dataset.train_path},
                    {"test_path", c.dataset.test_path},
                    {"path", c.dataset.path},
                    {"split_ratio", c.dataset.split_ratio}};
    j["mode"] = mode_to_string(c.mode);
    j["esn"] = {{"spectral_radius", c.esn.spectral_radius},
                {"ridge_lambda", c.esn.ridge_lambda},
                {"washout", c.esn.washout}};
    j["search"] = {{"num_layers", c.search.num_layers},
                   {"max_sizes", c.search.max_sizes},
                   {"conn_lower", c.search.conn_lower},
                   {"conn_upper", c.search.conn_upper}};
    j["mopso"] = {{"population", c.mopso_params.population},
                  {"iterations", c.mopso_params.iterations},
                  {"inertia", c.mopso_params.inertia},
                  {"c1", c.mopso_params.c1},
                  {"c2", c.mopso_params.c2},
                  {"leaders", c.mopso_params.leaders},
                  {"mutation_rate", c.mopso_params.mutation_rate}};
    j["pso"] = {{"population", c.pso_params.population},
                {"iterations", c.pso_params.iterations},
                {"inertia", c.pso_params.inertia},
                {"c1", c.pso_params.c1},
                {"c2", c.pso_params.c2}};
    j["weight_mode"] = weight_mode_to_string(c.weight_mode);
    j["pooling"] = to_string(c.pooling);
    j["classifier"] = {{"kind", classify::to_string(c.classifier)}, {"hyper", c.classifier_hyper}};
    j["baseline"] = {{"connectivity", c.baseline.connectivity},
                     {"input_connectivity", c.baseline.input_connectivity}};
    if (c.noise_snr_db)
        j["noise_snr_db"] = *c.noise_snr_db;
    else
        j["noise_snr_db"] = nullptr;
    j["num_runs"] = c.num_runs;
    j["master_seed"] = c.master_seed;
    j["out_dir"] = c.out_dir;
    return j;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

std::string config_digest(const RunConfig& config) {
    const std::string dump = config_to_json(config).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash;
    return os.str();
}

Dataset load_configured_dataset(const RunConfig& config) {
    const auto& d = config.dataset;
    if (d.format == DatasetFormat::ucr_csv) {
        if (d.train_path.empty() || d.test_path.empty())
            throw ConfigError("ucr_csv dataset needs train_path and test_path");
        return load_dataset(d.train_path, d.test_path, d.format, d.name);
    }
    if (d.path.empty()) throw ConfigError("uci_csv dataset needs path");
    return load_dataset_single(d.path, d.format, d.split_ratio,
                               derive_seed(config.master_seed, 0x5B117), d.name);
}

namespace {

SolutionReport evaluate_solution(const RunConfig& config, const Dataset& data,
                                 const mopso::EsnArchiveEntry& entry, std::uint64_t wpso_seed,
                                 double* level2_seconds, double* classify_seconds) {
    SolutionReport sol;
    sol.genome = entry.genome;
    sol.config = entry.config;
    sol.objectives_pre = entry.objectives;
    sol.pooling = to_string(config.pooling);
    sol.classifier = classify::to_string(config.classifier);

    const auto t_level2 = Clock::now();
    EsnNetwork incumbent =
        build_network(entry.config, static_cast<int>(data.train.front().sequence.cols()));
    wpso::WeightPsoResult refined =
        wpso::run_weight_pso(incumbent, data.train, config.pso_params, wpso_seed, config.weight_mode);
    sol.objectives_post = sol.objectives_pre;
    sol.objectives_post[0] = refined.train_rmse;
    sol.rmse_trace = refined.trace;
    if (level2_seconds) *level2_seconds += seconds_since(t_level2);

    const auto t_classify = Clock::now();
    FeatureSet train_features = extract_features(refined.network, data.train, config.pooling);
    FeatureSet test_features = extract_features(refined.network, data.test, config.pooling);
    train_features.num_classes = data.num_classes;
    test_features.num_classes = data.num_classes;
    const classify::ClassifierModel model =
        classify::train_classifier(train_features, config.classifier, config.classifier_hyper);
    const std::vector<int> predicted = classify::predict(model, test_features.features);
    sol.ca = classify::accuracy(predicted, test_features.labels);
    sol.confusion = classify::confusion_matrix(predicted, test_features.labels, data.num_classes);
    if (classify_seconds) *classify_seconds += seconds_since(t_classify);
    return sol;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, const Dataset& data) {
    config.validate();
    data.validate();
    const auto t_total = Clock::now();

    PipelineResult result;
    result.report.config_echo = config_to_json(config);
    result.report.digest = config_digest(config);
    result.artifacts.resize(static_cast<std::size_t>(config.num_runs));

    for (int r = 0; r < config.num_runs; ++r) {
        RunReport run;
        run.run_index = r;
        run.run_seed = derive_seed(config.master_seed, 100 + static_cast<std::uint64_t>(r));
        try {
            const Dataset* active = &data;
            Dataset noisy;
            if (config.noise_snr_db) {
                noisy = add_noise(data, *config.noise_snr_db, derive_seed(run.run_seed, 0xA01));
                active = &noisy;
            }

            const auto t_level1 = Clock::now();
            mopso::EsnMopsoResult level1 = mopso::run_mopso_esn(
                active->train, config.search, config.esn, config.mopso_params, config.mode,
                run.run_seed);
            run.level1_seconds = seconds_since(t_level1);
            if (level1.front.empty())
                throw NumericalError("level-1 archive is empty (all evaluations failed)");

            for (std::size_t k = 0; k < level1.front.size(); ++k) {
                SolutionReport sol = evaluate_solution(
                    config, *active, level1.front[k],
                    derive_seed(run.run_seed, 200 + static_cast<std::uint64_t>(k)),
                    &run.level2_seconds, &run.classify_seconds);
                if (run.best_solution < 0 || sol.ca > run.best_ca) {
                    run.best_solution = static_cast<int>(k);
                    run.best_ca = sol.ca;
                }
                run.solutions.push_back(std::move(sol));
            }
            run.completed = true;
            result.artifacts[static_cast<std::size_t>(r)] =
                RunArtifacts{std::move(level1.front), std::move(level1.trace)};
        } catch (const std::exception& e) {
            run.completed = false;
            run.error = e.what();
            std::cerr << "run " << r << " failed: " << e.what() << "\n";
        }
        result.report.runs.push_back(std::move(run));
    }

    auto& rep = result.report;
    std::vector<double> best;
    for (const auto& run : rep.runs)
        if (run.completed) best.push_back(run.best_ca);
    rep.completed_runs = static_cast<int>(best.size());
    if (!best.empty()) {
        rep.mean_best_ca = std::accumulate(best.begin(), best.end(), 0.0) / best.size();
        rep.min_best_ca = *std::min_element(best.begin(), best.end());
        rep.max_best_ca = *std::max_element(best.begin(), best.end());
        if (best.size() > 1) {
            double ss = 0.0;
            for (double b : best) ss += (b - rep.mean_best_ca) * (b - rep.mean_best_ca);
            rep.stddev_best_ca = std::sqrt(ss / static_cast<double>(best.size() - 1));
        }
    }
    rep.total_seconds = seconds_since(t_total);
    return result;
}

PipelineResult run_pipeline(const RunConfig& config) {
    return run_pipeline(config, load_configured_dataset(config));
}

// ---- persistence ----------------------------------------------------------

namespace {

Json front_to_json(const FrontFile& front) {
    Json j;
    j["schema_version"] = front.schema_version;
    j["config_digest"] = front.config_digest;
    j["seed"] = front.seed;
    j["entries"] = Json::array();
    for (const auto& e : front.entries) {
        Json entry;
        entry["genome"] = to_vector(e.genome);
        entry["objectives_pre"] = e.objectives_pre;
        if (e.objectives_post)
            entry["objectives_post"] = *e.objectives_post;
        else
            entry["objectives_post"] = nullptr;
        if (e.ca)
            entry["ca"] = *e.ca;
        else
            entry["ca"] = nullptr;
        j["entries"].push_back(std::move(entry));
    }
    return j;
}

}  // namespace

void export_front(const FrontFile& front, const std::string& path, FrontFormat format) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    if (format == FrontFormat::json) {
        out << front_to_json(front).dump(2) << "\n";
    } else {
        const std::size_t genome_len = front.entries.empty()
                                           ? 0
                                           : static_cast<std::size_t>(front.entries.front().genome.size());
        const std::size_t n_obj =
            front.entries.empty() ? 0 : front.entries.front().objectives_pre.size();
        for (std::size_t g = 0; g < genome_len; ++g) out << "g" << g << ",";
        for (std::size_t m = 0; m < n_obj; ++m) out << "obj" << m << ",";
        out << "ca\n";
        out << std::setprecision(17);
        for (const auto& e : front.entries) {
            for (Eigen::Index g = 0; g < e.genome.size(); ++g) out << e.genome[g] << ",";
            const auto& objs = e.objectives_post ? *e.objectives_post : e.objectives_pre;
            for (double v : objs) out << v << ",";
            if (e.ca)
                out << *e.ca;
            else
                out << "";
            out << "\n";
        }
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

FrontFile import_front(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open front file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("invalid front JSON in '" + path + "': " + e.what());
    }
    FrontFile front;
    front.schema_version = j.value("schema_version", 1);
    front.config_digest = j.value("config_digest", "");
    front.seed = j.value("seed", static_cast<std::uint64_t>(0));
    for (const auto& entry : j.value("entries", Json::array())) {
        FrontEntry e;
        e.genome = from_vector(entry.at("genome").get<std::vector<double>>());
        e.objectives_pre = entry.at("objectives_pre").get<std::vector<double>>();
        if (entry.contains("objectives_post") && !entry.at("objectives_post").is_null())
            e.objectives_post = entry.at("objectives_post").get<std::vector<double>>();
        if (entry.contains("ca") && !entry.at("ca").is_null()) e.ca = entry.at("ca").get<double>();
        front.entries.push_back(std::move(e));
    }
    return front;
}

namespace {

Json config_to_json_esn(const EsnConfig& c) {
    return Json{{"num_layers", c.num_layers},
                {"layer_sizes", c.layer_sizes},
                {"input_connectivity", c.input_connectivity},
                {"layer_connectivities", c.layer_connectivities},
                {"inter_connectivities", c.inter_connectivities},
                {"spectral_radius_target", c.spectral_radius_target},
                {"ridge_lambda", c.ridge_lambda},
                {"washout", c.washout},
                {"rng_seed", c.rng_seed}};
}

}  // namespace

Json report_to_json(const FrontReport& report) {
    Json j;
    j["schema_version"] = 1;
    j["config_digest"] = report.digest;
    j["config"] = report.config_echo;
    j["summary"] = {{"completed_runs", report.completed_runs},
                    {"mean_best_ca", report.mean_best_ca},
                    {"stddev_best_ca", report.stddev_best_ca},
                    {"min_best_ca", report.min_best_ca},
                    {"max_best_ca", report.max_best_ca}};
    j["runs"] = Json::array();
    for (const auto& run : report.runs) {
        Json jr;
        jr["run_index"] = run.run_index;
        jr["run_seed"] = run.run_seed;
        jr["completed"] = run.completed;
        if (!run.completed) jr["error"] = run.error;
        jr["best_solution"] = run.best_solution;
        jr["best_ca"] = run.best_ca;
        jr["solutions"] = Json::array();
        for (const auto& sol : run.solutions) {
            Json js;
            js["genome"] = to_vector(sol.genome);
            js["config"] = config_to_json_esn(sol.config);
            js["objectives_pre"] = sol.objectives_pre;
            js["objectives_post"] = sol.objectives_post;
            js["rmse_trace"] = sol.rmse_trace;
            js["ca"] = sol.ca;
            js["pooling"] = sol.pooling;
            js["classifier"] = sol.classifier;
            js["confusion_counts"] = Json::array();
            for (Eigen::Index i = 0; i < sol.confusion.counts.rows(); ++i) {
                Json row = Json::array();
                for (Eigen::Index k = 0; k < sol.confusion.counts.cols(); ++k)
                    row.push_back(sol.confusion.counts(i, k));
                js["confusion_counts"].push_back(std::move(row));
            }
            jr["solutions"].push_back(std::move(js));
        }
        jr["timings"] = {{"level1_seconds", run.level1_seconds},
                         {"level2_seconds", run.level2_seconds},
                         {"classify_seconds", run.classify_seconds}};
        j["runs"].push_back(std::move(jr));
    }
    j["timings"] = {{"total_seconds", report.total_seconds}};
    return j;
}

void write_run_outputs(const RunConfig& config, const Dataset& data, const PipelineResult& result) {
    fs::create_directories(config.out_dir);
    const fs::path out(config.out_dir);

    {
        std::ofstream f(out / "report.json");
        if (!f) throw DataError("cannot write report.json");
        f << report_to_json(result.report).dump(2) << "\n";
    }

    // best completed run (ties -> lowest index) provides front.json/front.csv
    int best_run = -1;
    for (std::size_t r = 0; r < result.report.runs.size(); ++r) {
        const auto& run = result.report.runs[r];
        if (!run.completed) continue;
        if (best_run < 0 || run.best_ca > result.report.runs[static_cast<std::size_t>(best_run)].best_ca)
            best_run = static_cast<int>(r);
    }
    if (best_run >= 0) {
        const auto& run = result.report.runs[static_cast<std::size_t>(best_run)];
        FrontFile front;
        front.config_digest = result.report.digest;
        front.seed = run.run_seed;
        for (const auto& sol : run.solutions) {
            FrontEntry e;
            e.genome = sol.genome;
            e.objectives_pre = sol.objectives_pre;
            e.objectives_post = sol.objectives_post;
            e.ca = sol.ca;
            front.entries.push_back(std::move(e));
        }
        export_front(front, (out / "front.json").string(), FrontFormat::json);
        export_front(front, (out / "front.csv").string(), FrontFormat::csv);

        if (run.best_solution >= 0) {
            std::ofstream f(out / ("confusion_" + data.name + ".csv"));
            if (!f) throw DataError("cannot write the confusion matrix csv");
            f << run.solutions[static_cast<std::size_t>(run.best_solution)].confusion.to_csv();
        }
    }

    {
        std::ofstream f(out / "trace.jsonl");
        if (!f) throw DataError("cannot write trace.jsonl");
        for (std::size_t r = 0; r < result.artifacts.size(); ++r) {
            const auto& trace = result.artifacts[r].level1_trace;
            for (std::size_t it = 0; it < trace.size(); ++it) {
                Json line;
                line["run"] = r;
                line["iteration"] = it;
                line["archive_objectives"] = trace[it];
                f << line.dump() << "\n";
            }
        }
    }
}

// ---- baselines ------------------------------------------------------------

BaselineKind baseline_from_string(const std::string& s) {
    if (s == "raw") return BaselineKind::raw;
    if (s == "rae") return BaselineKind::rae;
    if (s == "ml-rae" || s == "ml_rae") return BaselineKind::ml_rae;
    throw ConfigError("unknown baseline '" + s + "' (expected raw|rae|ml-rae)");
}

std::string to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::raw: return "raw";
        case BaselineKind::rae: return "rae";
        case BaselineKind::ml_rae: return "ml-rae";
    }
    return "raw";
}

namespace {

FeatureSet raw_features(const DatasetSplit& split, int num_classes) {
    FeatureSet fs;
    const Eigen::Index t = split.front().sequence.rows();
    const Eigen::Index d = split.front().sequence.cols();
    fs.features.resize(static_cast<Eigen::Index>(split.size()), t * d);
    fs.labels.reserve(split.size());
    for (std::size_t i = 0; i < split.size(); ++i) {
        for (Eigen::Index n = 0; n < t; ++n)
            fs.features.row(static_cast<Eigen::Index>(i)).segment(n * d, d) =
                split[i].sequence.row(n);
        fs.labels.push_back(split[i].label);
    }
    fs.num_classes = num_classes;
    return fs;
}

}  // namespace

BaselineResult run_baseline(const Dataset& data, BaselineKind kind, const RunConfig& config,
                            std::uint64_t seed) {
    data.validate();
    FeatureSet train_features, test_features;
    if (kind == BaselineKind::raw) {
        train_features = raw_features(data.train, data.num_classes);
        test_features = raw_features(data.test, data.num_classes);
    } else {
        const int m = kind == BaselineKind::rae ? 1 : config.search.num_layers;
        EsnConfig esn;
        esn.num_layers = m;
        esn.layer_sizes.assign(static_cast<std::size_t>(m), 0);
        for (int k = 0; k < m; ++k)
            esn.layer_sizes[static_cast<std::size_t>(k)] =
                config.search.max_sizes[std::min<std::size_t>(static_cast<std::size_t>(k),
                                                              config.search.max_sizes.size() - 1)];
        esn.layer_connectivities.assign(static_cast<std::size_t>(m), config.baseline.connectivity);
        esn.inter_connectivities.assign(static_cast<std::size_t>(m) - 1,
                                        config.baseline.connectivity);
        esn.input_connectivity = config.baseline.input_connectivity;
        esn.spectral_radius_target = config.esn.spectral_radius;
        esn.ridge_lambda = config.esn.ridge_lambda;
        esn.washout = config.esn.washout;
        esn.rng_seed = derive_seed(seed, 0xBA5E);
        const EsnNetwork net = build_network(esn, data.input_dim);
        train_features = extract_features(net, data.train, config.pooling);
        test_features = extract_features(net, data.test, config.pooling);
        train_features.num_classes = data.num_classes;
        test_features.num_classes = data.num_classes;
    }
    const classify::ClassifierModel model =
        classify::train_classifier(train_features, config.classifier, config.classifier_hyper);
    const std::vector<int> predicted = classify::predict(model, test_features.features);
    BaselineResult result;
    result.ca = classify::accuracy(predicted, test_features.labels);
    result.confusion = classify::confusion_matrix(predicted, test_features.labels, data.num_classes);
    return result;
}

}  // namespace esnevo::pipeline
