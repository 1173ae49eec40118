#pragma once

#include "esnevo/classify.hpp"
#include "esnevo/dataset.hpp"
#include "esnevo/mopso.hpp"
#include "esnevo/rae.hpp"
#include "esnevo/weight_pso.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace esnevo::pipeline {

using Json = nlohmann::ordered_json;

struct DatasetSpec {
    std::string name;
    DatasetFormat format = DatasetFormat::ucr_csv;
    std::string train_path;  ///< ucr_csv
    std::string test_path;   ///< ucr_csv
    std::string path;        ///< uci_csv single file
    double split_ratio = 0.715;
};

struct BaselineSpec {
    double connectivity = 0.5;
    double input_connectivity = 1.0;
};

/// Everything one end-to-end invocation needs; JSON-loadable, flag-overridable.
struct RunConfig {
    DatasetSpec dataset;
    mopso::ObjectiveMode mode = mopso::ObjectiveMode::bi;
    mopso::EsnDefaults esn;
    mopso::ArchSearchSpace search;
    mopso::MopsoParams mopso_params;
    wpso::PsoParams pso_params;
    wpso::WeightMode weight_mode = wpso::WeightMode::full;
    Pooling pooling = Pooling::last;
    classify::ClassifierKind classifier = classify::ClassifierKind::linear_svm;
    double classifier_hyper = 1.0;
    BaselineSpec baseline;
    std::optional<double> noise_snr_db;
    int num_runs = 5;
    std::uint64_t master_seed = 42;
    std::string out_dir = "out";

    void validate() const;
};

RunConfig config_from_json(const Json& j);
Json config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::string& path);
/// FNV-1a 64 hex digest of the canonical config JSON.
std::string config_digest(const RunConfig& config);

struct SolutionReport {
    Eigen::VectorXd genome;
    EsnConfig config;
    std::vector<double> objectives_pre;
    std::vector<double> objectives_post;
    std::vector<double> rmse_trace;  ///< level-2 best-ever RMSE per iteration
    double ca = 0.0;
    std::string pooling;
    std::string classifier;
    classify::ConfusionMatrix confusion;
};

struct RunReport {
    int run_index = 0;
    std::uint64_t run_seed = 0;
    bool completed = false;
    std::string error;
    std::vector<SolutionReport> solutions;
    int best_solution = -1;
    double best_ca = 0.0;
    double level1_seconds = 0.0;
    double level2_seconds = 0.0;
    double classify_seconds = 0.0;
};

struct FrontReport {
    Json config_echo;
    std::string digest;
    std::vector<RunReport> runs;
    int completed_runs = 0;
    double mean_best_ca = 0.0;
    double stddev_best_ca = 0.0;  ///< sample stddev; 0 for a single run
    double min_best_ca = 0.0;
    double max_best_ca = 0.0;
    double total_seconds = 0.0;
};

/// Per-run artifacts kept outside report.json (front + level-1 trace).
struct RunArtifacts {
    std::vector<mopso::EsnArchiveEntry> front;
    std::vector<std::vector<std::vector<double>>> level1_trace;
};

struct PipelineResult {
    FrontReport report;
    std::vector<RunArtifacts> artifacts;  ///< one per run, failed runs empty
};

/// Algorithm-2 end to end on an already loaded dataset: per run, level-1
/// MOPSO, level-2 PSO on every archived solution, feature extraction,
/// classification and aggregation. A failing run is recorded and the
/// remaining runs proceed.
PipelineResult run_pipeline(const RunConfig& config, const Dataset& data);

/// Loads the dataset named by the config, then runs the pipeline.
PipelineResult run_pipeline(const RunConfig& config);

Dataset load_configured_dataset(const RunConfig& config);

// ---- persistence ----------------------------------------------------------

struct FrontEntry {
    Eigen::VectorXd genome;
    std::vector<double> objectives_pre;
    std::optional<std::vector<double>> objectives_post;
    std::optional<double> ca;
};

struct FrontFile {
    int schema_version = 1;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<FrontEntry> entries;
};

enum class FrontFormat { json, csv };

/// JSON schema {schema_version, config_digest, seed, entries:[...]}; CSV one
/// row per entry (genome dims, current objectives, ca). JSON re-imports and
/// re-exports byte-identically.
void export_front(const FrontFile& front, const std::string& path, FrontFormat format);
FrontFile import_front(const std::string& path);

Json report_to_json(const FrontReport& report);

/// Writes report.json, front.json/front.csv (best completed run), trace.jsonl
/// (all runs) and confusion_<dataset>.csv into config.out_dir.
void write_run_outputs(const RunConfig& config, const Dataset& data, const PipelineResult& result);

// ---- baselines ------------------------------------------------------------

enum class BaselineKind { raw, rae, ml_rae };

BaselineKind baseline_from_string(const std::string& s);
std::string to_string(BaselineKind k);

struct BaselineResult {
    double ca = 0.0;
    classify::ConfusionMatrix confusion;
};

/// Comparison pipelines of the results tables: raw sequences straight into
/// the classifier, or an unevolved (hand-set) basic/ML RAE feeding it.
BaselineResult run_baseline(const Dataset& data, BaselineKind kind, const RunConfig& config,
                            std::uint64_t seed);

}  // namespace esnevo::pipeline
