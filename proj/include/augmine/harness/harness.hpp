// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "augmine/common.hpp"
#include "augmine/detection/detection.hpp"
#include "augmine/filter/filter.hpp"
#include "augmine/miner/miner.hpp"
#include "augmine/search/search.hpp"
#include "augmine/stats/stats.hpp"

namespace augmine::harness {

struct ManifestError : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

enum class GroundTruth { Misuse, Correct };

std::string to_string(GroundTruth label);

// One line of the JSON-lines manifest. Relative repo and pattern paths are
// resolved against the manifest's own directory at parse time.
struct MisuseManifestEntry {
    std::string id;
    std::string repo;          // local clone path (URLs are out of scope here)
    std::string fixing_commit;
    std::vector<std::string> misused_imports;
    std::string misuse_file;   // repository-relative path
    std::string misuse_method;
    std::optional<GroundTruth> label;
    std::vector<std::string> fixing_pattern_files; // AUG text, one file per pattern
};

MisuseManifestEntry entry_from_json(const nlohmann::json& j,
                                    const std::filesystem::path& base_dir);
nlohmann::json entry_to_json(const MisuseManifestEntry& entry);
std::vector<MisuseManifestEntry> parse_manifest(const std::string& jsonl_text,
                                                const std::filesystem::path& base_dir);
std::vector<MisuseManifestEntry> load_manifest(const std::filesystem::path& file);

struct StageError {
    std::string stage;
    std::string message;
};

struct PipelineOptions {
    filter::StrategyConfig strategy;
    miner::MiningConfig mining;  // when neither support bound is set, the
                                 // per-location detection default applies
    std::optional<std::chrono::milliseconds> timeout_internal; // mining, internal leg
    std::optional<std::chrono::milliseconds> timeout_external; // mining, external leg
    search::SearchProvider* provider = nullptr; // required for external search
    search::ExternalSearchConfig external;
    std::filesystem::path out_dir; // empty: keep everything in memory
    int top_k = 3;
    std::chrono::milliseconds aug_budget{30000}; // per-doc AUG build budget
    filter::MatchMode match_mode = filter::MatchMode::WholeToken;
};

// Detection-run support defaults; frequency studies use the relative pair.
inline constexpr int kDefaultAbsoluteSupportInternal = 2;
inline constexpr int kDefaultAbsoluteSupportExternal = 10;
inline constexpr double kDefaultRelativeSupportInternal = 0.08;
inline constexpr double kDefaultRelativeSupportExternal = 0.004;

// Stable per-cell key, e.g. "internal_all_sr050_mfon"; doubles as the run
// directory name.
std::string config_name(const filter::StrategyConfig& config);

struct RunReport {
    std::string entry_id;
    filter::StrategyConfig config;
    std::string config_name;
    bool skipped = false;       // vacuous cell, not a failure
    std::string skip_reason;
    std::vector<StageError> stage_errors;
    std::vector<std::string> diagnostics;

    std::string introducing_commit; // "" when the trace failed

    // Method funnel at the introducing revision: all / changed / changed
    // with third-party API use. Invariant: A >= C >= E >= 0.
    long long methods_all = 0;
    long long methods_changed = 0;
    long long methods_external = 0;
    double reduction_a2c = 0.0; // percent
    double reduction_c2e = 0.0; // percent, 0 and flagged undefined when C = 0
    bool reduction_c2e_defined = false;

    int import_count = 0;  // third-party imports in the misuse context
    int keyword_count = 0;

    int docs_retrieved = 0;
    int docs_kept = 0; // after the file-level sr filter
    int methods_selected = 0;
    int augs_built = 0;
    int augs_skipped_budget = 0;

    int min_support = 0; // resolved threshold, 0 when mining never ran
    int pattern_count = 0;
    bool mining_truncated = false;
    std::string truncation_reason;

    bool rpf_defined = false; // needs a fixing pattern and a non-empty corpus
    double relative_pattern_frequency = 0.0;
    int fixing_pattern_rank = 0; // shared rank of the matching mined pattern, 0 if absent
    bool top_hit = false;        // fixing_pattern_rank within [1, top_k]

    bool verdict_defined = false;
    detection::DetectionVerdict verdict;
};

nlohmann::json report_to_json(const RunReport& report);

// (from - to) / from * 100; 0 when from is 0.
double reduction_percent(long long from, long long to);

struct ReductionRow {
    std::string entry_id;
    std::string commit;
    long long methods_all = 0;
    long long methods_changed = 0;
    long long methods_external = 0;
    double a2c = 0.0;
    double c2e = 0.0;
    bool c2e_defined = false;
};

// One row per entry (first report of each entry wins; the counts do not vary
// across the strategy matrix).
std::vector<ReductionRow> report_reductions(const std::vector<RunReport>& runs);

struct ReductionSummary {
    int rows = 0;
    int unique_commits = 0; // rows with a traced commit, first per hash
    double mean_a2c = 0.0;
    double median_a2c = 0.0;
    double mean_c2e = 0.0;
    double median_c2e = 0.0;
};

// Aggregates over unique introducing commits only; rows without a traced
// commit are excluded.
ReductionSummary aggregate_reductions(const std::vector<ReductionRow>& rows);

struct Comparison {
    std::string axis; // "search_loc" | "search_imp" | "sr" | "method_filter"
    std::string level_a;
    std::string level_b;
    int n = 0; // paired cells where both sides had a defined frequency
    double statistic = 0.0;
    double p_value = 1.0;
    bool exact = false;
    bool defined = false;
    std::string note; // why the test is undefined, when it is
};

struct MatrixOptions {
    PipelineOptions base; // base.strategy is ignored; cells supply their own
    std::vector<double> sr_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    int workers = 1;
};

struct MatrixReport {
    std::vector<RunReport> runs; // entry-major, config order from matrix_configs
    std::vector<Comparison> comparisons;
    std::vector<ReductionRow> reductions;
    ReductionSummary reduction_summary;
};

// The replication grid: {Internal, External} x {All, Misused} x sr_grid x
// {filter on, off}, in that nesting order.
std::vector<filter::StrategyConfig> matrix_configs(const std::vector<double>& sr_grid);

RunReport run_pipeline(const MisuseManifestEntry& entry, const PipelineOptions& options);

MatrixReport run_matrix(const std::vector<MisuseManifestEntry>& entries,
                        const MatrixOptions& options);

nlohmann::json matrix_to_json(const MatrixReport& report);

// Reads runs back from a matrix report (the full object or a bare runs
// array), recovering the fields evaluation and reduction tables consume.
std::vector<RunReport> parse_matrix_runs(const nlohmann::json& j);

// matrix.json plus the CSV tables (reductions, frequencies, comparisons).
void write_matrix_artifacts(const MatrixReport& report, const std::filesystem::path& out_dir);

struct EvaluationRow {
    std::string config_name;
    stats::ConfusionCounts counts;
    double precision = 0.0;
    double recall = 0.0;
    bool precision_defined = false;
    bool recall_defined = false;
    double chi_square = 0.0;
    double chi_p = 1.0;
    bool chi_defined = false; // Yates test needs non-degenerate margins
    int entries_labeled = 0;
};

// Confusion counts per configuration over the labeled entries. Skipped or
// failed runs count as non-detections.
std::vector<EvaluationRow> evaluate(const std::vector<MisuseManifestEntry>& entries,
                                    const std::vector<RunReport>& runs);

nlohmann::json evaluation_to_json(const std::vector<EvaluationRow>& rows);

// One CSV row per configuration, mirroring evaluation_to_json.
std::string evaluation_csv(const std::vector<EvaluationRow>& rows);

} // namespace augmine::harness
