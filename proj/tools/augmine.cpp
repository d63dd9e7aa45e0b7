// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: per-commit analysis, candidate search, filtering,
// mining, detection, and the full strategy-matrix evaluation.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "augmine/api/context.hpp"
#include "augmine/aug/build.hpp"
#include "augmine/aug/graph.hpp"
#include "augmine/detection/detection.hpp"
#include "augmine/filter/filter.hpp"
#include "augmine/harness/harness.hpp"
#include "augmine/java/parser.hpp"
#include "augmine/miner/miner.hpp"
#include "augmine/search/search.hpp"
#include "augmine/vcs/vcs.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace augmine;

// JSON config files: top-level scalars feed the global flags; one level of
// object nesting scopes keys to a subcommand, e.g. {"matrix": {"workers": 4}}.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json root = json::parse(in); // malformed files surface as parse errors
        if (!root.is_object()) throw Error("config file: expected a JSON object");
        std::vector<CLI::ConfigItem> items;
        flatten("", root, items);
        return items;
    }

  private:
    static std::string scalar(const json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }

    static void flatten(const std::string& scope, const json& obj,
                        std::vector<CLI::ConfigItem>& items) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const json& v = it.value();
            if (v.is_object()) {
                if (!scope.empty()) {
                    throw Error("config file: '" + it.key() + "' nests deeper than a subcommand");
                }
                flatten(it.key(), v, items);
                continue;
            }
            CLI::ConfigItem item;
            if (!scope.empty()) item.parents.push_back(scope);
            item.name = it.key();
            if (v.is_array()) {
                for (const json& e : v) item.inputs.push_back(scalar(e));
            } else {
                item.inputs.push_back(scalar(v));
            }
            items.push_back(std::move(item));
        }
    }
};

struct Globals {
    std::string provider = "fs";
    std::string provider_url;
    std::string corpus_dir;
    int workers = 1;
    long long timeout_internal_ms = -1; // < 0: keep the mining default
    long long timeout_external_ms = -1;
    double min_support = 0.0; // 0: unset; >= 1 absolute; (0,1) relative
    double sr = 0.5;
    bool method_filter = false;
    int top_k = 3;
    std::string out;
    long long seed = 0; // reserved; the pipeline has no randomized tie-breaking
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream o(p, std::ios::binary);
    if (!o) throw Error("cannot write " + p.string());
    o << text;
}

// stdout when --out is absent, a file under the out directory otherwise
void emit(const json& j, const Globals& g, const std::string& filename) {
    if (g.out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    fs::path target = fs::path(g.out) / filename;
    write_file(target, j.dump(2) + "\n");
    std::cout << target.string() << "\n";
}

std::unique_ptr<search::SearchProvider> make_provider(const Globals& g) {
    if (g.provider == "http") {
        if (g.provider_url.empty()) throw Error("--provider http requires --provider-url");
        return std::make_unique<search::HttpProvider>(g.provider_url);
    }
    if (!g.corpus_dir.empty()) {
        return std::make_unique<search::FsCorpusProvider>(g.corpus_dir);
    }
    return nullptr; // internal-only runs need no provider
}

miner::MiningConfig mining_from(const Globals& g) {
    miner::MiningConfig cfg;
    if (g.min_support < 0) throw Error("--min-support must be positive");
    if (g.min_support >= 1.0) {
        cfg.min_support_absolute = static_cast<int>(std::llround(g.min_support));
    } else if (g.min_support > 0.0) {
        cfg.min_support_relative = g.min_support;
    }
    return cfg;
}

harness::PipelineOptions pipeline_options(const Globals& g, search::SearchProvider* provider) {
    harness::PipelineOptions o;
    o.mining = mining_from(g);
    if (g.timeout_internal_ms >= 0) {
        o.timeout_internal = std::chrono::milliseconds(g.timeout_internal_ms);
    }
    if (g.timeout_external_ms >= 0) {
        o.timeout_external = std::chrono::milliseconds(g.timeout_external_ms);
    }
    o.provider = provider;
    o.out_dir = g.out;
    o.top_k = g.top_k;
    o.strategy.sr = g.sr;
    o.strategy.method_filter = g.method_filter;
    return o;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json range_json(const LineRange& r) { return {{"start", r.start}, {"end", r.end}}; }

int run_analyze_commit(const Globals& g, const std::string& repo, const std::string& commit) {
    vcs::CommitRef ref{repo, commit};
    std::vector<std::string> diagnostics;
    std::vector<vcs::MethodChange> changes = vcs::changed_methods(ref, &diagnostics);

    // one parse per touched file, from the commit's own tree
    std::map<std::string, std::shared_ptr<java::CompilationUnit>> units;
    for (const vcs::MethodChange& c : changes) {
        if (units.count(c.file)) continue;
        std::shared_ptr<java::CompilationUnit> unit;
        vcs::GitResult show = vcs::run_git(repo, {"show", commit + ":" + c.file});
        if (show.exit_code == 0) {
            try {
                unit = std::make_shared<java::CompilationUnit>(
                    java::parse_compilation_unit(show.out));
            } catch (const java::SyntaxError& e) {
                diagnostics.push_back("parse skipped: " + c.file + ": " + e.what());
            }
        } else {
            diagnostics.push_back("unreadable at commit: " + c.file);
        }
        units[c.file] = unit;
    }

    long long external = 0;
    json methods = json::array();
    for (const vcs::MethodChange& c : changes) {
        json m;
        m["file"] = c.file;
        m["method"] = c.method_name;
        m["ordinal"] = c.method_id;
        m["declaration_span"] = range_json(c.declaration_span);
        json lines = json::array();
        for (const LineRange& r : c.changed_lines) lines.push_back(range_json(r));
        m["changed_lines"] = lines;
        m["uses_external_api"] = false;
        const std::shared_ptr<java::CompilationUnit>& unit = units[c.file];
        if (unit) {
            std::vector<java::MethodSite> sites = java::all_method_sites(*unit);
            if (c.method_id >= 0 && c.method_id < static_cast<int>(sites.size())) {
                std::set<std::string> rel =
                    api::relevant_types(*sites[c.method_id].method, *unit);
                m["relevant_types"] = rel;
                if (!rel.empty()) {
                    m["uses_external_api"] = true;
                    ++external;
                }
            }
        }
        methods.push_back(std::move(m));
    }

    json out;
    out["repo"] = repo;
    out["commit"] = commit;
    out["methods"] = methods;
    out["counts"] = {{"changed", static_cast<long long>(changes.size())},
                     {"external", external}};
    out["diagnostics"] = diagnostics;
    emit(out, g, "analysis.json");
    return 0;
}

int run_mic(const Globals& g, const std::string& repo, const std::string& commit,
            const std::vector<std::string>& files) {
    vcs::CommitRef fixing{repo, commit};
    vcs::CommitRef intro = vcs::misuse_introducing_commit(fixing, files);
    json out;
    out["repo"] = repo;
    out["fixing_commit"] = commit;
    out["introducing_commit"] = intro.commit_id;
    emit(out, g, "mic.json");
    return 0;
}

int run_search(const Globals& g, const std::vector<std::string>& imports,
               const std::string& origin_prefix) {
    std::unique_ptr<search::SearchProvider> provider = make_provider(g);
    if (!provider) {
        throw Error("search needs a provider: --corpus-dir for fs, --provider-url for http");
    }
    api::ApiContext session;
    for (const std::string& name : imports) session.api_imports.push_back({name, false, false});
    std::vector<search::SourceDoc> docs =
        search::external_candidates(session, *provider, origin_prefix);

    json rows = json::array();
    for (const search::SourceDoc& doc : docs) {
        rows.push_back({{"identity", doc.identity},
                        {"rank", doc.relevance_rank},
                        {"package", doc.package_name()},
                        {"bytes", static_cast<long long>(doc.raw_text.size())}});
    }
    json out;
    out["imports"] = imports;
    out["docs"] = rows;
    if (!g.out.empty()) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            write_file(fs::path(g.out) / "docs" / (std::to_string(i) + ".java"),
                       docs[i].raw_text);
        }
    }
    emit(out, g, "search.json");
    return 0;
}

int run_filter(const Globals& g, const std::vector<std::string>& keywords,
               const std::vector<std::string>& paths) {
    std::set<std::string> kw(keywords.begin(), keywords.end());
    std::vector<search::SourceDoc> docs;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        docs.push_back({search::Origin::Internal, paths[i], read_file(paths[i]),
                        static_cast<int>(i)});
    }
    std::vector<search::SourceDoc> kept = filter::filter_files(docs, kw, g.sr);
    std::set<std::string> kept_ids;
    for (const search::SourceDoc& doc : kept) kept_ids.insert(doc.identity);

    json files = json::array();
    for (const search::SourceDoc& doc : docs) {
        filter::SatisfactionRatio ratio = filter::satisfaction_ratio(doc, kw);
        files.push_back({{"path", doc.identity},
                         {"found", ratio.found},
                         {"total", ratio.total},
                         {"satisfaction", ratio.value()},
                         {"kept", kept_ids.count(doc.identity) > 0}});
    }
    json out;
    out["sr"] = g.sr;
    out["keywords"] = json(kw);
    out["files"] = files;
    if (g.method_filter) {
        filter::MethodFilterResult selected = filter::filter_methods(kept, kw);
        json methods = json::array();
        for (const filter::MethodSelection& m : selected.methods) {
            methods.push_back({{"doc", m.doc_identity},
                               {"ordinal", m.ordinal},
                               {"method", m.method_name}});
        }
        out["methods"] = methods;
        out["diagnostics"] = selected.diagnostics;
    }
    emit(out, g, "filter.json");
    return 0;
}

int run_mine(const Globals& g, const std::vector<std::string>& aug_files) {
    std::vector<aug::Aug> corpus;
    for (const std::string& file : aug_files) {
        std::vector<aug::Aug> graphs = aug::parse_augs(read_file(file));
        corpus.insert(corpus.end(), std::make_move_iterator(graphs.begin()),
                      std::make_move_iterator(graphs.end()));
    }
    if (corpus.empty()) throw Error("no graphs parsed from the input files");

    miner::MiningConfig cfg = mining_from(g);
    if (!cfg.min_support_absolute && !cfg.min_support_relative) {
        cfg.min_support_absolute = harness::kDefaultAbsoluteSupportInternal;
    }
    // --timeout-external wins for a standalone mine; --timeout-internal is the fallback
    if (g.timeout_external_ms >= 0) {
        cfg.timeout = std::chrono::milliseconds(g.timeout_external_ms);
    } else if (g.timeout_internal_ms >= 0) {
        cfg.timeout = std::chrono::milliseconds(g.timeout_internal_ms);
    }

    miner::MiningResult result = miner::mine_patterns(corpus, cfg);
    std::vector<miner::RankedPattern> ranked = miner::rank_patterns(result.patterns);

    json rows = json::array();
    for (const miner::RankedPattern& rp : ranked) {
        rows.push_back({{"rank", rp.rank},
                        {"support", rp.pattern.support},
                        {"closed", rp.pattern.closed},
                        {"nodes", static_cast<long long>(rp.pattern.graph.nodes.size())},
                        {"edges", static_cast<long long>(rp.pattern.graph.edges.size())},
                        {"fingerprint", hex64(miner::graph_fingerprint(rp.pattern.graph))}});
    }
    json out;
    out["methods"] = static_cast<long long>(corpus.size());
    out["min_support"] = miner::resolve_min_support(cfg, static_cast<int>(corpus.size()));
    out["pattern_count"] = static_cast<long long>(result.patterns.size());
    out["patterns"] = rows;
    out["truncated"] = result.truncated;
    if (result.truncated) out["truncation_reason"] = result.truncation_reason;
    if (!g.out.empty()) {
        write_file(fs::path(g.out) / "patterns.txt", miner::to_text(result.patterns));
    }
    emit(out, g, "ranked.json");
    return 0;
}

int run_detect(const Globals& g, const std::string& patterns_file,
               const std::string& usage_file) {
    // mined-pattern files carry SUPPORT trailers; plain AUG files parse too
    std::vector<miner::Pattern> patterns = miner::parse_patterns(read_file(patterns_file));
    std::vector<aug::Aug> usages = aug::parse_augs(read_file(usage_file));
    if (usages.empty()) throw Error("no usage graphs parsed from " + usage_file);

    json verdicts = json::array();
    for (const aug::Aug& usage : usages) {
        verdicts.push_back(detection::verdict_to_json(detection::detect(usage, patterns)));
    }
    json out;
    out["patterns"] = static_cast<long long>(patterns.size());
    out["verdicts"] = verdicts;
    emit(out, g, "verdicts.json");
    return 0;
}

int run_evaluate(const Globals& g, const std::string& manifest_file,
                 const std::string& matrix_file) {
    std::vector<harness::MisuseManifestEntry> entries = harness::load_manifest(manifest_file);
    std::vector<harness::RunReport> runs =
        harness::parse_matrix_runs(json::parse(read_file(matrix_file)));
    std::vector<harness::EvaluationRow> rows = harness::evaluate(entries, runs);
    if (!g.out.empty()) {
        write_file(fs::path(g.out) / "evaluation.csv", harness::evaluation_csv(rows));
    }
    emit(harness::evaluation_to_json(rows), g, "evaluation.json");
    return 0;
}

int run_matrix(const Globals& g, const std::string& manifest_file) {
    std::vector<harness::MisuseManifestEntry> entries = harness::load_manifest(manifest_file);
    std::unique_ptr<search::SearchProvider> provider = make_provider(g);

    harness::MatrixOptions options;
    options.base = pipeline_options(g, provider.get());
    options.workers = g.workers;
    harness::MatrixReport report = harness::run_matrix(entries, options);

    if (g.out.empty()) {
        std::cout << harness::matrix_to_json(report).dump(2) << "\n";
        return 0;
    }
    // run_matrix already wrote matrix.json and the CSV tables under --out
    int skipped = 0, errors = 0;
    for (const harness::RunReport& r : report.runs) {
        if (r.skipped) ++skipped;
        errors += static_cast<int>(r.stage_errors.size());
    }
    json summary;
    summary["entries"] = static_cast<long long>(entries.size());
    summary["cells"] = static_cast<long long>(report.runs.size());
    summary["skipped"] = skipped;
    summary["stage_errors"] = errors;
    summary["out"] = g.out;
    std::cout << summary.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Change-based API misuse detection over Java repositories"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<JsonConfig>());

    Globals g;
    app.set_config("--config", "", "JSON config file; keys mirror the long flag names");
    app.add_option("--provider", g.provider, "search provider backend")
        ->check(CLI::IsMember({"fs", "http"}))
        ->capture_default_str();
    app.add_option("--provider-url", g.provider_url, "base URL for the http provider");
    app.add_option("--corpus-dir", g.corpus_dir, "directory indexed by the fs provider");
    app.add_option("--workers", g.workers, "concurrent matrix cells")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--timeout-internal", g.timeout_internal_ms,
                   "mining timeout for internal-search legs, milliseconds");
    app.add_option("--timeout-external", g.timeout_external_ms,
                   "mining timeout for external-search legs, milliseconds");
    app.add_option("--min-support", g.min_support,
                   "pattern support threshold: >= 1 absolute, (0,1) relative");
    app.add_option("--sr", g.sr, "file-filter satisfaction ratio in [0,1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_flag("--method-filter", g.method_filter, "enable the method-level keyword filter");
    app.add_option("--top-k", g.top_k, "rank cutoff for top-pattern reporting")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--out", g.out, "output directory; stdout JSON when omitted");
    app.add_option("--seed", g.seed, "reserved; the pipeline has no randomized tie-breaking");

    // analyze-commit
    std::string ac_repo, ac_commit;
    CLI::App* analyze = app.add_subcommand(
        "analyze-commit", "List the methods a commit changed, with API relevance");
    analyze->add_option("--repo", ac_repo, "git repository path")->required();
    analyze->add_option("--commit", ac_commit, "commit id")->required();

    // mic
    std::string mic_repo, mic_commit;
    std::vector<std::string> mic_files;
    CLI::App* mic = app.add_subcommand(
        "mic", "Trace a fixing commit back to the misuse-introducing commit");
    mic->add_option("--repo", mic_repo, "git repository path")->required();
    mic->add_option("--commit", mic_commit, "fixing commit id")->required();
    mic->add_option("--file", mic_files, "restrict the traced diff to these files")
        ->type_size(1)
        ->allow_extra_args(false);

    // search
    std::vector<std::string> search_imports;
    std::string search_origin;
    CLI::App* search_cmd = app.add_subcommand(
        "search", "Query the provider for files importing the given APIs");
    search_cmd->add_option("imports", search_imports, "qualified import names")->required();
    search_cmd->add_option("--origin-prefix", search_origin,
                           "package prefix to drop as same-project results");

    // filter
    std::vector<std::string> filter_keywords, filter_paths;
    CLI::App* filter_cmd = app.add_subcommand(
        "filter", "Keep files meeting the keyword satisfaction ratio");
    filter_cmd->add_option("--keyword", filter_keywords, "keyword set entry")
        ->required()
        ->type_size(1)
        ->allow_extra_args(false);
    filter_cmd->add_option("files", filter_paths, "source files to filter")->required();

    // mine
    std::vector<std::string> mine_files;
    CLI::App* mine_cmd = app.add_subcommand(
        "mine", "Mine closed frequent patterns from usage graphs");
    mine_cmd->add_option("augs", mine_files, "AUG text files (multiple graphs per file)")
        ->required();

    // detect
    std::string detect_patterns, detect_usage;
    CLI::App* detect_cmd = app.add_subcommand(
        "detect", "Classify usage graphs against mined or fixing patterns");
    detect_cmd->add_option("--patterns", detect_patterns, "pattern file (mined text or raw AUGs)")
        ->required();
    detect_cmd->add_option("--usage", detect_usage, "AUG text file with the usages to classify")
        ->required();

    // evaluate
    std::string eval_manifest, eval_matrix;
    CLI::App* eval_cmd = app.add_subcommand(
        "evaluate", "Confusion counts per configuration from a matrix report");
    eval_cmd->add_option("--manifest", eval_manifest, "JSON-lines manifest with labels")
        ->required();
    eval_cmd->add_option("--matrix-report", eval_matrix, "matrix.json from a matrix run")
        ->required();

    // matrix
    std::string matrix_manifest;
    CLI::App* matrix_cmd = app.add_subcommand(
        "matrix", "Run the 40-configuration strategy sweep per manifest entry");
    matrix_cmd->add_option("--manifest", matrix_manifest, "JSON-lines manifest")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze_commit(g, ac_repo, ac_commit);
        if (mic->parsed()) return run_mic(g, mic_repo, mic_commit, mic_files);
        if (search_cmd->parsed()) return run_search(g, search_imports, search_origin);
        if (filter_cmd->parsed()) return run_filter(g, filter_keywords, filter_paths);
        if (mine_cmd->parsed()) return run_mine(g, mine_files);
        if (detect_cmd->parsed()) return run_detect(g, detect_patterns, detect_usage);
        if (eval_cmd->parsed()) return run_evaluate(g, eval_manifest, eval_matrix);
        if (matrix_cmd->parsed()) return run_matrix(g, matrix_manifest);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
