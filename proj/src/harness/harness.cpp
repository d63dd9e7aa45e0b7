// SPDX-License-Identifier: Apache-2.0
#include "augmine/harness/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "augmine/api/context.hpp"
#include "augmine/aug/build.hpp"
#include "augmine/java/parser.hpp"
#include "augmine/vcs/vcs.hpp"

namespace augmine::harness {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string require_string(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw ManifestError(std::string("manifest entry: missing string field '") + key + "'");
    }
    return j.at(key).get<std::string>();
}

std::vector<std::string> optional_string_array(const json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    const json& a = j.at(key);
    if (!a.is_array()) {
        throw ManifestError(std::string("manifest entry: field '") + key + "' must be an array");
    }
    for (const json& v : a) {
        if (!v.is_string()) {
            throw ManifestError(std::string("manifest entry: field '") + key +
                                "' must contain only strings");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string resolve_path(const std::string& p, const fs::path& base) {
    if (p.empty() || p.find("://") != std::string::npos) return p;
    fs::path candidate(p);
    if (candidate.is_absolute()) return candidate.lexically_normal().string();
    return (base / candidate).lexically_normal().string();
}

// ---- per-entry, config-independent state -----------------------------------

struct ParsedDoc {
    bool ok = false;
    std::string error;
    std::shared_ptr<java::CompilationUnit> unit;
};

struct EntryData {
    std::vector<StageError> errors;
    std::vector<std::string> diagnostics;

    std::string mic;
    bool revision_ok = false;
    long long methods_all = 0;
    long long methods_changed = 0;
    long long methods_external = 0;
    std::vector<vcs::MethodChange> changes;

    bool context_ok = false;
    api::ApiContext context;
    std::string origin_prefix;
    std::shared_ptr<aug::Aug> usage_aug;

    std::vector<search::SourceDoc> internal_docs;
    bool internal_ok = false;

    std::vector<search::SourceDoc> external_all;
    bool external_all_ok = false;
    std::string external_all_error;
    std::vector<search::SourceDoc> external_misused;
    bool external_misused_ok = false;
    std::string external_misused_error;

    std::map<std::string, ParsedDoc> parsed;                      // doc key -> unit
    std::map<std::string, std::shared_ptr<const aug::Aug>> augs;  // doc key#ordinal
    std::set<std::string> budget_excluded;                        // doc keys cut short

    std::vector<detection::FixingPattern> fixes;
    std::vector<std::uint64_t> fix_fingerprints;
};

std::string doc_key(const search::SourceDoc& doc) {
    return (doc.origin == search::Origin::Internal ? "int:" : "ext:") + doc.identity;
}

std::string aug_key(const search::SourceDoc& doc, int ordinal) {
    return doc_key(doc) + "#" + std::to_string(ordinal);
}

const ParsedDoc& parse_doc(EntryData& d, const search::SourceDoc& doc) {
    std::string key = doc_key(doc);
    auto it = d.parsed.find(key);
    if (it != d.parsed.end()) return it->second;
    ParsedDoc p;
    try {
        p.unit = std::make_shared<java::CompilationUnit>(
            java::parse_compilation_unit(doc.raw_text));
        p.ok = true;
    } catch (const Error& e) {
        p.error = e.what();
    }
    return d.parsed.emplace(std::move(key), std::move(p)).first->second;
}

// Builds and caches the AUG of every method of one doc, stopping when the
// per-doc budget runs out; the remaining methods are reported as excluded.
void build_doc_augs(EntryData& d, const search::SourceDoc& doc,
                    std::chrono::milliseconds budget) {
    const ParsedDoc& p = parse_doc(d, doc);
    if (!p.ok) return;
    std::string key = doc_key(doc);
    if (d.budget_excluded.count(key)) return;
    std::vector<java::MethodSite> sites = java::all_method_sites(*p.unit);
    auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        std::string k = aug_key(doc, sites[i].ordinal);
        if (!d.augs.count(k)) {
            auto g = std::make_shared<aug::Aug>(aug::build_aug(*sites[i].method, *p.unit));
            g->method_ref = {doc.identity, sites[i].method->name, sites[i].ordinal};
            d.augs.emplace(std::move(k), std::move(g));
        }
        if (std::chrono::steady_clock::now() - start > budget && i + 1 < sites.size()) {
            d.budget_excluded.insert(key);
            d.diagnostics.push_back("aug budget exceeded for '" + doc.identity + "': built " +
                                    std::to_string(i + 1) + " of " +
                                    std::to_string(sites.size()) + " methods");
            break;
        }
    }
}

std::string package_prefix(const std::string& package_name) {
    std::vector<std::string> segs = api::split_segments(package_name);
    std::size_t take = std::min<std::size_t>(3, segs.size());
    std::string out;
    for (std::size_t i = 0; i < take; ++i) {
        if (i) out += '.';
        out += segs[i];
    }
    return out;
}

// Revision trace, method census and misuse-method context; fails stage by
// stage, leaving later fields unset but earlier results intact.
void prepare_revision(const MisuseManifestEntry& entry, EntryData& d) {
    try {
        std::vector<std::string> fixed;
        if (!entry.misuse_file.empty()) fixed.push_back(entry.misuse_file);
        vcs::CommitRef mic =
            vcs::misuse_introducing_commit({entry.repo, entry.fixing_commit}, fixed);
        d.mic = mic.commit_id;
        d.revision_ok = true;
    } catch (const Error& e) {
        d.errors.push_back({"introducing-commit", e.what()});
        return;
    }

    try {
        d.changes = vcs::changed_methods({entry.repo, d.mic}, &d.diagnostics);
        d.methods_changed = static_cast<long long>(d.changes.size());
    } catch (const Error& e) {
        d.errors.push_back({"changed-methods", e.what()});
        return;
    }

    // Census of the whole tree at the introducing revision: parse every .java
    // file once; the same parses back the internal candidate docs.
    vcs::GitResult ls =
        vcs::run_git(entry.repo, {"ls-tree", "-r", "--name-only", d.mic});
    if (ls.exit_code != 0) {
        d.errors.push_back({"method-census", "git ls-tree failed: " + ls.err});
        return;
    }
    std::vector<std::string> paths;
    {
        std::istringstream in(ls.out);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.size() > 5 && line.rfind(".java") == line.size() - 5) paths.push_back(line);
        }
    }
    std::sort(paths.begin(), paths.end());
    int rank = 0;
    for (const std::string& path : paths) {
        vcs::GitResult show = vcs::run_git(entry.repo, {"show", d.mic + ":" + path});
        if (show.exit_code != 0) {
            d.diagnostics.push_back("unreadable at revision: " + path);
            continue;
        }
        search::SourceDoc doc{search::Origin::Internal, path, show.out, 0};
        const ParsedDoc& p = parse_doc(d, doc);
        if (p.ok) {
            d.methods_all += static_cast<long long>(java::all_method_sites(*p.unit).size());
        } else {
            d.diagnostics.push_back("parse skipped: " + path + ": " + p.error);
        }
        if (path != entry.misuse_file) {
            doc.relevance_rank = rank++;
            d.internal_docs.push_back(std::move(doc));
        }
    }
    d.internal_ok = true;

    // E: changed methods that use an explicitly imported third-party type.
    for (const vcs::MethodChange& change : d.changes) {
        auto it = d.parsed.find("int:" + change.file);
        if (it == d.parsed.end() || !it->second.ok) continue;
        std::vector<java::MethodSite> sites = java::all_method_sites(*it->second.unit);
        if (change.method_id < 0 || change.method_id >= static_cast<int>(sites.size())) continue;
        if (!api::relevant_types(*sites[change.method_id].method, *it->second.unit).empty()) {
            ++d.methods_external;
        }
    }

    // Misuse method context and usage AUG.
    auto it = d.parsed.find("int:" + entry.misuse_file);
    if (it == d.parsed.end()) {
        d.errors.push_back({"context", "misuse file not found at the introducing revision: " +
                                           entry.misuse_file});
        return;
    }
    if (!it->second.ok) {
        d.errors.push_back({"context", "misuse file unparseable: " + it->second.error});
        return;
    }
    const java::CompilationUnit& unit = *it->second.unit;
    std::vector<java::MethodSite> sites = java::all_method_sites(unit);
    const java::MethodSite* site = nullptr;
    for (const java::MethodSite& s : sites) {
        if (s.method->name == entry.misuse_method) {
            site = &s;
            break;
        }
    }
    if (!site) {
        d.errors.push_back(
            {"context", "misuse method '" + entry.misuse_method + "' not found in " +
                            entry.misuse_file});
        return;
    }
    bool among_changed = false;
    for (const vcs::MethodChange& c : d.changes) {
        if (c.file == entry.misuse_file && c.method_name == entry.misuse_method) {
            among_changed = true;
        }
    }
    if (!among_changed) {
        d.diagnostics.push_back("misuse method is not among the methods changed by " + d.mic);
    }
    d.context = api::extract_context(*site->method, unit);
    d.context.misused_imports = entry.misused_imports;
    d.origin_prefix = package_prefix(unit.package_name);
    d.usage_aug = std::make_shared<aug::Aug>(aug::build_aug(*site->method, unit));
    d.usage_aug->method_ref = {entry.misuse_file, site->method->name, site->ordinal};
    d.context_ok = true;
}

void prepare_external_variant(EntryData& d, const PipelineOptions& options,
                              const std::vector<std::string>& import_names,
                              std::vector<search::SourceDoc>& docs, bool& ok,
                              std::string& error) {
    if (!options.provider) {
        error = "no search provider configured";
        return;
    }
    api::ApiContext session;
    for (const std::string& name : import_names) {
        session.api_imports.push_back({name, false, false});
    }
    try {
        docs = search::external_candidates(session, *options.provider, d.origin_prefix,
                                           options.external);
        ok = true;
    } catch (const search::EmptyQuery&) {
        d.diagnostics.push_back("external search skipped: no imports to query");
        ok = true;
    } catch (const Error& e) {
        error = e.what();
    }
    if (ok) {
        for (const search::SourceDoc& doc : docs) build_doc_augs(d, doc, options.aug_budget);
    }
}

void load_fixing_patterns(const MisuseManifestEntry& entry, EntryData& d) {
    for (const std::string& file : entry.fixing_pattern_files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            d.errors.push_back({"fixing-pattern", "cannot read " + file});
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            detection::FixingPattern fix = detection::load_fixing_pattern(buf.str());
            for (const aug::Aug& v : fix.variants) {
                d.fix_fingerprints.push_back(miner::graph_fingerprint(v));
            }
            d.fixes.push_back(std::move(fix));
        } catch (const Error& e) {
            d.errors.push_back({"fixing-pattern", file + ": " + e.what()});
        }
    }
}

struct LegNeeds {
    bool internal = false;
    bool external_all = false;
    bool external_misused = false;
};

LegNeeds needs_for(const filter::StrategyConfig& config, const MisuseManifestEntry& entry) {
    LegNeeds n;
    bool ext = config.search_loc != filter::SearchLoc::Internal;
    n.internal = config.search_loc != filter::SearchLoc::External;
    if (ext && config.search_imp == filter::SearchImp::AllImports) n.external_all = true;
    if (ext && config.search_imp == filter::SearchImp::MisusedImports &&
        !entry.misused_imports.empty()) {
        n.external_misused = true;
    }
    return n;
}

EntryData prepare_entry(const MisuseManifestEntry& entry, const PipelineOptions& options,
                        const LegNeeds& needs) {
    EntryData d;
    load_fixing_patterns(entry, d);
    prepare_revision(entry, d);
    if (needs.internal && d.internal_ok) {
        for (const search::SourceDoc& doc : d.internal_docs) {
            build_doc_augs(d, doc, options.aug_budget);
        }
    }
    if (d.context_ok) {
        if (needs.external_all) {
            prepare_external_variant(d, options, d.context.import_names(), d.external_all,
                                     d.external_all_ok, d.external_all_error);
        }
        if (needs.external_misused) {
            prepare_external_variant(d, options, entry.misused_imports, d.external_misused,
                                     d.external_misused_ok, d.external_misused_error);
        }
    }
    return d;
}

// ---- per-cell pipeline ------------------------------------------------------

struct CellArtifacts {
    std::vector<search::SourceDoc> docs;
    std::vector<bool> kept;
    std::vector<filter::MethodSelection> methods;
    std::vector<aug::Aug> corpus;
    std::vector<miner::Pattern> patterns;
    std::vector<miner::RankedPattern> ranked;
    const EntryData* data = nullptr;
};

miner::MiningConfig leg_mining_config(const PipelineOptions& options, filter::SearchLoc leg) {
    miner::MiningConfig cfg = options.mining;
    if (!cfg.min_support_absolute && !cfg.min_support_relative) {
        cfg.min_support_absolute = leg == filter::SearchLoc::External
                                       ? kDefaultAbsoluteSupportExternal
                                       : kDefaultAbsoluteSupportInternal;
    }
    const std::optional<std::chrono::milliseconds>& leg_timeout =
        leg == filter::SearchLoc::External ? options.timeout_external
                                           : options.timeout_internal;
    if (leg_timeout) cfg.timeout = *leg_timeout;
    return cfg;
}

void append_diags(RunReport& r, const std::vector<std::string>& diags) {
    for (const std::string& m : diags) r.diagnostics.push_back(m);
}

void run_leg(const EntryData& d, const filter::StrategyConfig& config,
             const PipelineOptions& options, filter::SearchLoc leg, RunReport& r,
             std::vector<miner::Pattern>& all_patterns, std::vector<aug::Aug>& rpf_corpus,
             CellArtifacts* art) {
    const std::vector<search::SourceDoc>* docs = nullptr;
    if (leg == filter::SearchLoc::Internal) {
        if (!d.internal_ok) return; // the shared stage errors already say why
        docs = &d.internal_docs;
    } else {
        bool all = config.search_imp == filter::SearchImp::AllImports;
        bool ok = all ? d.external_all_ok : d.external_misused_ok;
        const std::string& err = all ? d.external_all_error : d.external_misused_error;
        if (!ok) {
            r.stage_errors.push_back({"external-search", err});
            return;
        }
        docs = all ? &d.external_all : &d.external_misused;
    }
    r.docs_retrieved += static_cast<int>(docs->size());

    std::vector<search::SourceDoc> kept;
    if (d.context.keywords.empty() && config.sr > 0.0) {
        r.diagnostics.push_back("no keywords extracted: sr filter keeps no files");
    } else {
        kept = filter::filter_files(*docs, d.context.keywords, config.sr, options.match_mode);
    }
    r.docs_kept += static_cast<int>(kept.size());

    if (art) {
        std::set<std::string> kept_ids;
        for (const search::SourceDoc& doc : kept) kept_ids.insert(doc_key(doc));
        for (const search::SourceDoc& doc : *docs) {
            art->docs.push_back(doc);
            art->kept.push_back(kept_ids.count(doc_key(doc)) > 0);
        }
    }

    filter::MethodFilterResult selection;
    if (config.method_filter) {
        if (d.context.keywords.empty()) {
            r.diagnostics.push_back("no keywords extracted: method filter keeps no methods");
        } else {
            selection = filter::filter_methods(kept, d.context.keywords);
        }
    } else {
        selection = filter::all_methods(kept);
    }
    append_diags(r, selection.diagnostics);
    r.methods_selected += static_cast<int>(selection.methods.size());

    std::vector<aug::Aug> corpus;
    corpus.reserve(selection.methods.size());
    for (const filter::MethodSelection& m : selection.methods) {
        const search::SourceDoc& doc = kept[m.doc_index];
        auto it = d.augs.find(aug_key(doc, m.ordinal));
        if (it == d.augs.end()) {
            ++r.augs_skipped_budget;
            continue;
        }
        corpus.push_back(*it->second);
    }
    r.augs_built += static_cast<int>(corpus.size());

    if (!corpus.empty()) {
        miner::MiningConfig cfg = leg_mining_config(options, leg);
        try {
            int min_support =
                miner::resolve_min_support(cfg, static_cast<int>(corpus.size()));
            if (config.search_loc == filter::SearchLoc::Both) {
                r.diagnostics.push_back("min support (" + lower(filter::to_string(leg)) +
                                        " leg): " + std::to_string(min_support));
            } else {
                r.min_support = min_support;
            }
            miner::MiningResult mined = miner::mine_patterns(corpus, cfg);
            r.pattern_count += static_cast<int>(mined.patterns.size());
            if (mined.truncated) {
                r.mining_truncated = true;
                if (!r.truncation_reason.empty()) r.truncation_reason += ";";
                r.truncation_reason += mined.truncation_reason;
            }
            for (miner::Pattern& p : mined.patterns) all_patterns.push_back(std::move(p));
        } catch (const Error& e) {
            r.stage_errors.push_back({"mining", e.what()});
        }
    }

    if (art) {
        for (const filter::MethodSelection& m : selection.methods) art->methods.push_back(m);
        for (const aug::Aug& g : corpus) art->corpus.push_back(g);
    }
    for (aug::Aug& g : corpus) rpf_corpus.push_back(std::move(g));
}

RunReport cell_report(const MisuseManifestEntry& entry, const EntryData& d,
                      const filter::StrategyConfig& config, const PipelineOptions& options,
                      CellArtifacts* art) {
    RunReport r;
    r.entry_id = entry.id;
    r.config = config;
    r.config_name = harness::config_name(config);
    r.stage_errors = d.errors;
    r.diagnostics = d.diagnostics;
    r.introducing_commit = d.mic;
    // The census can undercount when files are unreadable at the revision, so
    // the invariant A >= C >= E is enforced at the report boundary.
    r.methods_changed = d.methods_changed;
    r.methods_all = std::max(d.methods_all, d.methods_changed);
    r.methods_external = std::min(d.methods_external, d.methods_changed);
    r.reduction_a2c = reduction_percent(r.methods_all, r.methods_changed);
    r.reduction_c2e = reduction_percent(r.methods_changed, r.methods_external);
    r.reduction_c2e_defined = r.methods_changed > 0;
    if (art) art->data = &d;

    if (config.search_imp == filter::SearchImp::MisusedImports && entry.misused_imports.empty()) {
        r.skipped = true;
        r.skip_reason = "no misused imports supplied";
        return r;
    }
    if (!d.context_ok) return r;

    r.import_count = static_cast<int>(d.context.api_imports.size());
    r.keyword_count = static_cast<int>(d.context.keywords.size());

    std::vector<miner::Pattern> all_patterns;
    std::vector<aug::Aug> rpf_corpus;
    if (config.search_loc == filter::SearchLoc::Both) {
        run_leg(d, config, options, filter::SearchLoc::Internal, r, all_patterns, rpf_corpus,
                art);
        run_leg(d, config, options, filter::SearchLoc::External, r, all_patterns, rpf_corpus,
                art);
    } else {
        run_leg(d, config, options, config.search_loc, r, all_patterns, rpf_corpus, art);
    }

    if (!d.fixes.empty() && !rpf_corpus.empty()) {
        double best = 0.0;
        for (const detection::FixingPattern& fix : d.fixes) {
            best = std::max(best, detection::relative_pattern_frequency(fix, rpf_corpus));
        }
        r.relative_pattern_frequency = best;
        r.rpf_defined = true;
    }

    std::vector<miner::RankedPattern> ranked = miner::rank_patterns(all_patterns);
    if (!d.fix_fingerprints.empty()) {
        for (const miner::RankedPattern& rp : ranked) {
            std::uint64_t fp = miner::graph_fingerprint(rp.pattern.graph);
            bool hit = std::find(d.fix_fingerprints.begin(), d.fix_fingerprints.end(), fp) !=
                       d.fix_fingerprints.end();
            if (hit && (r.fixing_pattern_rank == 0 || rp.rank < r.fixing_pattern_rank)) {
                r.fixing_pattern_rank = rp.rank;
            }
        }
        r.top_hit = r.fixing_pattern_rank > 0 && r.fixing_pattern_rank <= options.top_k;
    }

    if (d.usage_aug) {
        r.verdict = detection::detect(*d.usage_aug, all_patterns);
        r.verdict_defined = true;
    }

    if (art) {
        art->patterns = std::move(all_patterns);
        art->ranked = std::move(ranked);
    }
    return r;
}

// ---- artifact persistence ---------------------------------------------------

void write_text(const fs::path& file, const std::string& text) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    out << text;
}

void write_json(const fs::path& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

json changes_to_json(const std::vector<vcs::MethodChange>& changes) {
    json arr = json::array();
    for (const vcs::MethodChange& c : changes) {
        json ranges = json::array();
        for (const LineRange& lr : c.changed_lines) {
            ranges.push_back({{"start", lr.start}, {"end", lr.end}});
        }
        arr.push_back({{"file", c.file},
                       {"method_name", c.method_name},
                       {"method_id", c.method_id},
                       {"span", {{"start", c.declaration_span.start},
                                 {"end", c.declaration_span.end}}},
                       {"changed_lines", ranges},
                       {"source_text", c.source_text}});
    }
    return arr;
}

void write_run_artifacts(const RunReport& r, const CellArtifacts& art,
                         const MisuseManifestEntry& entry, const PipelineOptions& options) {
    fs::path dir = options.out_dir / "runs" / entry.id / r.config_name;
    fs::create_directories(dir);

    write_json(dir / "methods" / "changed.json",
               art.data ? changes_to_json(art.data->changes) : json::array());

    json docs = json::array();
    int kept_index = 0;
    for (std::size_t i = 0; i < art.docs.size(); ++i) {
        const search::SourceDoc& doc = art.docs[i];
        json row = {{"identity", doc.identity},
                    {"origin", search::to_string(doc.origin)},
                    {"rank", doc.relevance_rank},
                    {"package", doc.package_name()},
                    {"kept", static_cast<bool>(art.kept[i])}};
        if (art.kept[i]) {
            row["kept_file"] = "kept/" + std::to_string(kept_index) + ".java";
            write_text(dir / "docs" / "kept" / (std::to_string(kept_index) + ".java"),
                       doc.raw_text);
            ++kept_index;
        }
        docs.push_back(std::move(row));
    }
    write_json(dir / "docs" / "docs.json", docs);

    write_text(dir / "augs" / "corpus.aug", aug::to_text(art.corpus));
    if (art.data && art.data->usage_aug) {
        write_text(dir / "augs" / "usage.aug", aug::to_text(*art.data->usage_aug));
    }

    write_text(dir / "patterns" / "patterns.txt", miner::to_text(art.patterns));
    json ranked = json::array();
    for (const miner::RankedPattern& rp : art.ranked) {
        ranked.push_back({{"rank", rp.rank},
                          {"support", rp.pattern.support},
                          {"closed", rp.pattern.closed},
                          {"nodes", rp.pattern.graph.nodes.size()},
                          {"edges", rp.pattern.graph.edges.size()},
                          {"fingerprint", miner::graph_fingerprint(rp.pattern.graph)}});
    }
    write_json(dir / "patterns" / "ranked.json", ranked);

    json verdicts;
    verdicts["defined"] = r.verdict_defined;
    if (r.verdict_defined) verdicts["verdict"] = detection::verdict_to_json(r.verdict);
    write_json(dir / "verdicts.json", verdicts);

    write_json(dir / "report.json", report_to_json(r));
}

// ---- comparisons ------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string format_sr(double sr) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", sr);
    return buf;
}

struct CellKey {
    int entry = 0;
    int loc = 0;
    int imp = 0;
    int sr = 0;
    int mf = 0;

    bool operator<(const CellKey& o) const {
        return std::tie(entry, loc, imp, sr, mf) < std::tie(o.entry, o.loc, o.imp, o.sr, o.mf);
    }
};

int sr_index(const std::vector<double>& grid, double sr) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] == sr) return static_cast<int>(i);
    }
    return -1;
}

Comparison run_comparison(std::string axis, std::string level_a, std::string level_b,
                          const std::vector<double>& a, const std::vector<double>& b) {
    Comparison c;
    c.axis = std::move(axis);
    c.level_a = std::move(level_a);
    c.level_b = std::move(level_b);
    c.n = static_cast<int>(a.size());
    if (a.empty()) {
        c.note = "no paired observations";
        return c;
    }
    try {
        stats::WilcoxonResult w = stats::wilcoxon_signed_rank(a, b);
        c.statistic = w.statistic;
        c.p_value = w.p_value;
        c.exact = w.exact;
        c.defined = true;
    } catch (const stats::AllZeroDifferences&) {
        c.note = "all differences zero";
    }
    return c;
}

std::vector<Comparison> build_comparisons(const std::vector<RunReport>& runs,
                                          const std::vector<MisuseManifestEntry>& entries,
                                          const std::vector<filter::StrategyConfig>& configs,
                                          const std::vector<double>& sr_grid) {
    std::map<CellKey, double> freq;
    for (std::size_t e = 0; e < entries.size(); ++e) {
        for (std::size_t c = 0; c < configs.size(); ++c) {
            const RunReport& r = runs[e * configs.size() + c];
            if (r.skipped || !r.rpf_defined) continue;
            CellKey key{static_cast<int>(e), static_cast<int>(r.config.search_loc),
                        static_cast<int>(r.config.search_imp), sr_index(sr_grid, r.config.sr),
                        r.config.method_filter ? 1 : 0};
            freq[key] = r.relative_pattern_frequency;
        }
    }

    auto paired = [&](auto mutate_a, auto mutate_b) {
        std::pair<std::vector<double>, std::vector<double>> out;
        for (const auto& [key, value] : freq) {
            CellKey ka = key;
            mutate_a(ka);
            if (!(ka < key) && !(key < ka)) { // key already is the A side
                CellKey kb = key;
                mutate_b(kb);
                auto it = freq.find(kb);
                if (it != freq.end()) {
                    out.first.push_back(value);
                    out.second.push_back(it->second);
                }
            }
        }
        return out;
    };

    std::vector<Comparison> out;
    {
        auto [a, b] = paired([](CellKey& k) { k.loc = 0; }, [](CellKey& k) { k.loc = 1; });
        out.push_back(run_comparison("search_loc", filter::to_string(filter::SearchLoc::Internal),
                                     filter::to_string(filter::SearchLoc::External), a, b));
    }
    {
        auto [a, b] = paired([](CellKey& k) { k.imp = 0; }, [](CellKey& k) { k.imp = 1; });
        out.push_back(run_comparison(
            "search_imp", filter::to_string(filter::SearchImp::AllImports),
            filter::to_string(filter::SearchImp::MisusedImports), a, b));
    }
    {
        auto [a, b] = paired([](CellKey& k) { k.mf = 0; }, [](CellKey& k) { k.mf = 1; });
        out.push_back(run_comparison("method_filter", "off", "on", a, b));
    }
    for (std::size_t i = 0; i < sr_grid.size(); ++i) {
        for (std::size_t j = i + 1; j < sr_grid.size(); ++j) {
            auto [a, b] = paired([i](CellKey& k) { k.sr = static_cast<int>(i); },
                                 [j](CellKey& k) { k.sr = static_cast<int>(j); });
            out.push_back(run_comparison("sr", format_sr(sr_grid[i]), format_sr(sr_grid[j]),
                                         a, b));
        }
    }
    return out;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

// ---- manifest ---------------------------------------------------------------

std::string to_string(GroundTruth label) {
    return label == GroundTruth::Misuse ? "Misuse" : "Correct";
}

MisuseManifestEntry entry_from_json(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ManifestError("manifest entry: expected a JSON object");
    MisuseManifestEntry e;
    e.id = require_string(j, "id");
    if (j.contains("repo")) {
        e.repo = require_string(j, "repo");
    } else if (j.contains("repo_url_or_path")) {
        e.repo = require_string(j, "repo_url_or_path");
    } else {
        throw ManifestError("manifest entry: missing string field 'repo'");
    }
    e.repo = resolve_path(e.repo, base_dir);
    e.fixing_commit = require_string(j, "fixing_commit");
    e.misused_imports = optional_string_array(j, "misused_imports");
    e.misuse_file = require_string(j, "misuse_file");
    e.misuse_method = require_string(j, "misuse_method");
    if (j.contains("label")) {
        std::string label = lower(require_string(j, "label"));
        if (label == "misuse") {
            e.label = GroundTruth::Misuse;
        } else if (label == "correct") {
            e.label = GroundTruth::Correct;
        } else {
            throw ManifestError("manifest entry '" + e.id + "': unknown label '" + label + "'");
        }
    }
    for (const std::string& p : optional_string_array(j, "fixing_patterns")) {
        e.fixing_pattern_files.push_back(resolve_path(p, base_dir));
    }
    return e;
}

json entry_to_json(const MisuseManifestEntry& entry) {
    json j;
    j["id"] = entry.id;
    j["repo"] = entry.repo;
    j["fixing_commit"] = entry.fixing_commit;
    j["misused_imports"] = entry.misused_imports;
    j["misuse_file"] = entry.misuse_file;
    j["misuse_method"] = entry.misuse_method;
    if (entry.label) j["label"] = to_string(*entry.label);
    if (!entry.fixing_pattern_files.empty()) j["fixing_patterns"] = entry.fixing_pattern_files;
    return j;
}

std::vector<MisuseManifestEntry> parse_manifest(const std::string& jsonl_text,
                                                const fs::path& base_dir) {
    std::vector<MisuseManifestEntry> out;
    std::set<std::string> ids;
    std::istringstream in(jsonl_text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
        MisuseManifestEntry entry = entry_from_json(j, base_dir);
        if (!ids.insert(entry.id).second) {
            throw ManifestError("manifest: duplicate entry id '" + entry.id + "'");
        }
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<MisuseManifestEntry> load_manifest(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ManifestError("cannot read manifest " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str(), file.parent_path());
}

// ---- reports ----------------------------------------------------------------

std::string config_name(const filter::StrategyConfig& config) {
    char sr[16];
    std::snprintf(sr, sizeof(sr), "sr%03d", static_cast<int>(std::lround(config.sr * 100)));
    return lower(filter::to_string(config.search_loc)) + "_" +
           (config.search_imp == filter::SearchImp::AllImports ? "all" : "misused") + "_" + sr +
           "_mf" + (config.method_filter ? "on" : "off");
}

double reduction_percent(long long from, long long to) {
    if (from <= 0) return 0.0;
    return static_cast<double>(from - to) / static_cast<double>(from) * 100.0;
}

json report_to_json(const RunReport& r) {
    json j;
    j["entry_id"] = r.entry_id;
    j["config"] = {{"search_loc", filter::to_string(r.config.search_loc)},
                   {"search_imp", filter::to_string(r.config.search_imp)},
                   {"sr", r.config.sr},
                   {"method_filter", r.config.method_filter}};
    j["config_name"] = r.config_name;
    j["skipped"] = r.skipped;
    if (r.skipped) j["skip_reason"] = r.skip_reason;
    json errors = json::array();
    for (const StageError& e : r.stage_errors) {
        errors.push_back({{"stage", e.stage}, {"message", e.message}});
    }
    j["stage_errors"] = errors;
    j["diagnostics"] = r.diagnostics;
    j["introducing_commit"] = r.introducing_commit;
    j["methods"] = {{"all", r.methods_all},
                    {"changed", r.methods_changed},
                    {"external", r.methods_external}};
    j["reductions"] = {{"a2c", r.reduction_a2c},
                       {"c2e", r.reduction_c2e},
                       {"c2e_defined", r.reduction_c2e_defined}};
    j["import_count"] = r.import_count;
    j["keyword_count"] = r.keyword_count;
    j["docs_retrieved"] = r.docs_retrieved;
    j["docs_kept"] = r.docs_kept;
    j["methods_selected"] = r.methods_selected;
    j["augs_built"] = r.augs_built;
    j["augs_skipped_budget"] = r.augs_skipped_budget;
    j["min_support"] = r.min_support;
    j["pattern_count"] = r.pattern_count;
    j["mining_truncated"] = r.mining_truncated;
    if (r.mining_truncated) j["truncation_reason"] = r.truncation_reason;
    j["rpf_defined"] = r.rpf_defined;
    j["relative_pattern_frequency"] = r.relative_pattern_frequency;
    j["fixing_pattern_rank"] = r.fixing_pattern_rank;
    j["top_hit"] = r.top_hit;
    j["verdict_defined"] = r.verdict_defined;
    if (r.verdict_defined) j["verdict"] = detection::verdict_to_json(r.verdict);
    return j;
}

std::vector<ReductionRow> report_reductions(const std::vector<RunReport>& runs) {
    std::vector<ReductionRow> rows;
    std::set<std::string> seen;
    for (const RunReport& r : runs) {
        if (!seen.insert(r.entry_id).second) continue;
        ReductionRow row;
        row.entry_id = r.entry_id;
        row.commit = r.introducing_commit;
        row.methods_all = r.methods_all;
        row.methods_changed = r.methods_changed;
        row.methods_external = r.methods_external;
        row.a2c = r.reduction_a2c;
        row.c2e = r.reduction_c2e;
        row.c2e_defined = r.reduction_c2e_defined;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t mid = v.size() / 2;
    if (v.size() % 2 == 1) return v[mid];
    return (v[mid - 1] + v[mid]) / 2.0;
}

} // namespace

ReductionSummary aggregate_reductions(const std::vector<ReductionRow>& rows) {
    ReductionSummary s;
    s.rows = static_cast<int>(rows.size());
    std::set<std::string> seen;
    std::vector<double> a2c, c2e;
    for (const ReductionRow& row : rows) {
        if (row.commit.empty()) continue;
        if (!seen.insert(row.commit).second) continue;
        a2c.push_back(row.a2c);
        c2e.push_back(row.c2e);
    }
    s.unique_commits = static_cast<int>(a2c.size());
    s.mean_a2c = mean_of(a2c);
    s.median_a2c = median_of(a2c);
    s.mean_c2e = mean_of(c2e);
    s.median_c2e = median_of(c2e);
    return s;
}

// ---- pipeline and matrix ----------------------------------------------------

std::vector<filter::StrategyConfig> matrix_configs(const std::vector<double>& sr_grid) {
    std::vector<filter::StrategyConfig> out;
    for (filter::SearchLoc loc : {filter::SearchLoc::Internal, filter::SearchLoc::External}) {
        for (filter::SearchImp imp :
             {filter::SearchImp::AllImports, filter::SearchImp::MisusedImports}) {
            for (double sr : sr_grid) {
                for (bool mf : {false, true}) {
                    out.push_back({loc, imp, sr, mf});
                }
            }
        }
    }
    return out;
}

RunReport run_pipeline(const MisuseManifestEntry& entry, const PipelineOptions& options) {
    EntryData data = prepare_entry(entry, options, needs_for(options.strategy, entry));
    CellArtifacts art;
    CellArtifacts* artp = options.out_dir.empty() ? nullptr : &art;
    RunReport report = cell_report(entry, data, options.strategy, options, artp);
    if (artp) write_run_artifacts(report, art, entry, options);
    return report;
}

MatrixReport run_matrix(const std::vector<MisuseManifestEntry>& entries,
                        const MatrixOptions& options) {
    if (entries.empty()) throw EmptyInput("run_matrix: no manifest entries");
    std::vector<filter::StrategyConfig> configs = matrix_configs(options.sr_grid);

    std::vector<EntryData> data;
    data.reserve(entries.size());
    for (const MisuseManifestEntry& entry : entries) {
        LegNeeds needs;
        needs.internal = true;
        needs.external_all = true;
        needs.external_misused = !entry.misused_imports.empty();
        data.push_back(prepare_entry(entry, options.base, needs));
    }

    MatrixReport report;
    report.runs.resize(entries.size() * configs.size());
    std::atomic<std::size_t> next{0};
    const std::size_t total = report.runs.size();
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            std::size_t e = i / configs.size();
            std::size_t c = i % configs.size();
            CellArtifacts art;
            CellArtifacts* artp = options.base.out_dir.empty() ? nullptr : &art;
            try {
                report.runs[i] = cell_report(entries[e], data[e], configs[c], options.base, artp);
                if (artp) write_run_artifacts(report.runs[i], art, entries[e], options.base);
            } catch (const std::exception& ex) {
                RunReport failed;
                failed.entry_id = entries[e].id;
                failed.config = configs[c];
                failed.config_name = config_name(configs[c]);
                failed.stage_errors.push_back({"cell", ex.what()});
                report.runs[i] = std::move(failed);
            }
        }
    };
    int workers = std::max(1, options.workers);
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();

    report.comparisons = build_comparisons(report.runs, entries, configs, options.sr_grid);
    report.reductions = report_reductions(report.runs);
    report.reduction_summary = aggregate_reductions(report.reductions);
    if (!options.base.out_dir.empty()) write_matrix_artifacts(report, options.base.out_dir);
    return report;
}

json matrix_to_json(const MatrixReport& report) {
    json j;
    json runs = json::array();
    for (const RunReport& r : report.runs) runs.push_back(report_to_json(r));
    j["runs"] = runs;
    json comps = json::array();
    for (const Comparison& c : report.comparisons) {
        comps.push_back({{"axis", c.axis},
                         {"level_a", c.level_a},
                         {"level_b", c.level_b},
                         {"n", c.n},
                         {"statistic", c.statistic},
                         {"p_value", c.p_value},
                         {"exact", c.exact},
                         {"defined", c.defined},
                         {"note", c.note}});
    }
    j["comparisons"] = comps;
    json rows = json::array();
    for (const ReductionRow& row : report.reductions) {
        rows.push_back({{"entry_id", row.entry_id},
                        {"commit", row.commit},
                        {"methods_all", row.methods_all},
                        {"methods_changed", row.methods_changed},
                        {"methods_external", row.methods_external},
                        {"a2c", row.a2c},
                        {"c2e", row.c2e},
                        {"c2e_defined", row.c2e_defined}});
    }
    j["reductions"] = rows;
    j["reduction_summary"] = {{"rows", report.reduction_summary.rows},
                              {"unique_commits", report.reduction_summary.unique_commits},
                              {"mean_a2c", report.reduction_summary.mean_a2c},
                              {"median_a2c", report.reduction_summary.median_a2c},
                              {"mean_c2e", report.reduction_summary.mean_c2e},
                              {"median_c2e", report.reduction_summary.median_c2e}};
    return j;
}

std::vector<RunReport> parse_matrix_runs(const json& j) {
    const json& rows = j.is_object() && j.contains("runs") ? j.at("runs") : j;
    if (!rows.is_array()) throw ManifestError("matrix report: expected a runs array");
    std::vector<RunReport> runs;
    for (const json& row : rows) {
        RunReport r;
        r.entry_id = row.at("entry_id").get<std::string>();
        r.config_name = row.at("config_name").get<std::string>();
        const json& cfg = row.at("config");
        std::string loc = cfg.at("search_loc").get<std::string>();
        r.config.search_loc = loc == "internal" ? filter::SearchLoc::Internal
                              : loc == "external" ? filter::SearchLoc::External
                                                  : filter::SearchLoc::Both;
        r.config.search_imp = cfg.at("search_imp").get<std::string>() == "all_imports"
                                  ? filter::SearchImp::AllImports
                                  : filter::SearchImp::MisusedImports;
        r.config.sr = cfg.at("sr").get<double>();
        r.config.method_filter = cfg.at("method_filter").get<bool>();
        r.skipped = row.at("skipped").get<bool>();
        if (row.contains("skip_reason")) r.skip_reason = row.at("skip_reason").get<std::string>();
        r.introducing_commit = row.at("introducing_commit").get<std::string>();
        const json& methods = row.at("methods");
        r.methods_all = methods.at("all").get<long long>();
        r.methods_changed = methods.at("changed").get<long long>();
        r.methods_external = methods.at("external").get<long long>();
        const json& red = row.at("reductions");
        r.reduction_a2c = red.at("a2c").get<double>();
        r.reduction_c2e = red.at("c2e").get<double>();
        r.reduction_c2e_defined = red.at("c2e_defined").get<bool>();
        r.rpf_defined = row.at("rpf_defined").get<bool>();
        r.relative_pattern_frequency = row.at("relative_pattern_frequency").get<double>();
        r.fixing_pattern_rank = row.at("fixing_pattern_rank").get<int>();
        r.top_hit = row.at("top_hit").get<bool>();
        r.pattern_count = row.at("pattern_count").get<int>();
        r.verdict_defined = row.at("verdict_defined").get<bool>();
        if (r.verdict_defined) {
            const json& v = row.at("verdict");
            r.verdict.classification = v.at("classification").get<std::string>() == "misuse"
                                           ? detection::Classification::Misuse
                                           : detection::Classification::Correct;
            r.verdict.overlap.num = v.at("overlap_numerator").get<long long>();
            r.verdict.overlap.den = v.at("overlap_denominator").get<long long>();
        }
        runs.push_back(std::move(r));
    }
    return runs;
}

void write_matrix_artifacts(const MatrixReport& report, const fs::path& out_dir) {
    write_json(out_dir / "matrix.json", matrix_to_json(report));

    std::ostringstream reductions;
    reductions << "entry,commit,methods_all,methods_changed,methods_external,a2c,c2e,"
                  "c2e_defined\n";
    for (const ReductionRow& row : report.reductions) {
        reductions << csv_escape(row.entry_id) << ',' << row.commit << ',' << row.methods_all
                   << ',' << row.methods_changed << ',' << row.methods_external << ','
                   << format_double(row.a2c) << ',' << format_double(row.c2e) << ','
                   << (row.c2e_defined ? "true" : "false") << '\n';
    }
    write_text(out_dir / "reductions.csv", reductions.str());

    std::ostringstream freq;
    freq << "entry,config,skipped,rpf_defined,relative_pattern_frequency,pattern_count,"
            "fixing_pattern_rank,top_hit\n";
    for (const RunReport& r : report.runs) {
        freq << csv_escape(r.entry_id) << ',' << r.config_name << ','
             << (r.skipped ? "true" : "false") << ',' << (r.rpf_defined ? "true" : "false")
             << ',' << format_double(r.relative_pattern_frequency) << ',' << r.pattern_count
             << ',' << r.fixing_pattern_rank << ',' << (r.top_hit ? "true" : "false") << '\n';
    }
    write_text(out_dir / "frequencies.csv", freq.str());

    std::ostringstream comps;
    comps << "axis,level_a,level_b,n,statistic,p_value,exact,defined,note\n";
    for (const Comparison& c : report.comparisons) {
        comps << c.axis << ',' << csv_escape(c.level_a) << ',' << csv_escape(c.level_b) << ','
              << c.n << ',' << format_double(c.statistic) << ',' << format_double(c.p_value)
              << ',' << (c.exact ? "true" : "false") << ',' << (c.defined ? "true" : "false")
              << ',' << csv_escape(c.note) << '\n';
    }
    write_text(out_dir / "comparisons.csv", comps.str());
}

// ---- evaluation ---------------------------------------------------------------

std::vector<EvaluationRow> evaluate(const std::vector<MisuseManifestEntry>& entries,
                                    const std::vector<RunReport>& runs) {
    std::map<std::string, GroundTruth> labels;
    for (const MisuseManifestEntry& e : entries) {
        if (e.label) labels.emplace(e.id, *e.label);
    }

    std::vector<std::string> order;
    std::map<std::string, EvaluationRow> rows;
    for (const RunReport& r : runs) {
        auto label = labels.find(r.entry_id);
        if (label == labels.end()) continue;
        auto it = rows.find(r.config_name);
        if (it == rows.end()) {
            order.push_back(r.config_name);
            it = rows.emplace(r.config_name, EvaluationRow{}).first;
            it->second.config_name = r.config_name;
        }
        EvaluationRow& row = it->second;
        ++row.entries_labeled;
        bool truth = label->second == GroundTruth::Misuse;
        bool predicted = !r.skipped && r.verdict_defined &&
                         r.verdict.classification == detection::Classification::Misuse;
        if (truth && predicted) ++row.counts.tp;
        if (!truth && predicted) ++row.counts.fp;
        if (truth && !predicted) ++row.counts.fn;
        if (!truth && !predicted) ++row.counts.tn;
    }

    std::vector<EvaluationRow> out;
    out.reserve(order.size());
    for (const std::string& name : order) {
        EvaluationRow row = rows[name];
        stats::PrecisionRecall pr = stats::precision_recall(row.counts);
        row.precision = pr.precision;
        row.recall = pr.recall;
        row.precision_defined = pr.precision_defined;
        row.recall_defined = pr.recall_defined;
        try {
            stats::ChiSquareResult chi = stats::chi_square_yates(row.counts.tp, row.counts.fp,
                                                                 row.counts.fn, row.counts.tn);
            row.chi_square = chi.statistic;
            row.chi_p = chi.p_value;
            row.chi_defined = true;
        } catch (const stats::DegenerateTable&) {
            row.chi_defined = false;
        }
        out.push_back(std::move(row));
    }
    return out;
}

json evaluation_to_json(const std::vector<EvaluationRow>& rows) {
    json arr = json::array();
    for (const EvaluationRow& row : rows) {
        arr.push_back({{"config", row.config_name},
                       {"entries_labeled", row.entries_labeled},
                       {"tp", row.counts.tp},
                       {"fp", row.counts.fp},
                       {"tn", row.counts.tn},
                       {"fn", row.counts.fn},
                       {"precision", row.precision},
                       {"recall", row.recall},
                       {"precision_defined", row.precision_defined},
                       {"recall_defined", row.recall_defined},
                       {"chi_square", row.chi_square},
                       {"chi_p", row.chi_p},
                       {"chi_defined", row.chi_defined}});
    }
    return arr;
}

std::string evaluation_csv(const std::vector<EvaluationRow>& rows) {
    std::ostringstream out;
    out << "config,entries_labeled,tp,fp,tn,fn,precision,recall,precision_defined,"
           "recall_defined,chi_square,chi_p,chi_defined\n";
    for (const EvaluationRow& row : rows) {
        out << csv_escape(row.config_name) << ',' << row.entries_labeled << ','
            << row.counts.tp << ',' << row.counts.fp << ',' << row.counts.tn << ','
            << row.counts.fn << ',' << format_double(row.precision) << ','
            << format_double(row.recall) << ',' << (row.precision_defined ? "true" : "false")
            << ',' << (row.recall_defined ? "true" : "false") << ','
            << format_double(row.chi_square) << ',' << format_double(row.chi_p) << ','
            << (row.chi_defined ? "true" : "false") << '\n';
    }
    return out.str();
}

} // namespace augmine::harness
