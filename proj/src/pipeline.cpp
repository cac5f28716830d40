#include "ppvet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace ppvet {

RunConfig default_run_config(const std::string& data_dir) {
    RunConfig c;
    const fs::path dir(data_dir);
    c.data_ontology = (dir / "data_ontology.json").string();
    c.entity_ontology = (dir / "entity_ontology.json").string();
    c.data_lexicon = (dir / "data_lexicon.json").string();
    c.entity_lexicon = (dir / "entity_lexicon.json").string();
    c.soc_verbs = (dir / "soc_verbs.json").string();
    c.component_rules = (dir / "component_rules.json").string();
    c.evidence_map = (dir / "evidence_map.json").string();
    c.templates = (dir / "synthetic_templates.json").string();
    c.phrases = (dir / "vr_phrases.json").string();
    return c;
}

RunConfig load_run_config_file(const std::string& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    RunConfig c = base;
    auto path_field = [&](const char* key, std::string& dst) {
        if (j.contains(key)) dst = j[key].get<std::string>();
    };
    path_field("data_ontology", c.data_ontology);
    path_field("entity_ontology", c.entity_ontology);
    path_field("data_lexicon", c.data_lexicon);
    path_field("entity_lexicon", c.entity_lexicon);
    path_field("soc_verbs", c.soc_verbs);
    path_field("component_rules", c.component_rules);
    path_field("evidence_map", c.evidence_map);
    path_field("templates", c.templates);
    path_field("phrases", c.phrases);
    c.similarity_threshold = j.value("similarity_threshold", c.similarity_threshold);
    c.majority_threshold = j.value("majority_threshold", c.majority_threshold);
    c.coarse_ctg = j.value("coarse_ctg", c.coarse_ctg);
    c.counterpart_k = j.value("counterpart_k", c.counterpart_k);
    c.max_hops = j.value("max_hops", c.max_hops);
    c.extended_link_keywords = j.value("extended_link_keywords", c.extended_link_keywords);
    c.exact_minimization = j.value("exact_minimization", c.exact_minimization);
    c.provider = j.value("provider", c.provider);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

void validate_run_config(const RunConfig& c) {
    for (const auto& [label, path] :
         std::vector<std::pair<std::string, std::string>>{
             {"data_ontology", c.data_ontology},
             {"entity_ontology", c.entity_ontology},
             {"data_lexicon", c.data_lexicon},
             {"entity_lexicon", c.entity_lexicon},
             {"soc_verbs", c.soc_verbs},
             {"component_rules", c.component_rules},
             {"evidence_map", c.evidence_map}}) {
        if (path.empty() || !fs::exists(path))
            throw ConfigError(label + " path not resolvable: '" + path + "'");
    }
    if (c.similarity_threshold <= 0.0 || c.similarity_threshold > 1.0)
        throw ConfigError("similarity_threshold must be in (0, 1]");
    if (c.majority_threshold <= 0.0 || c.majority_threshold > 1.0)
        throw ConfigError("majority_threshold must be in (0, 1]");
    if (c.coarse_ctg < 1) throw ConfigError("coarse_ctg must be >= 1");
    if (c.max_hops < 1) throw ConfigError("max_hops must be >= 1");
    if (c.provider != "token-jaccard" && c.provider != "exact-match" &&
        c.provider != "none")
        throw ConfigError("provider must be token-jaccard, exact-match or none");
}

namespace {

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& name) {
    if (name == "token-jaccard") return std::make_unique<TokenJaccardProvider>();
    if (name == "exact-match") return std::make_unique<ExactMatchProvider>();
    return nullptr;  // "none"
}

}  // namespace

Resources::Resources(const RunConfig& config)
    : config_(config),
      data_ont_(load_ontology_file(config.data_ontology)),
      entity_ont_(load_ontology_file(config.entity_ontology)),
      data_lex_(load_lexicon_file(config.data_lexicon, data_ont_)),
      entity_lex_(load_lexicon_file(config.entity_lexicon, entity_ont_)),
      verbs_(load_soc_verbs_file(config.soc_verbs)),
      rules_(load_component_rules_file(config.component_rules)),
      emap_(load_evidence_map_file(config.evidence_map, data_ont_)),
      provider_(make_provider(config.provider)) {}

namespace {

AppIdentity identity_of(const AppRecord& meta) {
    AppIdentity id;
    id.app_id = meta.app_id;
    id.name = meta.name;
    id.publisher = meta.developer;
    for (const std::string& url : {meta.homepage_url, meta.policy_url}) {
        if (url.empty()) continue;
        const std::string label = registrable_label(url);
        if (!label.empty()) id.domains.push_back(label);
    }
    return id;
}

bool looks_like_html(const std::string& text) {
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        return c == '<';
    }
    return false;
}

const std::set<std::string> kChildGenres = {"education", "kids", "children", "family"};

ConsistencyResult run_consistency(const Resources& res,
                                  const std::vector<std::string>& evidence,
                                  const BoundsResult& bounds, bool policy_present) {
    return consistency_analysis(evidence, res.evidence_map(), bounds, policy_present);
}

}  // namespace

AppVetting vet_policy(const Resources& res, const RawDocument& policy,
                      const AppRecord& meta,
                      const std::optional<std::vector<std::string>>& evidence) {
    AppVetting v;
    v.app_id = meta.app_id;
    v.policy_present = true;
    v.c1_available = true;
    v.c1_source = meta.policy_url.empty() ? "provided" : "item_page";

    PolicyDocument doc = make_policy_document(policy);
    v.provenance = doc.provenance;
    if (doc.provenance.degraded) v.notes.push_back("degraded_html");

    // C2: component labels and completeness.
    const auto annotations = classify_document(res.rules(), doc);
    v.completeness = completeness_verdict(annotations);
    for (const auto& g : meta.genres)
        if (kChildGenres.count(normalize_phrase(g))) v.children_applicable = true;
    v.mentions_children = mentions_children_privacy(doc, annotations);

    // CUS extraction over qualifying sentences.
    const AppIdentity app_ctx = identity_of(meta);
    const auto cus_indices = identify_cus_sentences(doc, res.verbs(), res.data_lexicon(),
                                                    res.entity_lexicon());
    std::vector<CusTuple> tuples;
    for (std::size_t idx : cus_indices) {
        const Sentence& s = doc.sentences[idx];
        const auto matches =
            match_phrases(s, res.data_lexicon(), res.entity_lexicon(), &app_ctx);
        auto extracted = extract_tuples(s, matches, res.verbs());
        tuples.insert(tuples.end(), extracted.begin(), extracted.end());
    }
    tuples = resolve_first_party(std::move(tuples), app_ctx, res.entity_lexicon());
    tuples = resolve_data_terms(std::move(tuples), res.data_lexicon(), res.provider(),
                                res.config().similarity_threshold);

    std::set<std::string> unresolved_phrases;
    for (const auto& t : tuples)
        if (t.data_unterminologized)
            unresolved_phrases.insert(normalize_phrase(t.data_surface));
    v.unterminologized_phrases.assign(unresolved_phrases.begin(),
                                      unresolved_phrases.end());

    // C3: granularity and bounds.
    v.granularity = granularity_analysis(tuples, res.data_ontology(),
                                         res.entity_ontology(), res.config().coarse_ctg);

    // C5 when evidence is supplied.
    if (evidence)
        v.consistency = run_consistency(res, *evidence, v.granularity->bounds, true);
    return v;
}

AppVetting vet_absent_policy(const Resources& res, const AppRecord& meta,
                             const std::optional<std::vector<std::string>>& evidence) {
    AppVetting v;
    v.app_id = meta.app_id;
    v.policy_present = false;
    v.c1_available = false;
    v.c1_source = "none";
    if (evidence) {
        BoundsResult empty_bounds;
        empty_bounds.claimed.ontology_id = res.data_ontology().id();
        empty_bounds.lower.ontology_id = res.data_ontology().id();
        empty_bounds.upper.ontology_id = res.data_ontology().id();
        v.consistency = run_consistency(res, *evidence, empty_bounds, false);
    }
    return v;
}

// --- report rendering -----------------------------------------------------

namespace {

ordered_json tuple_json(const TupleGranularity& tg) {
    ordered_json j;
    j["entity"] = tg.tuple.entity_term;
    j["data"] = tg.tuple.data_term;
    j["action"] = to_string(tg.tuple.action);
    j["negated"] = tg.tuple.negated;
    j["entity_ctg"] = tg.entity_ctg;
    j["data_ctg"] = tg.data_ctg;
    j["coarse"] = tg.coarse;
    j["sentence_index"] = tg.tuple.sentence_index;
    j["entity_surface"] = tg.tuple.entity_surface;
    j["data_surface"] = tg.tuple.data_surface;
    j["verb"] = tg.tuple.verb_lemma;
    j["entity_unresolved"] = tg.tuple.entity_unresolved;
    return j;
}

ordered_json not_evaluated() {
    ordered_json j;
    j["status"] = "not_evaluated";
    return j;
}

}  // namespace

std::string report_to_json(const AppVetting& v, const Resources& res) {
    ordered_json report;
    report["schema_version"] = kReportSchemaVersion;
    report["toolkit_version"] = kToolkitVersion;
    report["app_id"] = v.app_id;

    ordered_json versions;
    versions["data_ontology"] = res.data_ontology().version;
    versions["entity_ontology"] = res.entity_ontology().version;
    versions["data_lexicon"] = res.data_lexicon().version;
    versions["entity_lexicon"] = res.entity_lexicon().version;
    versions["soc_verbs"] = res.verbs().version;
    versions["component_rules"] = res.rules().version;
    versions["evidence_map"] = res.evidence_map().version;
    report["data_versions"] = std::move(versions);

    ordered_json config;
    config["similarity_threshold"] = res.config().similarity_threshold;
    config["majority_threshold"] = res.config().majority_threshold;
    config["coarse_ctg"] = res.config().coarse_ctg;
    config["counterpart_k"] = res.config().counterpart_k;
    config["max_hops"] = res.config().max_hops;
    config["provider"] = res.config().provider;
    report["config"] = std::move(config);

    // C1
    {
        ordered_json c1;
        c1["status"] = "evaluated";
        c1["available"] = v.c1_available;
        c1["source"] = v.c1_source;
        report["c1_availability"] = std::move(c1);
    }

    // C2
    if (v.completeness) {
        ordered_json c2;
        c2["status"] = "evaluated";
        c2["complete"] = v.completeness->complete;
        c2["zero_components"] = v.completeness->zero_components;
        ordered_json present;
        for (ComponentLabel label : all_component_labels())
            present[to_string(label)] = v.completeness->present.at(label);
        c2["present"] = std::move(present);
        std::vector<std::string> missing;
        for (ComponentLabel label : v.completeness->missing)
            missing.push_back(to_string(label));
        c2["missing"] = missing;
        ordered_json children;
        children["applicable"] = v.children_applicable;
        children["mentions_children"] = v.mentions_children;
        c2["children_check"] = std::move(children);
        report["c2_completeness"] = std::move(c2);
    } else {
        report["c2_completeness"] = not_evaluated();
    }

    // C3
    if (v.granularity) {
        const GranularityReport& g = *v.granularity;
        ordered_json c3;
        c3["status"] = "evaluated";
        c3["tuple_count"] = g.tuples.size();
        c3["coarse_count"] = g.coarse_indices.size();
        c3["first_party_count"] = g.first_party_indices.size();
        c3["third_party_count"] = g.third_party_indices.size();
        ordered_json spec;
        for (const auto& [kind, count] : g.third_party_specificity)
            spec[to_string(kind)] = count;
        c3["third_party_specificity"] = std::move(spec);
        c3["claimed"] = g.bounds.claimed.terms;
        c3["lower_bound"] = g.bounds.lower.terms;
        c3["upper_bound"] = g.bounds.upper.terms;
        c3["gap"] = g.bounds.gap.terms;
        c3["ppg"] = g.ppg;
        if (v.ppg_percentile)
            c3["ppg_percentile"] = *v.ppg_percentile;
        else
            c3["ppg_percentile"] = nullptr;
        c3["negated_count"] = g.negated_count;
        c3["unterminologized_count"] = g.unterminologized_count;
        c3["unterminologized_phrases"] = v.unterminologized_phrases;
        ordered_json tuples = ordered_json::array();
        for (const auto& tg : g.tuples) tuples.push_back(tuple_json(tg));
        c3["tuples"] = std::move(tuples);
        report["c3_granularity"] = std::move(c3);
    } else {
        report["c3_granularity"] = not_evaluated();
    }

    // C4
    if (v.overbroad && v.counterparts) {
        ordered_json c4;
        c4["status"] = "evaluated";
        c4["comparable"] = v.counterparts->comparable;
        ordered_json parts = ordered_json::array();
        for (const auto& [id, source] : v.counterparts->counterparts)
            parts.push_back({{"app_id", id}, {"source", to_string(source)}});
        c4["counterparts"] = std::move(parts);
        ordered_json findings = ordered_json::array();
        for (const auto& f : *v.overbroad)
            findings.push_back({{"data_term", f.data_term},
                                {"covered", f.covered},
                                {"total", f.total},
                                {"majority", f.majority}});
        c4["findings"] = std::move(findings);
        c4["pass"] = v.overbroad->empty();
        report["c4_minimization"] = std::move(c4);
    } else {
        report["c4_minimization"] = not_evaluated();
    }

    // C5
    if (v.consistency) {
        ordered_json c5;
        c5["status"] = "evaluated";
        c5["no_policy"] = v.consistency->no_policy;
        ordered_json findings = ordered_json::array();
        std::map<std::string, std::size_t> counts{
            {"disclosed", 0}, {"vague", 0}, {"inconsistent", 0}};
        for (const auto& f : v.consistency->findings) {
            findings.push_back({{"data_term", f.data_term},
                                {"verdict", to_string(f.verdict)},
                                {"evidence_ids", f.evidence_ids}});
            ++counts[to_string(f.verdict)];
        }
        c5["findings"] = std::move(findings);
        ordered_json counts_json;
        for (const auto& [key, value] : counts) counts_json[key] = value;
        c5["counts"] = std::move(counts_json);
        report["c5_consistency"] = std::move(c5);
    } else {
        report["c5_consistency"] = not_evaluated();
    }

    report["notes"] = v.notes;
    return report.dump(2) + "\n";
}

std::string report_summary_text(const AppVetting& v) {
    std::ostringstream out;
    out << "app: " << v.app_id << "\n";
    out << "  C1 availability: "
        << (v.c1_available ? "available (" + v.c1_source + ")" : "NOT AVAILABLE")
        << "\n";
    if (v.completeness) {
        out << "  C2 completeness: "
            << (v.completeness->complete ? "complete" : "incomplete");
        if (v.completeness->zero_components) out << " (no valid component)";
        if (!v.completeness->missing.empty()) {
            out << " missing:";
            for (ComponentLabel label : v.completeness->missing)
                out << " " << to_string(label);
        }
        out << "\n";
    } else {
        out << "  C2 completeness: not evaluated\n";
    }
    if (v.granularity) {
        out << "  C3 granularity: " << v.granularity->tuples.size() << " tuples, "
            << v.granularity->coarse_indices.size() << " coarse, ppg "
            << v.granularity->ppg;
        if (v.ppg_percentile) out << " (percentile " << *v.ppg_percentile << ")";
        out << "\n";
    } else {
        out << "  C3 granularity: not evaluated\n";
    }
    if (v.overbroad && v.counterparts) {
        if (!v.counterparts->comparable)
            out << "  C4 minimization: not comparable\n";
        else
            out << "  C4 minimization: "
                << (v.overbroad->empty() ? "pass" : std::to_string(v.overbroad->size()) +
                                                        " overbroad term(s)")
                << "\n";
    } else {
        out << "  C4 minimization: not evaluated\n";
    }
    if (v.consistency) {
        std::size_t disclosed = 0, vague = 0, inconsistent = 0;
        for (const auto& f : v.consistency->findings) {
            if (f.verdict == ConsistencyVerdict::disclosed) ++disclosed;
            if (f.verdict == ConsistencyVerdict::vague) ++vague;
            if (f.verdict == ConsistencyVerdict::inconsistent) ++inconsistent;
        }
        out << "  C5 consistency: " << disclosed << " disclosed, " << vague
            << " vague, " << inconsistent << " inconsistent";
        if (v.consistency->no_policy) out << " (no policy)";
        out << "\n";
    } else {
        out << "  C5 consistency: not evaluated\n";
    }
    return out.str();
}

// --- corpus runs ------------------------------------------------------------

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
    if (jobs == 0) jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : workers) t.join();
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

}  // namespace

CorpusReportBundle vet_corpus(const Resources& res, CorpusStore& store) {
    CorpusReportBundle bundle;
    const std::vector<std::string> ids = store.app_ids();
    if (ids.empty()) {
        bundle.warnings.push_back("empty store: nothing to vet");
        ordered_json stats;
        stats["schema_version"] = kReportSchemaVersion;
        stats["toolkit_version"] = kToolkitVersion;
        stats["app_count"] = 0;
        stats["policy_count"] = 0;
        stats["platforms"] = ordered_json::array();
        stats["reuse_clusters"] = ordered_json::array();
        bundle.stats_json = stats.dump(2) + "\n";
        return bundle;
    }

    // Pass 1: per-app pipelines, corpus-parallel over immutable inputs.
    std::vector<AppVetting> results(ids.size());
    parallel_for(ids.size(), res.config().jobs, [&](std::size_t i) {
        const AppRecord& record = *store.find(ids[i]);
        const auto evidence = store.evidence(record.app_id);
        const auto text = store.policy_text(record.app_id);
        try {
            if (text) {
                RawDocument policy;
                policy.app_id = record.app_id;
                policy.bytes = *text;
                policy.kind = looks_like_html(*text) ? DocumentKind::policy_html
                                                     : DocumentKind::policy_text;
                policy.source_url = record.policy_url;
                results[i] = vet_policy(res, policy, record, evidence);
            } else {
                results[i] = vet_absent_policy(res, record, evidence);
                // The policy may still be reachable even though no text is
                // stored; C1 credits the link.
                if (!record.policy_url.empty()) {
                    results[i].c1_available = true;
                    results[i].c1_source = "item_page";
                } else if (app_policy_available(store, record, res.config().max_hops)) {
                    results[i].c1_available = true;
                    results[i].c1_source = "homepage_hops";
                }
            }
        } catch (const Error& e) {
            AppVetting failed;
            failed.app_id = record.app_id;
            failed.policy_present = static_cast<bool>(text);
            failed.c1_available = static_cast<bool>(text) || !record.policy_url.empty();
            failed.c1_source = failed.c1_available ? "item_page" : "none";
            failed.notes.push_back(std::string("stage_failure: ") + e.what());
            results[i] = std::move(failed);
        }
    });

    // Pass 2a: PPG percentiles need the whole corpus.
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (results[i].granularity) store.set_ppg(ids[i], results[i].granularity->ppg);
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (results[i].granularity)
            results[i].ppg_percentile = ppg_percentile(store, ids[i]);

    // Pass 2b: counterpart discovery and minimization, per app with bounds.
    std::map<std::string, TermSet> lower_bounds;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (results[i].granularity)
            lower_bounds[ids[i]] = results[i].granularity->bounds.lower;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!results[i].granularity) continue;
        const AppRecord& record = *store.find(ids[i]);
        CounterpartSet parts = find_counterparts(record, store, res.config().counterpart_k);
        std::vector<TermSet> counterpart_lowers;
        for (const auto& [id, source] : parts.counterparts) {
            (void)source;
            auto it = lower_bounds.find(id);
            if (it != lower_bounds.end()) counterpart_lowers.push_back(it->second);
        }
        if (counterpart_lowers.empty()) parts.comparable = false;
        results[i].counterparts = parts;
        if (parts.comparable) {
            results[i].overbroad = minimization_analysis(
                results[i].granularity->bounds.lower, counterpart_lowers,
                res.data_ontology(), res.config().majority_threshold,
                res.config().exact_minimization);
        } else {
            results[i].overbroad = std::vector<OverbroadFinding>{};
        }
    }

    // Pass 3: platform stats and reuse clusters.
    ordered_json stats;
    stats["schema_version"] = kReportSchemaVersion;
    stats["toolkit_version"] = kToolkitVersion;
    stats["app_count"] = ids.size();
    std::size_t policy_count = 0;
    for (const auto& r : results)
        if (r.policy_present) ++policy_count;
    stats["policy_count"] = policy_count;

    std::map<std::string, std::size_t> platform_index;
    ordered_json platforms = ordered_json::array();
    for (const auto& platform : store.platforms()) {
        PlatformStats ps = availability(store, platform, res.config().max_hops);
        std::vector<double> ppgs;
        std::size_t comparable = 0, overbroad_apps = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const AppRecord& record = *store.find(ids[i]);
            if (!record.platforms.count(platform)) continue;
            if (results[i].granularity)
                ppgs.push_back(static_cast<double>(results[i].granularity->ppg));
            if (results[i].counterparts && results[i].counterparts->comparable) {
                ++comparable;
                if (results[i].overbroad && !results[i].overbroad->empty())
                    ++overbroad_apps;
            }
        }
        ordered_json p;
        p["platform"] = platform;
        p["app_count"] = ps.app_count;
        p["policy_count"] = ps.policy_count;
        if (ps.availability)
            p["availability"] = *ps.availability;
        else
            p["availability"] = nullptr;
        if (!ppgs.empty()) {
            double mean = 0;
            for (double x : ppgs) mean += x;
            mean /= static_cast<double>(ppgs.size());
            p["ppg_mean"] = mean;
            p["ppg_median"] = median_of(ppgs);
        } else {
            p["ppg_mean"] = nullptr;
            p["ppg_median"] = nullptr;
        }
        p["comparable_count"] = comparable;
        p["overbroad_count"] = overbroad_apps;
        if (comparable > 0)
            p["overbroad_ratio"] =
                static_cast<double>(overbroad_apps) / static_cast<double>(comparable);
        else
            p["overbroad_ratio"] = nullptr;
        platforms.push_back(std::move(p));
    }
    stats["platforms"] = std::move(platforms);

    ordered_json clusters = ordered_json::array();
    for (const auto& cluster : reuse_detector(store))
        clusters.push_back({{"size", cluster.size}, {"app_ids", cluster.app_ids}});
    stats["reuse_clusters"] = std::move(clusters);
    bundle.stats_json = stats.dump(2) + "\n";

    for (std::size_t i = 0; i < ids.size(); ++i)
        bundle.reports.emplace_back(ids[i], report_to_json(results[i], res));
    return bundle;
}

void write_bundle(const CorpusReportBundle& bundle, const std::string& out_dir) {
    fs::create_directories(fs::path(out_dir) / "reports");
    for (const auto& [app_id, report] : bundle.reports) {
        std::ofstream out(fs::path(out_dir) / "reports" / (app_id + ".json"),
                          std::ios::binary);
        if (!out) throw StoreError("cannot write report for " + app_id);
        out << report;
    }
    std::ofstream stats(fs::path(out_dir) / "corpus_stats.json", std::ios::binary);
    if (!stats) throw StoreError("cannot write corpus_stats.json");
    stats << bundle.stats_json;
}

SyntheticRunResult gen_synthetic(const Resources& res) {
    const TemplateFile templates = load_templates_file(res.config().templates);
    const auto phrases = load_phrase_list_file(res.config().phrases);
    const auto corpus = generate_synthetic_corpus(templates, phrases);

    SyntheticRunResult result;
    for (const auto& g : corpus)
        (g.is_cus ? result.cus_sentences : result.non_cus_sentences) += 1;
    result.eval = evaluate_pipeline(corpus, res.data_lexicon(), res.entity_lexicon(),
                                    res.verbs(), res.provider(),
                                    res.config().similarity_threshold);
    result.corpus_jsonl = gold_corpus_to_jsonl(corpus);

    ordered_json report;
    report["schema_version"] = kReportSchemaVersion;
    report["toolkit_version"] = kToolkitVersion;
    report["templates_version"] = templates.version;
    report["cus_sentences"] = result.cus_sentences;
    report["non_cus_sentences"] = result.non_cus_sentences;
    report["gold_tuples"] = result.eval.gold_tuples;
    report["recovered_tuples"] = result.eval.recovered;
    report["recall"] = result.eval.recall();
    report["false_positives"] = result.eval.false_positives;
    report["false_positive_rate"] = result.eval.false_positive_rate();
    result.report_json = report.dump(2) + "\n";
    return result;
}

}  // namespace ppvet
