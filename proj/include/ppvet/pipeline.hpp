#pragma once

// End-to-end orchestration: configuration, resource loading, the per-policy
// vetting pipeline (text -> components -> tuples -> compliance), corpus-wide
// runs with a bounded worker pool, and report serialization. Reports are
// byte-identical across runs on identical inputs: no timestamps, ordered
// keys, sorted collections.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppvet/compliance.hpp"
#include "ppvet/components.hpp"
#include "ppvet/corpus.hpp"
#include "ppvet/cusextract.hpp"
#include "ppvet/lexicon.hpp"
#include "ppvet/ontology.hpp"
#include "ppvet/textproc.hpp"

namespace ppvet {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct RunConfig {
    std::string data_ontology;
    std::string entity_ontology;
    std::string data_lexicon;
    std::string entity_lexicon;
    std::string soc_verbs;
    std::string component_rules;
    std::string evidence_map;
    std::string templates;
    std::string phrases;

    double similarity_threshold = 0.8;  // terminologization
    double majority_threshold = 0.5;    // minimization
    int coarse_ctg = 2;
    std::size_t counterpart_k = 10;
    int max_hops = 2;
    bool extended_link_keywords = false;
    bool exact_minimization = false;
    std::string provider = "token-jaccard";  // token-jaccard | exact-match | none
    std::size_t jobs = 0;                    // 0 = hardware concurrency
};

// All data-file paths resolved against `data_dir` with the shipped names.
RunConfig default_run_config(const std::string& data_dir);

// JSON config file with the same field names; missing fields keep defaults.
RunConfig load_run_config_file(const std::string& path, const RunConfig& base);

// Throws ConfigError for unresolvable paths or out-of-range thresholds.
void validate_run_config(const RunConfig& config);

// Everything loaded once per run; immutable afterwards, safe to share
// across the worker pool.
class Resources {
public:
    explicit Resources(const RunConfig& config);

    const RunConfig& config() const { return config_; }
    const Ontology& data_ontology() const { return data_ont_; }
    const Ontology& entity_ontology() const { return entity_ont_; }
    const Lexicon& data_lexicon() const { return data_lex_; }
    const Lexicon& entity_lexicon() const { return entity_lex_; }
    const SocVerbList& verbs() const { return verbs_; }
    const ComponentRuleSet& rules() const { return rules_; }
    const EvidenceMap& evidence_map() const { return emap_; }
    const EmbeddingProvider* provider() const { return provider_.get(); }

private:
    RunConfig config_;
    Ontology data_ont_;
    Ontology entity_ont_;
    Lexicon data_lex_;
    Lexicon entity_lex_;
    SocVerbList verbs_;
    ComponentRuleSet rules_;
    EvidenceMap emap_;
    std::unique_ptr<EmbeddingProvider> provider_;
};

// One app's vetting outcome; the JSON report is rendered from this.
struct AppVetting {
    std::string app_id;
    bool policy_present = false;
    bool c1_available = false;
    std::string c1_source;  // provided | item_page | homepage_hops | none
    DocumentProvenance provenance;

    std::optional<CompletenessRecord> completeness;
    bool children_applicable = false;
    bool mentions_children = false;

    std::optional<GranularityReport> granularity;
    std::optional<double> ppg_percentile;

    std::optional<CounterpartSet> counterparts;
    std::optional<std::vector<OverbroadFinding>> overbroad;

    std::optional<ConsistencyResult> consistency;

    std::vector<std::string> unterminologized_phrases;  // sorted, deduped
    std::vector<std::string> notes;
};

// Runs the per-policy pipeline. `policy` may be HTML or plaintext; pass
// std::nullopt for `evidence` to leave C5 not-evaluated (an empty vector is
// "evaluated, nothing found"). Counterpart analysis is corpus-level and
// stays not-evaluated here.
AppVetting vet_policy(const Resources& res, const RawDocument& policy,
                      const AppRecord& meta,
                      const std::optional<std::vector<std::string>>& evidence);

// AppVetting for an app with no policy at all (C2-C4 not evaluated; C5
// against empty bounds when evidence exists).
AppVetting vet_absent_policy(const Resources& res, const AppRecord& meta,
                             const std::optional<std::vector<std::string>>& evidence);

std::string report_to_json(const AppVetting& vetting, const Resources& res);
std::string report_summary_text(const AppVetting& vetting);

struct CorpusReportBundle {
    // app id -> report JSON, in sorted order.
    std::vector<std::pair<std::string, std::string>> reports;
    std::string stats_json;
    std::vector<std::string> warnings;
};

// Vets every app in the store: per-app pipelines fan out across a bounded
// worker pool, then the corpus passes (percentiles, counterparts,
// minimization, platform stats, reuse clusters) run over the collected
// results. Output ordering is by app id throughout.
CorpusReportBundle vet_corpus(const Resources& res, CorpusStore& store);

// Writes reports/<app_id>.json plus corpus_stats.json under out_dir.
void write_bundle(const CorpusReportBundle& bundle, const std::string& out_dir);

struct SyntheticRunResult {
    std::size_t cus_sentences = 0;
    std::size_t non_cus_sentences = 0;
    PipelineEvalResult eval;
    std::string corpus_jsonl;
    std::string report_json;
};

// Generates the gold corpus from the configured templates and phrase list,
// then immediately scores the shipped extractor against it.
SyntheticRunResult gen_synthetic(const Resources& res);

}  // namespace ppvet
