#pragma once

// Terminologization: mapping free-form data-object and entity phrases onto
// ontology terms. Three routes, tried in order: exact lookup against the
// synonym entries, keyword rules for semantics-free company names, and
// threshold-based similarity against known phrases through a pluggable
// embedding backend. Phrases that resolve nowhere stay unterminologized and
// feed the clustering review loop.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppvet/ontology.hpp"

namespace ppvet {

enum class EntrySource { seed, clustered, keyword };

std::string to_string(EntrySource s);
EntrySource entry_source_from_string(const std::string& s);

struct SynonymEntry {
    std::string phrase;  // normalized
    std::string term;
    EntrySource source = EntrySource::seed;
};

// Substring rule for company/app names that carry no semantics.
struct KeywordRule {
    std::string pattern;  // normalized substring
    std::string term;     // entity-ontology term
};

// Identity of the app whose policy is being analyzed; drives first-party
// resolution of entity phrases.
struct AppIdentity {
    std::string app_id;
    std::string name;
    std::string publisher;
    std::vector<std::string> domains;  // registrable labels, e.g. "vrchat"
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(const std::string& phrase) const = 0;
    // Symmetric; similarity(x, x) == 1 within 1e-6.
    virtual double similarity(const std::string& a, const std::string& b) const = 0;
    virtual std::string name() const = 0;
};

// Deterministic offline stub: token-overlap Jaccard similarity. embed()
// hashes tokens into a fixed-width bag-of-words vector.
class TokenJaccardProvider : public EmbeddingProvider {
public:
    std::vector<double> embed(const std::string& phrase) const override;
    double similarity(const std::string& a, const std::string& b) const override;
    std::string name() const override { return "token-jaccard"; }
};

// Test/bypass stub: similarity 1 for equal normalized strings, else 0.
// Reduces terminologization to plain lexicon lookup.
class ExactMatchProvider : public EmbeddingProvider {
public:
    std::vector<double> embed(const std::string& phrase) const override;
    double similarity(const std::string& a, const std::string& b) const override;
    std::string name() const override { return "exact-match"; }
};

// Lowercase, trim, collapse whitespace, strip punctuation, drop leading
// articles ("the", "your", "our", "a", "an").
std::string normalize_phrase(const std::string& phrase);
std::vector<std::string> phrase_tokens(const std::string& phrase);

class Lexicon {
public:
    Lexicon() = default;
    Lexicon(std::string ontology_id, std::vector<SynonymEntry> entries,
            std::vector<KeywordRule> keyword_rules);

    const std::string& ontology_id() const { return ontology_id_; }
    const std::map<std::string, SynonymEntry>& entries() const { return entries_; }
    const std::vector<KeywordRule>& keyword_rules() const { return keyword_rules_; }
    std::size_t size() const { return entries_.size(); }

    // Exact/normalized lookup, with a trailing-plural fallback that applies
    // only when the singular form is a known phrase.
    std::optional<std::string> lookup(const std::string& phrase) const;

    std::string version;

private:
    std::string ontology_id_;
    std::map<std::string, SynonymEntry> entries_;  // keyed by normalized phrase
    std::vector<KeywordRule> keyword_rules_;
};

// Lexicon file schema:
//   {"version": str, "ontology": str (informational path or id),
//    "entries": [{"phrase": str, "term": str, "source": str}...],
//    "keyword_rules": [{"pattern": str, "term": str}...]}
// Every term must resolve in `ont`; throws UnknownTermError otherwise.
Lexicon load_lexicon(const std::string& json_text, const Ontology& ont);
Lexicon load_lexicon_file(const std::string& path, const Ontology& ont);

enum class MatchMethod { exact, similarity, keyword, first_party, none };

std::string to_string(MatchMethod m);

struct TermMatch {
    std::optional<std::string> term;  // empty = unterminologized
    std::string normalized_phrase;
    MatchMethod method = MatchMethod::none;
    double score = 0.0;  // similarity when method == similarity

    bool resolved() const { return term.has_value(); }
};

// Data-phrase route: lexicon hit, else provider similarity against known
// phrases at `threshold` (0.8 default), else unterminologized.
TermMatch terminologize_data_phrase(const Lexicon& lex,
                                    const EmbeddingProvider* provider,
                                    const std::string& phrase,
                                    double threshold = 0.8);

// Entity-phrase route: first-party identity match wins, then keyword rules,
// then lexicon lookup. Never consults the embedding provider.
TermMatch terminologize_entity_phrase(const Lexicon& lex,
                                      const std::string& phrase,
                                      const AppIdentity& app_ctx);

// True when the phrase names the app itself (app name, publisher, domain
// label, modulo company suffixes like "inc"/"llc").
bool matches_first_party(const std::string& phrase, const AppIdentity& app_ctx);

struct ClusterProposal {
    std::set<std::string> members;                 // normalized phrases
    std::optional<std::string> suggested_term;     // filled by the reviewer
    double min_similarity = 1.0;                   // over member pairs
    double mean_similarity = 1.0;
};

// Greedy complete-linkage grouping of unterminologized phrases: seed with
// the most-connected unassigned phrase, absorb phrases similar to every
// current member. Emits every phrase in exactly one proposal (singletons
// included); proposals are review input, the ontology is never auto-edited.
std::vector<ClusterProposal> cluster_unterminologized(
    const EmbeddingProvider& provider, const std::set<std::string>& phrases,
    double threshold);

struct MergeConflict {
    std::string phrase;
    std::string existing_term;
    std::string proposed_term;
};

struct MergeResult {
    Lexicon lexicon;
    std::vector<MergeConflict> conflicts;
};

// Adds accepted proposals' members as clustered entries. First writer wins:
// a phrase already mapped to a different term is left untouched and
// reported as a conflict. Throws UnknownTermError for unresolvable terms.
MergeResult merge_lexicon(const Lexicon& base,
                          const std::vector<ClusterProposal>& accepted,
                          const Ontology& ont);

std::string lexicon_to_json(const Lexicon& lex);
std::string proposals_to_json(const std::vector<ClusterProposal>& proposals);
std::vector<ClusterProposal> proposals_from_json(const std::string& json_text);

}  // namespace ppvet
