#pragma once

// Collect/use/share tuple extraction. A sentence qualifies when it contains
// a share-or-collect verb and at least one data phrase; gazetteer matching
// finds data and entity phrases; a positional clause heuristic stands in
// for full dependency parsing when binding data phrases to verbs and verbs
// to their agents. Known failure modes of the heuristic: long-range
// attachments, passive voice ("your data may be collected by X" binds to
// the implicit first party), and recipients of sharing verbs (the tuple
// entity is the verb's agent, not the party shared with). The extractor is
// an interface so a parser-backed implementation can slot in.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppvet/lexicon.hpp"
#include "ppvet/textproc.hpp"

namespace ppvet {

enum class ActionKind { share, collect };

std::string to_string(ActionKind a);
ActionKind action_from_string(const std::string& s);

struct SocVerbList {
    std::set<std::string> sharing;     // lemmas
    std::set<std::string> collection;  // lemmas
    std::string version;

    // Inflected form -> (lemma, action). Built once at load.
    std::map<std::string, std::pair<std::string, ActionKind>> forms;

    std::size_t lemma_count() const { return sharing.size() + collection.size(); }
};

// Verb file schema: {"version": str, "sharing": [...], "collection": [...]}
SocVerbList load_soc_verbs(const std::string& json_text);
SocVerbList load_soc_verbs_file(const std::string& path);

// -s / -ed / -ing forms with standard orthographic rules plus enumerated
// irregulars (gave/sold/sent/held/kept/...).
std::set<std::string> verb_inflections(const std::string& lemma);

struct Token {
    std::string text;  // lowercased word characters
    std::size_t begin = 0;
    std::size_t end = 0;
    bool clause_start = false;  // preceded by clause punctuation or sentence start
};

std::vector<Token> tokenize(const std::string& text);

enum class PhraseRole { data, entity };
enum class MatchOrigin { data_lexicon, entity_lexicon, pronoun, keyword, app_identity };

struct PhraseMatch {
    std::size_t token_begin = 0;  // [token_begin, token_end)
    std::size_t token_end = 0;
    std::size_t begin = 0;  // char offsets into the sentence
    std::size_t end = 0;
    std::string surface;
    PhraseRole role = PhraseRole::data;
    MatchOrigin origin = MatchOrigin::data_lexicon;
    std::optional<std::string> term;  // filled during resolution
};

// Longest-match, non-overlapping gazetteer matching. Data phrases come from
// the data lexicon; entity phrases from the entity lexicon, built-in
// pronoun rules, keyword-rule patterns, and the app identity (so that
// "Example Inc." is recognizable in Example's own policy).
std::vector<PhraseMatch> match_phrases(const Sentence& sentence,
                                       const Lexicon& data_lex,
                                       const Lexicon& entity_lex,
                                       const AppIdentity* app_ctx = nullptr);

struct CusTuple {
    std::string entity_term;  // resolves in the entity ontology once resolved
    std::string data_term;    // resolves in the data ontology once resolved
    ActionKind action = ActionKind::collect;
    bool negated = false;

    std::string entity_surface;  // empty for an implicit first party
    std::string data_surface;
    std::string verb_lemma;

    std::string app_id;
    std::size_t sentence_index = 0;
    std::size_t data_begin = 0;  // char span of the data phrase
    std::size_t data_end = 0;

    bool entity_unresolved = false;      // fell back to "third party"
    bool data_unterminologized = false;  // no term; excluded from Claimed
};

bool operator==(const CusTuple& a, const CusTuple& b);

std::string tuple_to_json(const CusTuple& t);
CusTuple tuple_from_json(const std::string& json_text);

// Sentence indices containing an SoC verb (outside any data phrase) and at
// least one data-phrase match.
std::vector<std::size_t> identify_cus_sentences(const PolicyDocument& doc,
                                                const SocVerbList& verbs,
                                                const Lexicon& data_lex,
                                                const Lexicon& entity_lex);

class TupleExtractor {
public:
    virtual ~TupleExtractor() = default;
    // Produces draft tuples carrying surfaces; terms are filled by the
    // resolution step.
    virtual std::vector<CusTuple> extract(const Sentence& sentence,
                                          const std::vector<PhraseMatch>& matches,
                                          const SocVerbList& verbs) const = 0;
};

// Each data match binds to the nearest preceding SoC verb; the verb's agent
// is the nearest preceding entity match, defaulting to the first party when
// the subject is implicit. A negation cue inside the verb's clause flips
// `negated`. One verb with N coordinated data matches yields N tuples.
class PositionalExtractor : public TupleExtractor {
public:
    std::vector<CusTuple> extract(const Sentence& sentence,
                                  const std::vector<PhraseMatch>& matches,
                                  const SocVerbList& verbs) const override;
};

std::vector<CusTuple> extract_tuples(const Sentence& sentence,
                                     const std::vector<PhraseMatch>& matches,
                                     const SocVerbList& verbs);

// Entity resolution: app-identity phrases rewrite to "we"; keyword rules
// and the entity lexicon resolve the rest; anything else becomes
// "third party" with the unresolved flag set.
std::vector<CusTuple> resolve_first_party(std::vector<CusTuple> tuples,
                                          const AppIdentity& app_ctx,
                                          const Lexicon& entity_lex);

// Data-term resolution via terminologize_data_phrase. Tuples that fail stay
// in the list with data_unterminologized set; downstream Claimed sets skip
// them and the phrases feed the clustering review loop.
std::vector<CusTuple> resolve_data_terms(std::vector<CusTuple> tuples,
                                         const Lexicon& data_lex,
                                         const EmbeddingProvider* provider,
                                         double threshold = 0.8);

// --- synthetic corpus -----------------------------------------------------

constexpr const char* kDataSlot = "<data>";

struct SyntheticTemplate {
    std::string text;  // holds kDataSlot markers iff this is a CUS template
    std::string entity_term = "we";
    ActionKind action = ActionKind::collect;
    bool negated = false;
    bool is_cus = false;
};

struct GoldTuple {
    std::string entity_term;
    std::string data_term;
    ActionKind action = ActionKind::collect;
    bool negated = false;
};

struct GoldSentence {
    std::string text;
    bool is_cus = false;
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // inserted phrases
    std::vector<GoldTuple> tuples;
    std::size_t template_index = 0;
    std::string phrase;
};

struct TemplateFile {
    std::string version;
    std::vector<SyntheticTemplate> cus_templates;
    std::vector<std::string> non_cus_sentences;
};

// Throws ParseError for a CUS template without a slot or a non-CUS sentence
// with one; errors name the offending line.
TemplateFile load_templates(const std::string& json_text);
TemplateFile load_templates_file(const std::string& path);

// Phrase list schema: {"version": str, "phrases": [{"phrase": str, "term": str}...]}
std::vector<std::pair<std::string, std::string>> load_phrase_list(
    const std::string& json_text);
std::vector<std::pair<std::string, std::string>> load_phrase_list_file(
    const std::string& path);

// Every (CUS template x phrase) instantiation plus the non-CUS sentences,
// in file order; fully deterministic.
std::vector<GoldSentence> generate_synthetic_corpus(
    const TemplateFile& templates,
    const std::vector<std::pair<std::string, std::string>>& phrases);

std::string gold_corpus_to_jsonl(const std::vector<GoldSentence>& corpus);

struct PipelineEvalResult {
    std::size_t gold_tuples = 0;
    std::size_t recovered = 0;
    std::size_t non_cus_sentences = 0;
    std::size_t false_positives = 0;

    double recall() const {
        return gold_tuples ? static_cast<double>(recovered) / gold_tuples : 1.0;
    }
    double false_positive_rate() const {
        return non_cus_sentences
                   ? static_cast<double>(false_positives) / non_cus_sentences
                   : 0.0;
    }
};

// Runs identify -> match -> extract -> resolve over the corpus and scores
// gold-tuple recall and the non-CUS false-positive rate.
PipelineEvalResult evaluate_pipeline(const std::vector<GoldSentence>& corpus,
                                     const Lexicon& data_lex,
                                     const Lexicon& entity_lex,
                                     const SocVerbList& verbs,
                                     const EmbeddingProvider* provider,
                                     double threshold = 0.8);

}  // namespace ppvet
