#include "ppvet/cusextract.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ppvet {

std::string to_string(ActionKind a) {
    return a == ActionKind::share ? "share" : "collect";
}

ActionKind action_from_string(const std::string& s) {
    if (s == "share") return ActionKind::share;
    if (s == "collect") return ActionKind::collect;
    throw ParseError("unknown action kind '" + s + "'");
}

// --- verbs ----------------------------------------------------------------

namespace {

// Lemmas whose final consonant doubles before -ed/-ing.
const std::set<std::string> kDoubling = {"swap", "log", "get", "transmit"};

const std::map<std::string, std::vector<std::string>> kIrregular = {
    {"give", {"gave", "given"}}, {"sell", {"sold"}},   {"send", {"sent"}},
    {"tell", {"told"}},          {"hold", {"held"}},   {"know", {"knew", "known"}},
    {"get", {"got", "gotten"}},  {"keep", {"kept"}},   {"read", {"read"}},
    {"show", {"shown"}}};

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

}  // namespace

std::set<std::string> verb_inflections(const std::string& lemma) {
    std::set<std::string> forms{lemma};
    const std::size_t n = lemma.size();
    const char last = lemma[n - 1];

    // Third person singular.
    if (last == 's' || last == 'x' || last == 'z' ||
        (n >= 2 && (lemma.substr(n - 2) == "ch" || lemma.substr(n - 2) == "sh"))) {
        forms.insert(lemma + "es");
    } else if (last == 'y' && n >= 2 && !is_vowel(lemma[n - 2])) {
        forms.insert(lemma.substr(0, n - 1) + "ies");
    } else {
        forms.insert(lemma + "s");
    }

    // Gerund.
    if (kDoubling.count(lemma)) {
        forms.insert(lemma + std::string(1, last) + "ing");
    } else if (last == 'e' && n >= 2 && lemma[n - 2] != 'e') {
        forms.insert(lemma.substr(0, n - 1) + "ing");
    } else {
        forms.insert(lemma + "ing");
    }

    // Past and participle.
    auto irr = kIrregular.find(lemma);
    if (irr != kIrregular.end()) {
        for (const auto& f : irr->second) forms.insert(f);
    } else if (kDoubling.count(lemma)) {
        forms.insert(lemma + std::string(1, last) + "ed");
    } else if (last == 'e') {
        forms.insert(lemma + "d");
    } else if (last == 'y' && n >= 2 && !is_vowel(lemma[n - 2])) {
        forms.insert(lemma.substr(0, n - 1) + "ied");
    } else {
        forms.insert(lemma + "ed");
    }
    return forms;
}

namespace {

void index_forms(SocVerbList& list, const std::set<std::string>& lemmas, ActionKind kind) {
    for (const auto& lemma : lemmas)
        for (const auto& form : verb_inflections(lemma)) {
            // A form already claimed by an earlier lemma keeps its first
            // owner; lemma sets are disjoint as shipped.
            list.forms.emplace(form, std::make_pair(lemma, kind));
        }
}

}  // namespace

SocVerbList load_soc_verbs(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("verb file: ") + e.what());
    }
    SocVerbList list;
    list.version = doc.value("version", "");
    for (const auto& v : doc.at("sharing")) list.sharing.insert(v.get<std::string>());
    for (const auto& v : doc.at("collection")) list.collection.insert(v.get<std::string>());
    index_forms(list, list.sharing, ActionKind::share);
    index_forms(list, list.collection, ActionKind::collect);
    return list;
}

SocVerbList load_soc_verbs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open verb file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_soc_verbs(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// --- tokens ----------------------------------------------------------------

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    std::string cur;
    std::size_t start = 0;
    bool clause_pending = true;  // sentence start
    auto flush = [&](std::size_t end) {
        if (cur.empty()) return;
        Token t;
        t.text = cur;
        t.begin = start;
        t.end = end;
        t.clause_start = clause_pending;
        tokens.push_back(std::move(t));
        cur.clear();
        clause_pending = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        const bool word = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        if (word) {
            if (cur.empty()) start = i;
            cur += c;
        } else {
            flush(i);
            if (c == ',' || c == ';' || c == ':' || c == '.' || c == '!' || c == '?' ||
                c == '(' || c == ')')
                clause_pending = true;
        }
    }
    flush(text.size());
    return tokens;
}

// --- gazetteer matching ------------------------------------------------------

namespace {

bool token_matches(const std::string& sentence_token, const std::string& phrase_token,
                   bool last) {
    if (sentence_token == phrase_token) return true;
    if (!last) return false;
    // Plural tolerance on the final token only.
    if (sentence_token == phrase_token + "s" || sentence_token == phrase_token + "es")
        return true;
    if (phrase_token.size() > 1 && phrase_token.back() == 'y' &&
        sentence_token == phrase_token.substr(0, phrase_token.size() - 1) + "ies")
        return true;
    return false;
}

struct GazetteerEntry {
    std::vector<std::string> tokens;
    PhraseRole role;
    MatchOrigin origin;
};

const std::vector<std::string>& builtin_entity_pronouns() {
    static const std::vector<std::string> pronouns = {
        "we", "us", "our partners", "third party", "third parties"};
    return pronouns;
}

}  // namespace

std::vector<PhraseMatch> match_phrases(const Sentence& sentence, const Lexicon& data_lex,
                                       const Lexicon& entity_lex,
                                       const AppIdentity* app_ctx) {
    // Assemble the gazetteer. Sorted map keys make the assembly order (and
    // therefore tie-breaking) independent of lexicon storage order.
    std::vector<GazetteerEntry> entries;
    for (const auto& [phrase, entry] : data_lex.entries()) {
        (void)entry;
        entries.push_back({phrase_tokens(phrase), PhraseRole::data,
                           MatchOrigin::data_lexicon});
    }
    for (const auto& [phrase, entry] : entity_lex.entries()) {
        (void)entry;
        entries.push_back({phrase_tokens(phrase), PhraseRole::entity,
                           MatchOrigin::entity_lexicon});
    }
    for (const auto& p : builtin_entity_pronouns())
        entries.push_back({phrase_tokens(p), PhraseRole::entity, MatchOrigin::pronoun});
    for (const auto& rule : entity_lex.keyword_rules())
        entries.push_back({phrase_tokens(rule.pattern), PhraseRole::entity,
                           MatchOrigin::keyword});
    if (app_ctx) {
        for (const std::string& name : {app_ctx->name, app_ctx->publisher}) {
            auto toks = phrase_tokens(name);
            if (!toks.empty())
                entries.push_back({toks, PhraseRole::entity, MatchOrigin::app_identity});
        }
        for (const auto& d : app_ctx->domains) {
            auto toks = phrase_tokens(d);
            if (!toks.empty())
                entries.push_back({toks, PhraseRole::entity, MatchOrigin::app_identity});
        }
    }

    const std::vector<Token> tokens = tokenize(sentence.text);
    std::vector<PhraseMatch> matches;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const GazetteerEntry* best = nullptr;
        std::size_t best_len = 0;
        for (const auto& entry : entries) {
            const std::size_t len = entry.tokens.size();
            if (len == 0 || len < best_len || i + len > tokens.size()) continue;
            bool ok = true;
            for (std::size_t k = 0; k < len; ++k) {
                if (!token_matches(tokens[i + k].text, entry.tokens[k], k + 1 == len)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            // Longest wins; at equal length data beats entity, and the
            // assembly order settles the rest.
            if (len > best_len ||
                (len == best_len && best && best->role == PhraseRole::entity &&
                 entry.role == PhraseRole::data)) {
                best = &entry;
                best_len = len;
            }
        }
        if (!best) {
            ++i;
            continue;
        }
        PhraseMatch m;
        m.token_begin = i;
        m.token_end = i + best_len;
        m.begin = tokens[i].begin;
        m.end = tokens[i + best_len - 1].end;
        m.surface = sentence.text.substr(m.begin, m.end - m.begin);
        m.role = best->role;
        m.origin = best->origin;
        matches.push_back(std::move(m));
        i += best_len;
    }
    return matches;
}

// --- tuples ----------------------------------------------------------------

bool operator==(const CusTuple& a, const CusTuple& b) {
    return a.entity_term == b.entity_term && a.data_term == b.data_term &&
           a.action == b.action && a.negated == b.negated &&
           a.entity_surface == b.entity_surface && a.data_surface == b.data_surface &&
           a.verb_lemma == b.verb_lemma && a.app_id == b.app_id &&
           a.sentence_index == b.sentence_index && a.data_begin == b.data_begin &&
           a.data_end == b.data_end && a.entity_unresolved == b.entity_unresolved &&
           a.data_unterminologized == b.data_unterminologized;
}

std::string tuple_to_json(const CusTuple& t) {
    nlohmann::ordered_json j;
    j["entity"] = t.entity_term;
    j["data"] = t.data_term;
    j["action"] = to_string(t.action);
    j["negated"] = t.negated;
    j["entity_surface"] = t.entity_surface;
    j["data_surface"] = t.data_surface;
    j["verb"] = t.verb_lemma;
    j["app_id"] = t.app_id;
    j["sentence_index"] = t.sentence_index;
    j["data_span"] = {t.data_begin, t.data_end};
    j["entity_unresolved"] = t.entity_unresolved;
    j["data_unterminologized"] = t.data_unterminologized;
    return j.dump();
}

CusTuple tuple_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("tuple: ") + e.what());
    }
    CusTuple t;
    t.entity_term = j.at("entity").get<std::string>();
    t.data_term = j.at("data").get<std::string>();
    t.action = action_from_string(j.at("action").get<std::string>());
    t.negated = j.at("negated").get<bool>();
    t.entity_surface = j.value("entity_surface", "");
    t.data_surface = j.value("data_surface", "");
    t.verb_lemma = j.value("verb", "");
    t.app_id = j.value("app_id", "");
    t.sentence_index = j.value("sentence_index", std::size_t{0});
    if (j.contains("data_span")) {
        t.data_begin = j["data_span"][0].get<std::size_t>();
        t.data_end = j["data_span"][1].get<std::size_t>();
    }
    t.entity_unresolved = j.value("entity_unresolved", false);
    t.data_unterminologized = j.value("data_unterminologized", false);
    return t;
}

namespace {

struct VerbHit {
    std::size_t token_index;
    std::string lemma;
    ActionKind action;
};

std::vector<VerbHit> find_verbs(const std::vector<Token>& tokens,
                                const std::vector<PhraseMatch>& matches,
                                const SocVerbList& verbs) {
    std::vector<bool> covered(tokens.size(), false);
    for (const auto& m : matches)
        for (std::size_t k = m.token_begin; k < m.token_end && k < tokens.size(); ++k)
            covered[k] = true;
    std::vector<VerbHit> hits;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (covered[i]) continue;
        auto it = verbs.forms.find(tokens[i].text);
        if (it != verbs.forms.end())
            hits.push_back({i, it->second.first, it->second.second});
    }
    return hits;
}

const std::set<std::string> kNegationCues = {"not", "never", "nor", "cannot"};
const std::set<std::string> kNegationAux = {"don", "doesn", "didn", "won", "wouldn",
                                            "shouldn", "isn", "aren", "wasn", "weren",
                                            "can", "couldn", "mustn", "needn", "hasn",
                                            "haven"};

bool clause_negated_before(const std::vector<Token>& tokens, std::size_t verb_index) {
    for (std::size_t k = verb_index; k-- > 0;) {
        const std::string& w = tokens[k].text;
        if (kNegationCues.count(w)) return true;
        if (w == "longer" && k > 0 && tokens[k - 1].text == "no") return true;
        if (w == "t" && k > 0 && kNegationAux.count(tokens[k - 1].text)) return true;
        if (tokens[k].clause_start) break;  // reached the start of this clause
    }
    return false;
}

}  // namespace

std::vector<CusTuple> PositionalExtractor::extract(const Sentence& sentence,
                                                   const std::vector<PhraseMatch>& matches,
                                                   const SocVerbList& verbs) const {
    const std::vector<Token> tokens = tokenize(sentence.text);
    const std::vector<VerbHit> verb_hits = find_verbs(tokens, matches, verbs);
    std::vector<CusTuple> tuples;
    for (const auto& m : matches) {
        if (m.role != PhraseRole::data) continue;
        // Nearest preceding verb.
        const VerbHit* verb = nullptr;
        for (const auto& v : verb_hits)
            if (v.token_index < m.token_begin) verb = &v;
        if (!verb) continue;
        // The verb's agent: nearest entity match ending before the verb.
        const PhraseMatch* agent = nullptr;
        for (const auto& e : matches) {
            if (e.role != PhraseRole::entity) continue;
            if (e.token_end <= verb->token_index) agent = &e;
        }
        CusTuple t;
        t.entity_surface = agent ? agent->surface : "";
        t.data_surface = m.surface;
        t.action = verb->action;
        t.verb_lemma = verb->lemma;
        t.negated = clause_negated_before(tokens, verb->token_index);
        t.sentence_index = sentence.index;
        t.data_begin = m.begin;
        t.data_end = m.end;
        tuples.push_back(std::move(t));
    }
    return tuples;
}

std::vector<CusTuple> extract_tuples(const Sentence& sentence,
                                     const std::vector<PhraseMatch>& matches,
                                     const SocVerbList& verbs) {
    return PositionalExtractor{}.extract(sentence, matches, verbs);
}

std::vector<std::size_t> identify_cus_sentences(const PolicyDocument& doc,
                                                const SocVerbList& verbs,
                                                const Lexicon& data_lex,
                                                const Lexicon& entity_lex) {
    std::vector<std::size_t> out;
    for (const auto& s : doc.sentences) {
        const auto matches = match_phrases(s, data_lex, entity_lex);
        bool has_data = false;
        for (const auto& m : matches)
            if (m.role == PhraseRole::data) has_data = true;
        if (!has_data) continue;
        const auto tokens = tokenize(s.text);
        if (!find_verbs(tokens, matches, verbs).empty()) out.push_back(s.index);
    }
    return out;
}

std::vector<CusTuple> resolve_first_party(std::vector<CusTuple> tuples,
                                          const AppIdentity& app_ctx,
                                          const Lexicon& entity_lex) {
    for (auto& t : tuples) {
        t.app_id = app_ctx.app_id;
        if (t.entity_surface.empty()) {
            t.entity_term = "we";  // implicit subject
            continue;
        }
        TermMatch m = terminologize_entity_phrase(entity_lex, t.entity_surface, app_ctx);
        if (m.resolved()) {
            t.entity_term = *m.term;
        } else {
            t.entity_term = "third party";
            t.entity_unresolved = true;
        }
    }
    return tuples;
}

std::vector<CusTuple> resolve_data_terms(std::vector<CusTuple> tuples,
                                         const Lexicon& data_lex,
                                         const EmbeddingProvider* provider,
                                         double threshold) {
    for (auto& t : tuples) {
        TermMatch m = terminologize_data_phrase(data_lex, provider, t.data_surface,
                                                threshold);
        if (m.resolved()) {
            t.data_term = *m.term;
        } else {
            t.data_unterminologized = true;
        }
    }
    return tuples;
}

// --- synthetic corpus --------------------------------------------------------

TemplateFile load_templates(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("template file: ") + e.what());
    }
    TemplateFile out;
    out.version = doc.value("version", "");
    std::size_t line = 0;
    for (const auto& t : doc.at("cus_templates")) {
        ++line;
        SyntheticTemplate tmpl;
        tmpl.text = t.at("text").get<std::string>();
        tmpl.entity_term = t.value("entity", "we");
        tmpl.action = action_from_string(t.value("action", "collect"));
        tmpl.negated = t.value("negated", false);
        tmpl.is_cus = true;
        if (tmpl.text.find(kDataSlot) == std::string::npos)
            throw ParseError("cus_templates[" + std::to_string(line - 1) +
                             "]: CUS template without a " + std::string(kDataSlot) +
                             " slot");
        out.cus_templates.push_back(std::move(tmpl));
    }
    line = 0;
    for (const auto& s : doc.at("non_cus_sentences")) {
        ++line;
        std::string text = s.get<std::string>();
        if (text.find(kDataSlot) != std::string::npos)
            throw ParseError("non_cus_sentences[" + std::to_string(line - 1) +
                             "]: non-CUS sentence must not contain a slot");
        out.non_cus_sentences.push_back(std::move(text));
    }
    return out;
}

TemplateFile load_templates_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open template file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_templates(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> load_phrase_list(
    const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("phrase list: ") + e.what());
    }
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : doc.at("phrases"))
        out.emplace_back(p.at("phrase").get<std::string>(),
                         p.at("term").get<std::string>());
    return out;
}

std::vector<std::pair<std::string, std::string>> load_phrase_list_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open phrase list: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_phrase_list(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<GoldSentence> generate_synthetic_corpus(
    const TemplateFile& templates,
    const std::vector<std::pair<std::string, std::string>>& phrases) {
    std::vector<GoldSentence> corpus;
    for (std::size_t ti = 0; ti < templates.cus_templates.size(); ++ti) {
        const auto& tmpl = templates.cus_templates[ti];
        for (const auto& [phrase, term] : phrases) {
            GoldSentence g;
            g.is_cus = true;
            g.template_index = ti;
            g.phrase = phrase;
            std::string text = tmpl.text;
            std::size_t pos = 0;
            while ((pos = text.find(kDataSlot, pos)) != std::string::npos) {
                text.replace(pos, std::string(kDataSlot).size(), phrase);
                g.spans.emplace_back(pos, pos + phrase.size());
                g.tuples.push_back({tmpl.entity_term, term, tmpl.action, tmpl.negated});
                pos += phrase.size();
            }
            g.text = std::move(text);
            corpus.push_back(std::move(g));
        }
    }
    for (const auto& s : templates.non_cus_sentences) {
        GoldSentence g;
        g.is_cus = false;
        g.text = s;
        corpus.push_back(std::move(g));
    }
    return corpus;
}

std::string gold_corpus_to_jsonl(const std::vector<GoldSentence>& corpus) {
    std::string out;
    for (const auto& g : corpus) {
        nlohmann::ordered_json j;
        j["text"] = g.text;
        j["is_cus"] = g.is_cus;
        auto spans = nlohmann::ordered_json::array();
        for (const auto& [b, e] : g.spans) spans.push_back({b, e});
        j["spans"] = std::move(spans);
        auto tuples = nlohmann::ordered_json::array();
        for (const auto& t : g.tuples)
            tuples.push_back({{"entity", t.entity_term},
                              {"data", t.data_term},
                              {"action", to_string(t.action)},
                              {"negated", t.negated}});
        j["tuples"] = std::move(tuples);
        if (g.is_cus) {
            j["template_index"] = g.template_index;
            j["phrase"] = g.phrase;
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

PipelineEvalResult evaluate_pipeline(const std::vector<GoldSentence>& corpus,
                                     const Lexicon& data_lex, const Lexicon& entity_lex,
                                     const SocVerbList& verbs,
                                     const EmbeddingProvider* provider,
                                     double threshold) {
    PipelineEvalResult result;
    const AppIdentity app_ctx{};  // synthetic corpus has no app identity
    for (const auto& g : corpus) {
        Sentence s{0, g.text};
        const auto matches = match_phrases(s, data_lex, entity_lex);
        auto tuples = extract_tuples(s, matches, verbs);
        tuples = resolve_first_party(std::move(tuples), app_ctx, entity_lex);
        tuples = resolve_data_terms(std::move(tuples), data_lex, provider, threshold);
        std::vector<GoldTuple> found;
        for (const auto& t : tuples) {
            if (t.data_unterminologized) continue;
            found.push_back({t.entity_term, t.data_term, t.action, t.negated});
        }
        if (!g.is_cus) {
            ++result.non_cus_sentences;
            if (!found.empty()) ++result.false_positives;
            continue;
        }
        for (const auto& gold : g.tuples) {
            ++result.gold_tuples;
            const bool hit =
                std::any_of(found.begin(), found.end(), [&](const GoldTuple& f) {
                    return f.entity_term == gold.entity_term &&
                           f.data_term == gold.data_term && f.action == gold.action &&
                           f.negated == gold.negated;
                });
            if (hit) ++result.recovered;
        }
    }
    return result;
}

}  // namespace ppvet
