#include "ppvet/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ppvet {

namespace {

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

const std::set<std::string> kLeadingArticles = {"the", "your", "our", "a", "an"};

const std::set<std::string> kCompanySuffixes = {
    "inc", "llc", "ltd", "co", "corp", "corporation", "company",
    "gmbh", "studio", "studios", "games", "team", "labs"};

}  // namespace

std::string to_string(EntrySource s) {
    switch (s) {
        case EntrySource::seed: return "seed";
        case EntrySource::clustered: return "clustered";
        case EntrySource::keyword: return "keyword";
    }
    return "seed";
}

EntrySource entry_source_from_string(const std::string& s) {
    if (s == "seed") return EntrySource::seed;
    if (s == "clustered") return EntrySource::clustered;
    if (s == "keyword") return EntrySource::keyword;
    throw ParseError("unknown lexicon entry source '" + s + "'");
}

std::string to_string(MatchMethod m) {
    switch (m) {
        case MatchMethod::exact: return "exact";
        case MatchMethod::similarity: return "similarity";
        case MatchMethod::keyword: return "keyword";
        case MatchMethod::first_party: return "first_party";
        case MatchMethod::none: return "none";
    }
    return "none";
}

std::vector<std::string> phrase_tokens(const std::string& phrase) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char raw : phrase) {
        char c = raw;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (is_word_char(c)) {
            cur += c;
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

std::string normalize_phrase(const std::string& phrase) {
    auto tokens = phrase_tokens(phrase);
    std::size_t start = 0;
    while (start < tokens.size() && tokens.size() - start > 1 &&
           kLeadingArticles.count(tokens[start]))
        ++start;
    std::string out;
    for (std::size_t i = start; i < tokens.size(); ++i) {
        if (!out.empty()) out += ' ';
        out += tokens[i];
    }
    return out;
}

// --- providers ---------------------------------------------------------

std::vector<double> TokenJaccardProvider::embed(const std::string& phrase) const {
    // Hashed bag of tokens; dimensionality chosen to keep collisions rare
    // at gazetteer scale.
    std::vector<double> v(256, 0.0);
    for (const auto& t : phrase_tokens(phrase)) {
        std::size_t h = std::hash<std::string>{}(t);
        v[h % v.size()] += 1.0;
    }
    return v;
}

double TokenJaccardProvider::similarity(const std::string& a, const std::string& b) const {
    auto ta = phrase_tokens(normalize_phrase(a));
    auto tb = phrase_tokens(normalize_phrase(b));
    std::set<std::string> sa(ta.begin(), ta.end());
    std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) return 1.0;
    if (sa.empty() || sb.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> ExactMatchProvider::embed(const std::string& phrase) const {
    std::vector<double> v(1, 0.0);
    v[0] = static_cast<double>(std::hash<std::string>{}(normalize_phrase(phrase)));
    return v;
}

double ExactMatchProvider::similarity(const std::string& a, const std::string& b) const {
    return normalize_phrase(a) == normalize_phrase(b) ? 1.0 : 0.0;
}

// --- lexicon ------------------------------------------------------------

Lexicon::Lexicon(std::string ontology_id, std::vector<SynonymEntry> entries,
                 std::vector<KeywordRule> keyword_rules)
    : ontology_id_(std::move(ontology_id)), keyword_rules_(std::move(keyword_rules)) {
    for (auto& e : entries) {
        e.phrase = normalize_phrase(e.phrase);
        if (e.phrase.empty()) throw ParseError("lexicon entry with empty phrase");
        auto [it, inserted] = entries_.emplace(e.phrase, e);
        if (!inserted && it->second.term != e.term)
            throw ParseError("phrase '" + e.phrase + "' mapped to both '" +
                             it->second.term + "' and '" + e.term + "'");
    }
    for (auto& r : keyword_rules_) r.pattern = normalize_phrase(r.pattern);
}

std::optional<std::string> Lexicon::lookup(const std::string& phrase) const {
    const std::string norm = normalize_phrase(phrase);
    if (norm.empty()) return std::nullopt;
    auto it = entries_.find(norm);
    if (it != entries_.end()) return it->second.term;
    // Trailing plural, only when the singular exists.
    if (norm.size() > 1 && norm.back() == 's') {
        std::string singular = norm.substr(0, norm.size() - 1);
        if (singular.size() > 2 && singular.substr(singular.size() - 2) == "ie")
            singular = singular.substr(0, singular.size() - 2) + "y";
        it = entries_.find(singular);
        if (it != entries_.end()) return it->second.term;
    }
    return std::nullopt;
}

Lexicon load_lexicon(const std::string& json_text, const Ontology& ont) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("lexicon file: ") + e.what());
    }
    std::vector<SynonymEntry> entries;
    for (const auto& e : doc.value("entries", nlohmann::json::array())) {
        SynonymEntry entry;
        entry.phrase = e.at("phrase").get<std::string>();
        entry.term = e.at("term").get<std::string>();
        entry.source = entry_source_from_string(e.value("source", "seed"));
        if (!ont.contains(entry.term)) throw UnknownTermError(entry.term, ont.id());
        entries.push_back(std::move(entry));
    }
    std::vector<KeywordRule> rules;
    for (const auto& r : doc.value("keyword_rules", nlohmann::json::array())) {
        KeywordRule rule{r.at("pattern").get<std::string>(),
                         r.at("term").get<std::string>()};
        if (!ont.contains(rule.term)) throw UnknownTermError(rule.term, ont.id());
        rules.push_back(std::move(rule));
    }
    Lexicon lex(ont.id(), std::move(entries), std::move(rules));
    lex.version = doc.value("version", "");
    return lex;
}

Lexicon load_lexicon_file(const std::string& path, const Ontology& ont) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open lexicon file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_lexicon(buf.str(), ont);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// --- terminologization --------------------------------------------------

TermMatch terminologize_data_phrase(const Lexicon& lex,
                                    const EmbeddingProvider* provider,
                                    const std::string& phrase, double threshold) {
    TermMatch m;
    m.normalized_phrase = normalize_phrase(phrase);
    if (auto term = lex.lookup(m.normalized_phrase)) {
        m.term = *term;
        m.method = MatchMethod::exact;
        m.score = 1.0;
        return m;
    }
    if (provider != nullptr) {
        double best = -1.0;
        const SynonymEntry* best_entry = nullptr;
        // Entries iterate in phrase order, so the first maximum is the
        // lexicographically smallest among ties.
        for (const auto& [known, entry] : lex.entries()) {
            const double s = provider->similarity(m.normalized_phrase, known);
            if (s > best) {
                best = s;
                best_entry = &entry;
            }
        }
        if (best_entry && best >= threshold) {
            m.term = best_entry->term;
            m.method = MatchMethod::similarity;
            m.score = best;
            return m;
        }
    }
    return m;
}

bool matches_first_party(const std::string& phrase, const AppIdentity& app_ctx) {
    auto tokens = phrase_tokens(phrase);
    while (!tokens.empty() && kCompanySuffixes.count(tokens.back())) tokens.pop_back();
    if (tokens.empty()) return false;
    std::string stripped;
    for (const auto& t : tokens) {
        if (!stripped.empty()) stripped += ' ';
        stripped += t;
    }
    if (!app_ctx.name.empty() && stripped == normalize_phrase(app_ctx.name)) return true;
    if (!app_ctx.publisher.empty() && stripped == normalize_phrase(app_ctx.publisher))
        return true;
    for (const auto& d : app_ctx.domains)
        if (!d.empty() && stripped == normalize_phrase(d)) return true;
    return false;
}

TermMatch terminologize_entity_phrase(const Lexicon& lex, const std::string& phrase,
                                      const AppIdentity& app_ctx) {
    TermMatch m;
    m.normalized_phrase = normalize_phrase(phrase);
    if (matches_first_party(m.normalized_phrase, app_ctx)) {
        m.term = "we";
        m.method = MatchMethod::first_party;
        return m;
    }
    for (const auto& rule : lex.keyword_rules()) {
        if (m.normalized_phrase.find(rule.pattern) != std::string::npos) {
            m.term = rule.term;
            m.method = MatchMethod::keyword;
            return m;
        }
    }
    if (auto term = lex.lookup(m.normalized_phrase)) {
        m.term = *term;
        m.method = MatchMethod::exact;
        m.score = 1.0;
    }
    return m;
}

// --- clustering ---------------------------------------------------------

std::vector<ClusterProposal> cluster_unterminologized(
    const EmbeddingProvider& provider, const std::set<std::string>& phrases,
    double threshold) {
    if (threshold <= 0.0 || threshold > 1.0)
        throw ConfigError("clustering threshold must be in (0, 1]");

    std::vector<std::string> pool;
    for (const auto& p : phrases) {
        const std::string norm = normalize_phrase(p);
        if (!norm.empty()) pool.push_back(norm);
    }
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

    const std::size_t n = pool.size();
    std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            sim[i][j] = sim[j][i] = provider.similarity(pool[i], pool[j]);

    std::vector<bool> assigned(n, false);
    std::vector<ClusterProposal> out;
    for (;;) {
        // Seed: the unassigned phrase with the most above-threshold
        // connections to other unassigned phrases; lexicographic tiebreak
        // comes free from the sorted pool.
        int best_seed = -1;
        std::size_t best_degree = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (assigned[i]) continue;
            std::size_t deg = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && !assigned[j] && sim[i][j] >= threshold) ++deg;
            if (best_seed < 0 || deg > best_degree) {
                best_seed = static_cast<int>(i);
                best_degree = deg;
            }
        }
        if (best_seed < 0) break;

        std::vector<std::size_t> members{static_cast<std::size_t>(best_seed)};
        assigned[best_seed] = true;
        // Complete linkage keeps every member pair above the threshold.
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (assigned[i]) continue;
                bool close_to_all = true;
                for (std::size_t m : members) {
                    if (sim[i][m] < threshold) {
                        close_to_all = false;
                        break;
                    }
                }
                if (close_to_all) {
                    members.push_back(i);
                    assigned[i] = true;
                    grew = true;
                }
            }
        }

        ClusterProposal proposal;
        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < members.size(); ++a) {
            proposal.members.insert(pool[members[a]]);
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const double s = sim[members[a]][members[b]];
                proposal.min_similarity = std::min(proposal.min_similarity, s);
                sum += s;
                ++pairs;
            }
        }
        proposal.mean_similarity = pairs ? sum / static_cast<double>(pairs) : 1.0;
        out.push_back(std::move(proposal));
    }
    return out;
}

MergeResult merge_lexicon(const Lexicon& base,
                          const std::vector<ClusterProposal>& accepted,
                          const Ontology& ont) {
    std::vector<SynonymEntry> entries;
    for (const auto& [phrase, entry] : base.entries()) {
        (void)phrase;
        entries.push_back(entry);
    }
    std::map<std::string, std::string> seen;
    for (const auto& e : entries) seen[e.phrase] = e.term;

    MergeResult result;
    for (const auto& proposal : accepted) {
        if (!proposal.suggested_term)
            throw ParseError("accepted proposal without an assigned term");
        const std::string& term = *proposal.suggested_term;
        if (!ont.contains(term)) throw UnknownTermError(term, ont.id());
        for (const auto& member : proposal.members) {
            const std::string phrase = normalize_phrase(member);
            auto it = seen.find(phrase);
            if (it != seen.end()) {
                if (it->second != term)
                    result.conflicts.push_back({phrase, it->second, term});
                continue;  // first writer wins
            }
            seen[phrase] = term;
            entries.push_back({phrase, term, EntrySource::clustered});
        }
    }
    std::vector<KeywordRule> rules = base.keyword_rules();
    result.lexicon = Lexicon(base.ontology_id(), std::move(entries), std::move(rules));
    result.lexicon.version = base.version;
    return result;
}

// --- serialization ------------------------------------------------------

std::string lexicon_to_json(const Lexicon& lex) {
    nlohmann::ordered_json doc;
    doc["version"] = lex.version;
    doc["ontology"] = lex.ontology_id();
    auto entries = nlohmann::ordered_json::array();
    for (const auto& [phrase, e] : lex.entries()) {
        entries.push_back({{"phrase", phrase},
                           {"term", e.term},
                           {"source", to_string(e.source)}});
    }
    doc["entries"] = std::move(entries);
    auto rules = nlohmann::ordered_json::array();
    for (const auto& r : lex.keyword_rules())
        rules.push_back({{"pattern", r.pattern}, {"term", r.term}});
    doc["keyword_rules"] = std::move(rules);
    return doc.dump(2);
}

std::string proposals_to_json(const std::vector<ClusterProposal>& proposals) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : proposals) {
        nlohmann::ordered_json item;
        item["members"] = p.members;
        if (p.suggested_term)
            item["term"] = *p.suggested_term;
        else
            item["term"] = nullptr;
        item["min_similarity"] = p.min_similarity;
        item["mean_similarity"] = p.mean_similarity;
        arr.push_back(std::move(item));
    }
    return arr.dump(2);
}

std::vector<ClusterProposal> proposals_from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("proposal file: ") + e.what());
    }
    std::vector<ClusterProposal> out;
    for (const auto& item : doc) {
        ClusterProposal p;
        for (const auto& m : item.at("members")) p.members.insert(m.get<std::string>());
        if (item.contains("term") && !item["term"].is_null())
            p.suggested_term = item["term"].get<std::string>();
        p.min_similarity = item.value("min_similarity", 1.0);
        p.mean_similarity = item.value("mean_similarity", 1.0);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace ppvet
