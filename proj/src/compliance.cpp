#include "ppvet/compliance.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ppvet {

std::string to_string(ThirdPartySpecificity s) {
    switch (s) {
        case ThirdPartySpecificity::unspecified: return "unspecified";
        case ThirdPartySpecificity::category: return "category";
        case ThirdPartySpecificity::company: return "company";
    }
    return "unspecified";
}

std::string to_string(CounterpartSource s) {
    switch (s) {
        case CounterpartSource::platform_rec: return "platform_rec";
        case CounterpartSource::cross_platform_rec: return "cross_platform_rec";
        case CounterpartSource::genre: return "genre";
        case CounterpartSource::description: return "description";
    }
    return "description";
}

namespace {

// How specifically a third-party tuple names its entity: the generic
// "third party" term says nothing, a subsumed non-leaf (or direct child)
// names a category, and a deeper leaf names a concrete company.
ThirdPartySpecificity entity_specificity(const Ontology& entity_ont,
                                         const std::string& term) {
    if (term == "third party") return ThirdPartySpecificity::unspecified;
    if (!entity_ont.contains("third party") || !entity_ont.has_path("third party", term))
        return ThirdPartySpecificity::category;
    if (!entity_ont.is_leaf(term)) return ThirdPartySpecificity::category;
    for (const auto& parent : entity_ont.parents_of(term))
        if (parent == "third party") return ThirdPartySpecificity::category;
    return ThirdPartySpecificity::company;
}

}  // namespace

GranularityReport granularity_analysis(const std::vector<CusTuple>& tuples,
                                       const Ontology& data_ont,
                                       const Ontology& entity_ont, int coarse_ctg) {
    GranularityReport report;
    std::set<std::string> claimed;
    for (const auto& t : tuples) {
        if (t.data_unterminologized) {
            ++report.unterminologized_count;
            continue;
        }
        TupleGranularity tg;
        tg.tuple = t;
        std::tie(tg.entity_ctg, tg.data_ctg) =
            tuple_granularity(data_ont, entity_ont, t.entity_term, t.data_term);
        tg.coarse = is_coarse({tg.entity_ctg, tg.data_ctg}, coarse_ctg);
        const std::size_t idx = report.tuples.size();
        if (tg.coarse) report.coarse_indices.push_back(idx);
        if (t.entity_term == "we")
            report.first_party_indices.push_back(idx);
        else
            report.third_party_indices.push_back(idx);
        if (t.negated)
            ++report.negated_count;
        else
            claimed.insert(t.data_term);
        report.tuples.push_back(std::move(tg));
    }
    report.bounds = data_ont.ppg(data_ont.make_term_set(claimed));
    report.ppg = report.bounds.ppg;
    for (auto s : {ThirdPartySpecificity::unspecified, ThirdPartySpecificity::category,
                   ThirdPartySpecificity::company})
        report.third_party_specificity[s] = 0;
    for (std::size_t idx : report.third_party_indices) {
        const auto& term = report.tuples[idx].tuple.entity_term;
        ++report.third_party_specificity[entity_specificity(entity_ont, term)];
    }
    return report;
}

std::vector<OverbroadFinding> minimization_analysis(
    const TermSet& target_lower, const std::vector<TermSet>& counterparts_lower,
    const Ontology& ont, double majority, bool exact_membership) {
    if (majority <= 0.0 || majority > 1.0)
        throw ConfigError("majority threshold must be in (0, 1]");
    ont.make_term_set(target_lower.terms);  // membership check
    for (const auto& c : counterparts_lower) ont.make_term_set(c.terms);

    std::vector<OverbroadFinding> findings;
    if (counterparts_lower.empty()) return findings;
    const std::size_t total = counterparts_lower.size();
    for (const auto& term : target_lower.terms) {
        std::size_t covered = 0;
        for (const auto& counterpart : counterparts_lower) {
            bool hit = counterpart.contains(term);
            if (!hit && !exact_membership) {
                // A counterpart claiming a finer term covers the broader one.
                for (const auto& ct : counterpart.terms) {
                    if (ont.has_path(term, ct)) {
                        hit = true;
                        break;
                    }
                }
            }
            if (hit) ++covered;
        }
        const double fraction = static_cast<double>(covered) / static_cast<double>(total);
        if (fraction < majority)
            findings.push_back({term, covered, total, majority});
    }
    return findings;
}

// --- evidence map ----------------------------------------------------------

std::string to_string(EvidenceKind k) {
    switch (k) {
        case EvidenceKind::permission: return "permission";
        case EvidenceKind::api: return "api";
        case EvidenceKind::uri: return "uri";
    }
    return "permission";
}

EvidenceKind evidence_kind_from_string(const std::string& s) {
    if (s == "permission") return EvidenceKind::permission;
    if (s == "api") return EvidenceKind::api;
    if (s == "uri") return EvidenceKind::uri;
    throw ParseError("unknown evidence kind '" + s + "'");
}

namespace {

std::string lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

}  // namespace

EvidenceMap::EvidenceMap(std::string version, std::vector<EvidenceEntry> entries,
                         const Ontology& data_ont)
    : version_(std::move(version)), entries_(std::move(entries)) {
    std::set<std::string> ids;
    std::set<std::string> patterns;
    for (const auto& e : entries_) {
        if (!data_ont.contains(e.data_term))
            throw UnknownTermError(e.data_term, data_ont.id());
        if (!ids.insert(e.id).second)
            throw ParseError("duplicate evidence id '" + e.id + "'");
        if (!patterns.insert(e.pattern).second)
            throw ParseError("duplicate evidence pattern '" + e.pattern + "'");
    }
}

std::vector<const EvidenceEntry*> EvidenceMap::resolve(const std::string& evidence) const {
    std::vector<const EvidenceEntry*> out;
    for (const auto& e : entries_)
        if (e.id == evidence) out.push_back(&e);
    if (!out.empty()) return out;
    const std::string hay = lower(evidence);
    for (const auto& e : entries_)
        if (!e.pattern.empty() && hay.find(lower(e.pattern)) != std::string::npos)
            out.push_back(&e);
    return out;
}

EvidenceMap load_evidence_map(const std::string& json_text, const Ontology& data_ont) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("evidence map: ") + e.what());
    }
    std::vector<EvidenceEntry> entries;
    for (const auto& e : doc.at("entries")) {
        EvidenceEntry entry;
        entry.id = e.at("id").get<std::string>();
        entry.kind = evidence_kind_from_string(e.at("kind").get<std::string>());
        entry.pattern = e.at("pattern").get<std::string>();
        entry.data_term = e.at("data_term").get<std::string>();
        entries.push_back(std::move(entry));
    }
    return EvidenceMap(doc.value("version", ""), std::move(entries), data_ont);
}

EvidenceMap load_evidence_map_file(const std::string& path, const Ontology& data_ont) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open evidence map: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_evidence_map(buf.str(), data_ont);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string to_string(ConsistencyVerdict v) {
    switch (v) {
        case ConsistencyVerdict::disclosed: return "disclosed";
        case ConsistencyVerdict::vague: return "vague";
        case ConsistencyVerdict::inconsistent: return "inconsistent";
    }
    return "disclosed";
}

ConsistencyResult consistency_analysis(const std::vector<std::string>& evidence,
                                       const EvidenceMap& emap, const BoundsResult& bounds,
                                       bool policy_present) {
    ConsistencyResult result;
    result.no_policy = !policy_present;

    std::vector<std::string> unresolved;
    std::map<std::string, std::set<std::string>> term_evidence;
    for (const auto& ev : evidence) {
        const auto entries = emap.resolve(ev);
        if (entries.empty()) {
            unresolved.push_back(ev);
            continue;
        }
        for (const auto* e : entries) term_evidence[e->data_term].insert(e->id);
    }
    if (!unresolved.empty()) throw UnresolvedEvidenceError(unresolved);

    for (const auto& [term, ids] : term_evidence) {
        ConsistencyFinding f;
        f.data_term = term;
        f.evidence_ids.assign(ids.begin(), ids.end());
        if (!policy_present) {
            f.verdict = ConsistencyVerdict::inconsistent;
        } else if (bounds.claimed.contains(term)) {
            f.verdict = ConsistencyVerdict::disclosed;
        } else if (bounds.upper.contains(term)) {
            f.verdict = ConsistencyVerdict::vague;
        } else {
            f.verdict = ConsistencyVerdict::inconsistent;
        }
        result.findings.push_back(std::move(f));
    }
    return result;
}

}  // namespace ppvet
