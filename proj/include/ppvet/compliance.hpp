#pragma once

// Compliance analyses over extracted tuples: granularity reporting (per-tuple
// CTG pairs, bounds and their gap), counterpart-based minimization, and
// evidence-based consistency classification against the containment chain.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppvet/cusextract.hpp"
#include "ppvet/ontology.hpp"

namespace ppvet {

struct TupleGranularity {
    CusTuple tuple;
    int entity_ctg = 1;
    int data_ctg = 1;
    bool coarse = false;
};

enum class ThirdPartySpecificity { unspecified, category, company };

struct GranularityReport {
    std::vector<TupleGranularity> tuples;
    std::vector<std::size_t> coarse_indices;  // into `tuples`
    BoundsResult bounds;                      // over non-negated data terms
    std::size_t ppg = 0;
    std::vector<std::size_t> first_party_indices;
    std::vector<std::size_t> third_party_indices;
    std::size_t negated_count = 0;  // excluded from Claimed, surfaced separately
    std::size_t unterminologized_count = 0;
    std::map<ThirdPartySpecificity, std::size_t> third_party_specificity;
};

std::string to_string(ThirdPartySpecificity s);

// Computes CTG pairs, marks coarse tuples (either component >= coarse_ctg),
// derives bounds/PPG from the non-negated terminologized data terms, and
// partitions tuples into first party (entity "we") and third party.
GranularityReport granularity_analysis(const std::vector<CusTuple>& tuples,
                                       const Ontology& data_ont,
                                       const Ontology& entity_ont,
                                       int coarse_ctg = 2);

enum class CounterpartSource { platform_rec, cross_platform_rec, genre, description };

std::string to_string(CounterpartSource s);

struct CounterpartSet {
    std::string target_app_id;
    // App id -> highest-priority discovery source.
    std::vector<std::pair<std::string, CounterpartSource>> counterparts;
    std::size_t k = 0;
    bool comparable = false;  // false when the candidate pool was empty
};

struct OverbroadFinding {
    std::string data_term;
    std::size_t covered = 0;  // counterparts whose lower bound covers the term
    std::size_t total = 0;
    double majority = 0.5;
};

// For each target lower-bound term: covered by a counterpart iff the term or
// any of its descendants appears in that counterpart's lower bound
// (exact_membership disables the descendant rule); overbroad iff the covered
// fraction is below `majority`.
std::vector<OverbroadFinding> minimization_analysis(
    const TermSet& target_lower, const std::vector<TermSet>& counterparts_lower,
    const Ontology& ont, double majority = 0.5, bool exact_membership = false);

enum class EvidenceKind { permission, api, uri };

std::string to_string(EvidenceKind k);
EvidenceKind evidence_kind_from_string(const std::string& s);

struct EvidenceEntry {
    std::string id;
    EvidenceKind kind = EvidenceKind::permission;
    std::string pattern;  // matched as a substring of raw evidence strings
    std::string data_term;
};

class EvidenceMap {
public:
    EvidenceMap() = default;
    EvidenceMap(std::string version, std::vector<EvidenceEntry> entries,
                const Ontology& data_ont);

    const std::string& version() const { return version_; }
    const std::vector<EvidenceEntry>& entries() const { return entries_; }

    // Resolves an evidence id or raw string (substring match against
    // patterns, case-insensitive) to entries. Empty result = unresolved.
    std::vector<const EvidenceEntry*> resolve(const std::string& evidence) const;

private:
    std::string version_;
    std::vector<EvidenceEntry> entries_;
};

// Schema: {"version": str, "entries": [{"id", "kind", "pattern", "data_term"}...]}
EvidenceMap load_evidence_map(const std::string& json_text, const Ontology& data_ont);
EvidenceMap load_evidence_map_file(const std::string& path, const Ontology& data_ont);

enum class ConsistencyVerdict { disclosed, vague, inconsistent };

std::string to_string(ConsistencyVerdict v);

struct ConsistencyFinding {
    std::string data_term;
    ConsistencyVerdict verdict = ConsistencyVerdict::disclosed;
    std::vector<std::string> evidence_ids;
};

struct ConsistencyResult {
    std::vector<ConsistencyFinding> findings;
    bool no_policy = false;  // every evidenced term counted inconsistent
};

// Verdict per evidenced data term: disclosed iff in Claimed, vague iff in
// UpperBound \ Claimed, inconsistent iff outside UpperBound. Without a
// policy every evidenced term is inconsistent. Throws
// UnresolvedEvidenceError listing ids that match nothing in the map.
ConsistencyResult consistency_analysis(const std::vector<std::string>& evidence,
                                       const EvidenceMap& emap,
                                       const BoundsResult& bounds,
                                       bool policy_present = true);

}  // namespace ppvet
