#pragma once

// Term ontologies: rooted DAGs of data-object or entity terms where an edge
// parent -> child means the parent subsumes (is a hypernym of) the child.
// This module owns the granularity mathematics: per-node granularity (longest
// node-to-leaf path, counted in nodes), lower/upper bounds of a claimed term
// set, and the bound gap used as the policy granularity score.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ppvet/errors.hpp"

namespace ppvet {

enum class TermKind { data, entity };

std::string to_string(TermKind kind);
TermKind term_kind_from_string(const std::string& s);

struct TermNode {
    std::string id;   // canonical term, lowercase space-separated words
    TermKind kind = TermKind::data;
};

// A set of term ids together with the id of the ontology they resolve in.
struct TermSet {
    std::string ontology_id;
    std::set<std::string> terms;

    bool empty() const { return terms.empty(); }
    std::size_t size() const { return terms.size(); }
    bool contains(const std::string& t) const { return terms.count(t) > 0; }
};

struct BoundsResult {
    TermSet claimed;
    TermSet lower;
    TermSet upper;
    TermSet gap;          // upper \ lower, kept for report explainability
    std::size_t ppg = 0;  // |upper| - |lower|
};

class Ontology {
public:
    // Builds and validates. Throws CycleError, DanglingEdgeError or
    // ParseError (duplicate/empty ids, missing root, unreachable nodes).
    Ontology(TermKind kind, std::string root,
             std::vector<std::string> node_ids,
             std::vector<std::pair<std::string, std::string>> edges);

    const std::string& id() const { return id_; }
    TermKind kind() const { return kind_; }
    const std::string& root() const { return root_; }
    std::size_t node_count() const { return names_.size(); }
    bool contains(const std::string& term) const { return index_.count(term) > 0; }
    const std::vector<std::string>& node_ids() const { return names_; }

    // Terms with no outgoing subsumption edge.
    const std::set<std::string>& leaves() const { return leaves_; }
    bool is_leaf(const std::string& term) const { return leaves_.count(term) > 0; }

    std::vector<std::string> children_of(const std::string& term) const;
    std::vector<std::string> parents_of(const std::string& term) const;

    // Longest node-counted path from the term down to any leaf; a leaf
    // scores 1, its parent at least 2. Throws UnknownTermError.
    int node_granularity(const std::string& term) const;

    // Every node reachable from the term via one or more edges, excluding
    // the term itself.
    TermSet descendants(const std::string& term) const;
    bool has_path(const std::string& from, const std::string& to) const;

    // Minimal claimed terms: claimed leaves first, then remaining claimed
    // nodes in ascending granularity order, dropping any node that can reach
    // a node already retained. The result is an antichain under subsumption.
    TermSet lower_bound(const TermSet& claimed) const;

    // Claimed terms plus all their descendants.
    TermSet upper_bound(const TermSet& claimed) const;

    BoundsResult ppg(const TermSet& claimed) const;

    // Validates membership of every term; throws UnknownTermError.
    TermSet make_term_set(const std::set<std::string>& terms) const;

    std::string version;  // document version tag, echoed into reports

private:
    int index_of(const std::string& term) const;

    std::string id_;
    TermKind kind_;
    std::string root_;
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<int>> parents_;
    std::vector<int> granularity_;          // node-counted longest path to a leaf
    std::vector<std::vector<bool>> reach_;  // reach_[v][u]: u reachable from v
    std::set<std::string> leaves_;
};

// Parses the ontology document schema:
//   {"kind": "data"|"entity", "root": id, "nodes": [id...],
//    "edges": [[parent, child]...]}
// Throws ParseError for malformed documents.
Ontology load_ontology(const std::string& json_text);
Ontology load_ontology_file(const std::string& path);

// Granularity of one collect/use/share tuple: <entity CTG, data CTG>.
std::pair<int, int> tuple_granularity(const Ontology& data_ont,
                                      const Ontology& entity_ont,
                                      const std::string& entity_term,
                                      const std::string& data_term);

// A tuple is coarse when either component's granularity reaches the
// threshold (default 2: anything above a leaf).
bool is_coarse(const std::pair<int, int>& ctg, int threshold = 2);

}  // namespace ppvet
