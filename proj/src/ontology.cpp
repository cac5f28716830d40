#include "ppvet/ontology.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ppvet {

std::string to_string(TermKind kind) {
    return kind == TermKind::data ? "data" : "entity";
}

TermKind term_kind_from_string(const std::string& s) {
    if (s == "data") return TermKind::data;
    if (s == "entity") return TermKind::entity;
    throw ParseError("unknown ontology kind '" + s + "'");
}

Ontology::Ontology(TermKind kind, std::string root,
                   std::vector<std::string> node_ids,
                   std::vector<std::pair<std::string, std::string>> edges)
    : kind_(kind), root_(std::move(root)) {
    for (const auto& id : node_ids) {
        if (id.empty()) throw ParseError("ontology node with empty id");
        if (index_.count(id)) throw ParseError("duplicate ontology node '" + id + "'");
        index_[id] = static_cast<int>(names_.size());
        names_.push_back(id);
    }
    if (names_.empty()) throw ParseError("ontology has no nodes");
    if (!index_.count(root_)) throw ParseError("root '" + root_ + "' not in node set");
    id_ = to_string(kind_) + ":" + root_;

    const int n = static_cast<int>(names_.size());
    children_.assign(n, {});
    parents_.assign(n, {});
    for (const auto& [parent, child] : edges) {
        auto pit = index_.find(parent);
        auto cit = index_.find(child);
        if (pit == index_.end() || cit == index_.end())
            throw DanglingEdgeError(parent, child);
        children_[pit->second].push_back(cit->second);
        parents_[cit->second].push_back(pit->second);
    }
    for (auto& adj : children_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    for (auto& adj : parents_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }

    // Kahn's toposort both rejects cycles and gives the order for the
    // granularity and reachability passes below.
    std::vector<int> indegree(n, 0);
    for (int v = 0; v < n; ++v)
        for (int c : children_[v]) ++indegree[c];
    std::deque<int> queue;
    for (int v = 0; v < n; ++v)
        if (indegree[v] == 0) queue.push_back(v);
    std::vector<int> topo;
    topo.reserve(n);
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        topo.push_back(v);
        for (int c : children_[v])
            if (--indegree[c] == 0) queue.push_back(c);
    }
    if (static_cast<int>(topo.size()) != n) {
        // Every unprocessed node sits on or below a cycle; name the
        // lexicographically smallest one that still has incoming edges.
        std::string offender;
        for (int v = 0; v < n; ++v)
            if (indegree[v] > 0 && (offender.empty() || names_[v] < offender))
                offender = names_[v];
        throw CycleError(offender);
    }

    // Reachability closure in reverse topological order.
    reach_.assign(n, std::vector<bool>(n, false));
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        int v = *it;
        for (int c : children_[v]) {
            reach_[v][c] = true;
            for (int u = 0; u < n; ++u)
                if (reach_[c][u]) reach_[v][u] = true;
        }
    }

    const int root_idx = index_.at(root_);
    for (int v = 0; v < n; ++v) {
        if (v != root_idx && !reach_[root_idx][v])
            throw ParseError("node '" + names_[v] +
                             "' not reachable from root '" + root_ + "'");
    }

    // Longest node-counted path to a leaf: leaves score 1.
    granularity_.assign(n, 1);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        int v = *it;
        for (int c : children_[v])
            granularity_[v] = std::max(granularity_[v], granularity_[c] + 1);
    }
    for (int v = 0; v < n; ++v)
        if (children_[v].empty()) leaves_.insert(names_[v]);
}

int Ontology::index_of(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) throw UnknownTermError(term, id_);
    return it->second;
}

std::vector<std::string> Ontology::children_of(const std::string& term) const {
    std::vector<std::string> out;
    for (int c : children_[index_of(term)]) out.push_back(names_[c]);
    return out;
}

std::vector<std::string> Ontology::parents_of(const std::string& term) const {
    std::vector<std::string> out;
    for (int p : parents_[index_of(term)]) out.push_back(names_[p]);
    return out;
}

int Ontology::node_granularity(const std::string& term) const {
    return granularity_[index_of(term)];
}

TermSet Ontology::descendants(const std::string& term) const {
    const int v = index_of(term);
    TermSet out{id_, {}};
    for (int u = 0; u < static_cast<int>(names_.size()); ++u)
        if (reach_[v][u]) out.terms.insert(names_[u]);
    return out;
}

bool Ontology::has_path(const std::string& from, const std::string& to) const {
    return reach_[index_of(from)][index_of(to)];
}

TermSet Ontology::make_term_set(const std::set<std::string>& terms) const {
    TermSet out{id_, {}};
    for (const auto& t : terms) {
        index_of(t);  // membership check
        out.terms.insert(t);
    }
    return out;
}

TermSet Ontology::lower_bound(const TermSet& claimed) const {
    // Bucket claimed terms by granularity. The finest bucket (leaves) seeds
    // the result; only claimed leaves enter it, never unclaimed ontology
    // leaves, otherwise the result would not be a subset of the claims.
    std::map<int, std::vector<int>> buckets;
    int max_g = 0;
    for (const auto& t : claimed.terms) {
        const int v = index_of(t);
        const int g = granularity_[v];
        buckets[g].push_back(v);
        max_g = std::max(max_g, g);
    }

    std::set<int> retained;
    for (int g = 1; g <= max_g; ++g) {
        auto it = buckets.find(g);
        if (it == buckets.end()) continue;
        for (int v : it->second) {
            // Same-granularity nodes are incomparable, so checking against
            // the retained set alone implements the per-level sweep.
            bool reaches_retained = false;
            for (int u : retained) {
                if (reach_[v][u]) {
                    reaches_retained = true;
                    break;
                }
            }
            if (!reaches_retained) retained.insert(v);
        }
    }

    TermSet out{id_, {}};
    for (int v : retained) out.terms.insert(names_[v]);
    return out;
}

TermSet Ontology::upper_bound(const TermSet& claimed) const {
    std::set<int> acc;
    for (const auto& t : claimed.terms) {
        const int v = index_of(t);
        acc.insert(v);
        for (int u = 0; u < static_cast<int>(names_.size()); ++u)
            if (reach_[v][u]) acc.insert(u);
    }
    TermSet out{id_, {}};
    for (int v : acc) out.terms.insert(names_[v]);
    return out;
}

BoundsResult Ontology::ppg(const TermSet& claimed) const {
    BoundsResult r;
    r.claimed = make_term_set(claimed.terms);
    r.lower = lower_bound(r.claimed);
    r.upper = upper_bound(r.claimed);
    r.gap.ontology_id = id_;
    for (const auto& t : r.upper.terms)
        if (!r.lower.contains(t)) r.gap.terms.insert(t);
    r.ppg = r.upper.size() - r.lower.size();
    return r;
}

namespace {

std::string lowercase(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

}  // namespace

Ontology load_ontology(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("ontology document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("kind") || !doc.contains("root") ||
        !doc.contains("nodes") || !doc.contains("edges"))
        throw ParseError("ontology document missing kind/root/nodes/edges");

    const TermKind kind = term_kind_from_string(doc["kind"].get<std::string>());
    const std::string root = lowercase(doc["root"].get<std::string>());
    std::vector<std::string> nodes;
    for (const auto& n : doc["nodes"]) nodes.push_back(lowercase(n.get<std::string>()));
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2)
            throw ParseError("ontology edge must be a [parent, child] pair");
        edges.emplace_back(lowercase(e[0].get<std::string>()),
                           lowercase(e[1].get<std::string>()));
    }
    Ontology ont(kind, root, std::move(nodes), std::move(edges));
    ont.version = doc.value("version", "");
    return ont;
}

Ontology load_ontology_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open ontology file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_ontology(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::pair<int, int> tuple_granularity(const Ontology& data_ont,
                                      const Ontology& entity_ont,
                                      const std::string& entity_term,
                                      const std::string& data_term) {
    return {entity_ont.node_granularity(entity_term),
            data_ont.node_granularity(data_term)};
}

bool is_coarse(const std::pair<int, int>& ctg, int threshold) {
    return ctg.first >= threshold || ctg.second >= threshold;
}

}  // namespace ppvet
