#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ppvet {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (JSON syntax, schema violation, bad template line).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// A term id that does not resolve in the target ontology.
class UnknownTermError : public Error {
public:
    UnknownTermError(const std::string& term, const std::string& ontology_id)
        : Error("unknown term '" + term + "' in ontology '" + ontology_id + "'"),
          term_(term) {}
    const std::string& term() const { return term_; }

private:
    std::string term_;
};

// Ontology document contains a cycle; names one node on the cycle.
class CycleError : public Error {
public:
    explicit CycleError(const std::string& node)
        : Error("ontology contains a cycle through node '" + node + "'"), node_(node) {}
    const std::string& node() const { return node_; }

private:
    std::string node_;
};

// Edge endpoint missing from the node set.
class DanglingEdgeError : public Error {
public:
    DanglingEdgeError(const std::string& parent, const std::string& child)
        : Error("edge references undeclared node: " + parent + " -> " + child) {}
};

// Embedding backend failure, distinct from an unterminologized result.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& msg) : Error(msg) {}
};

// Bad run configuration: unresolvable path, threshold out of range, rule
// pattern that does not compile.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Corpus store problems (missing files, inconsistent indices).
class StoreError : public Error {
public:
    explicit StoreError(const std::string& msg) : Error(msg) {}
};

class UnknownPlatformError : public Error {
public:
    explicit UnknownPlatformError(const std::string& platform)
        : Error("unknown platform '" + platform + "'") {}
};

// Percentile requested for an app without a computed PPG.
class NoPpgError : public Error {
public:
    explicit NoPpgError(const std::string& app_id)
        : Error("no PPG recorded for app '" + app_id + "'") {}
};

// Evidence ids that resolve to nothing in the evidence map.
class UnresolvedEvidenceError : public Error {
public:
    explicit UnresolvedEvidenceError(const std::vector<std::string>& ids)
        : Error(join(ids)), ids_(ids) {}
    const std::vector<std::string>& ids() const { return ids_; }

private:
    static std::string join(const std::vector<std::string>& ids) {
        std::string msg = "unresolved evidence:";
        for (const auto& id : ids) msg += " '" + id + "'";
        return msg;
    }
    std::vector<std::string> ids_;
};

// Input document of the wrong kind or with empty usable content.
class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

}  // namespace ppvet
