#pragma once

// Structural-component classification. Every sentence gets a possibly-empty
// set of the seven component labels; a policy is structurally complete when
// all seven appear somewhere. The default classifier is a versioned regex
// ruleset loaded from data; the SentenceClassifier interface lets an
// external model replace it without touching the completeness logic.

#include <map>
#include <memory>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "ppvet/errors.hpp"
#include "ppvet/textproc.hpp"

namespace ppvet {

enum class ComponentLabel {
    DataCUS,
    DataRetention,
    DataSecurity,
    UserChoice,
    UserRights,
    PolicyChange,
    SpecificAudiences,
};

constexpr int kComponentCount = 7;

const std::vector<ComponentLabel>& all_component_labels();
std::string to_string(ComponentLabel label);
ComponentLabel component_label_from_string(const std::string& s);

struct ComponentAnnotation {
    std::size_t sentence_index = 0;
    std::set<ComponentLabel> labels;
    // "label:pattern" strings; nonempty exactly when labels is nonempty.
    std::vector<std::string> matched_rules;
};

class SentenceClassifier {
public:
    virtual ~SentenceClassifier() = default;
    virtual ComponentAnnotation classify(const Sentence& s) const = 0;
    virtual std::string version() const = 0;
};

class ComponentRuleSet : public SentenceClassifier {
public:
    struct LabelRules {
        std::vector<std::string> patterns;
        std::vector<std::string> exclude;
    };

    // Compiles all patterns; throws ConfigError on a bad regex or a label
    // with no rules.
    ComponentRuleSet(std::string version, std::map<ComponentLabel, LabelRules> rules);

    ComponentAnnotation classify(const Sentence& s) const override;
    std::string version() const override { return version_; }

private:
    struct Compiled {
        std::vector<std::pair<std::string, std::regex>> patterns;
        std::vector<std::regex> exclude;
    };
    std::string version_;
    std::map<ComponentLabel, Compiled> rules_;
};

// Ruleset file schema: {"version": str, "rules": {label: [pattern...] |
// {"patterns": [...], "exclude": [...]}}}
ComponentRuleSet load_component_rules(const std::string& json_text);
ComponentRuleSet load_component_rules_file(const std::string& path);

ComponentAnnotation classify_sentence(const SentenceClassifier& rules, const Sentence& s);

std::vector<ComponentAnnotation> classify_document(const SentenceClassifier& rules,
                                                   const PolicyDocument& doc);

struct CompletenessRecord {
    std::map<ComponentLabel, bool> present;
    std::set<ComponentLabel> missing;
    bool complete = false;
    bool zero_components = false;  // no sentence carries any label
};

CompletenessRecord completeness_verdict(const std::vector<ComponentAnnotation>& annotations);

// Children-audience check: a SpecificAudiences-labeled sentence that also
// hits a child keyword. Reported for apps in education/kids/family genres.
bool mentions_children_privacy(const PolicyDocument& doc,
                               const std::vector<ComponentAnnotation>& annotations);

}  // namespace ppvet
