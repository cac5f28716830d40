#include "ppvet/components.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ppvet {

const std::vector<ComponentLabel>& all_component_labels() {
    static const std::vector<ComponentLabel> labels = {
        ComponentLabel::DataCUS,      ComponentLabel::DataRetention,
        ComponentLabel::DataSecurity, ComponentLabel::UserChoice,
        ComponentLabel::UserRights,   ComponentLabel::PolicyChange,
        ComponentLabel::SpecificAudiences};
    return labels;
}

std::string to_string(ComponentLabel label) {
    switch (label) {
        case ComponentLabel::DataCUS: return "data_cus";
        case ComponentLabel::DataRetention: return "data_retention";
        case ComponentLabel::DataSecurity: return "data_security";
        case ComponentLabel::UserChoice: return "user_choice";
        case ComponentLabel::UserRights: return "user_rights";
        case ComponentLabel::PolicyChange: return "policy_change";
        case ComponentLabel::SpecificAudiences: return "specific_audiences";
    }
    return "data_cus";
}

ComponentLabel component_label_from_string(const std::string& s) {
    for (ComponentLabel label : all_component_labels())
        if (to_string(label) == s) return label;
    throw ParseError("unknown component label '" + s + "'");
}

ComponentRuleSet::ComponentRuleSet(std::string version,
                                   std::map<ComponentLabel, LabelRules> rules)
    : version_(std::move(version)) {
    for (ComponentLabel label : all_component_labels()) {
        auto it = rules.find(label);
        if (it == rules.end() || it->second.patterns.empty())
            throw ConfigError("component ruleset missing rules for " + to_string(label));
    }
    for (auto& [label, label_rules] : rules) {
        Compiled compiled;
        for (auto& p : label_rules.patterns) {
            try {
                compiled.patterns.emplace_back(
                    p, std::regex(p, std::regex::icase | std::regex::ECMAScript));
            } catch (const std::regex_error& e) {
                throw ConfigError("bad pattern for " + to_string(label) + ": '" + p +
                                  "' (" + e.what() + ")");
            }
        }
        for (auto& p : label_rules.exclude) {
            try {
                compiled.exclude.emplace_back(p,
                                              std::regex::icase | std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                throw ConfigError("bad exclude for " + to_string(label) + ": '" + p +
                                  "' (" + e.what() + ")");
            }
        }
        rules_[label] = std::move(compiled);
    }
}

ComponentAnnotation ComponentRuleSet::classify(const Sentence& s) const {
    ComponentAnnotation ann;
    ann.sentence_index = s.index;
    for (const auto& [label, compiled] : rules_) {
        bool excluded = false;
        for (const auto& ex : compiled.exclude) {
            if (std::regex_search(s.text, ex)) {
                excluded = true;
                break;
            }
        }
        if (excluded) continue;
        for (const auto& [pattern, re] : compiled.patterns) {
            if (std::regex_search(s.text, re)) {
                ann.labels.insert(label);
                ann.matched_rules.push_back(to_string(label) + ":" + pattern);
                break;
            }
        }
    }
    return ann;
}

ComponentRuleSet load_component_rules(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("component ruleset: ") + e.what());
    }
    std::map<ComponentLabel, ComponentRuleSet::LabelRules> rules;
    for (const auto& [key, value] : doc.at("rules").items()) {
        ComponentLabel label = component_label_from_string(key);
        ComponentRuleSet::LabelRules label_rules;
        if (value.is_array()) {
            for (const auto& p : value) label_rules.patterns.push_back(p.get<std::string>());
        } else {
            for (const auto& p : value.value("patterns", nlohmann::json::array()))
                label_rules.patterns.push_back(p.get<std::string>());
            for (const auto& p : value.value("exclude", nlohmann::json::array()))
                label_rules.exclude.push_back(p.get<std::string>());
        }
        rules[label] = std::move(label_rules);
    }
    return ComponentRuleSet(doc.value("version", ""), std::move(rules));
}

ComponentRuleSet load_component_rules_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open component ruleset: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_component_rules(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

ComponentAnnotation classify_sentence(const SentenceClassifier& rules, const Sentence& s) {
    return rules.classify(s);
}

std::vector<ComponentAnnotation> classify_document(const SentenceClassifier& rules,
                                                   const PolicyDocument& doc) {
    std::vector<ComponentAnnotation> out;
    out.reserve(doc.sentences.size());
    for (const auto& s : doc.sentences) out.push_back(rules.classify(s));
    return out;
}

CompletenessRecord completeness_verdict(
    const std::vector<ComponentAnnotation>& annotations) {
    CompletenessRecord record;
    for (ComponentLabel label : all_component_labels()) record.present[label] = false;
    for (const auto& ann : annotations)
        for (ComponentLabel label : ann.labels) record.present[label] = true;
    record.complete = true;
    record.zero_components = true;
    for (const auto& [label, present] : record.present) {
        if (present) {
            record.zero_components = false;
        } else {
            record.complete = false;
            record.missing.insert(label);
        }
    }
    return record;
}

bool mentions_children_privacy(const PolicyDocument& doc,
                               const std::vector<ComponentAnnotation>& annotations) {
    static const std::regex child_re(
        "child|children|minor|under (the age of )?(13|16|18)|kids|coppa|parental",
        std::regex::icase);
    for (const auto& ann : annotations) {
        if (!ann.labels.count(ComponentLabel::SpecificAudiences)) continue;
        if (ann.sentence_index < doc.sentences.size() &&
            std::regex_search(doc.sentences[ann.sentence_index].text, child_re))
            return true;
    }
    return false;
}

}  // namespace ppvet
