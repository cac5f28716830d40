#include "ppvet/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ppvet/lexicon.hpp"

namespace fs = std::filesystem;

namespace ppvet {

std::string normalize_app_name(const std::string& name) {
    return normalize_phrase(name);
}

AppRecord app_record_from_json(const std::string& json_line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("app record: ") + e.what());
    }
    AppRecord r;
    r.app_id = j.value("id", "");
    if (r.app_id.empty()) throw ParseError("app record missing id");
    r.name = j.value("name", "");
    if (r.name.empty()) throw ParseError("app record '" + r.app_id + "' missing name");
    for (const auto& p : j.value("platforms", nlohmann::json::array()))
        r.platforms.insert(p.get<std::string>());
    r.developer = j.value("developer", "");
    if (j.contains("price")) {
        if (j["price"].is_string())
            r.price = j["price"].get<std::string>();
        else if (j["price"].is_number())
            r.price = j["price"].dump();
    }
    for (const auto& g : j.value("genres", nlohmann::json::array()))
        r.genres.insert(g.get<std::string>());
    r.description = j.value("description", "");
    r.homepage_url = j.value("homepage_url", "");
    r.policy_url = j.value("policy_url", "");
    for (const auto& id : j.value("recommendation_ids", nlohmann::json::array()))
        r.recommendation_ids.insert(id.get<std::string>());
    r.policy_ref = j.value("policy_ref", "");
    r.evidence_ref = j.value("evidence_ref", "");
    return r;
}

std::string app_record_to_json(const AppRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.app_id;
    j["name"] = r.name;
    j["platforms"] = r.platforms;
    j["developer"] = r.developer;
    j["price"] = r.price;
    j["genres"] = r.genres;
    j["description"] = r.description;
    j["homepage_url"] = r.homepage_url;
    j["policy_url"] = r.policy_url;
    j["recommendation_ids"] = r.recommendation_ids;
    j["policy_ref"] = r.policy_ref;
    j["evidence_ref"] = r.evidence_ref;
    return j.dump();
}

void CorpusStore::index_record(const AppRecord& record) {
    by_name_[normalize_app_name(record.name)] = record.app_id;
    for (const auto& p : record.platforms) by_platform_[p].insert(record.app_id);
    for (const auto& g : record.genres) by_genre_[g].insert(record.app_id);
}

namespace {

// Merge `incoming` into `existing`; returns true when anything changed.
bool merge_record(AppRecord& existing, const AppRecord& incoming) {
    bool changed = false;
    auto merge_set = [&](std::set<std::string>& dst, const std::set<std::string>& src) {
        for (const auto& v : src)
            if (dst.insert(v).second) changed = true;
    };
    auto fill = [&](std::string& dst, const std::string& src) {
        if (dst.empty() && !src.empty()) {
            dst = src;
            changed = true;
        }
    };
    merge_set(existing.platforms, incoming.platforms);
    merge_set(existing.genres, incoming.genres);
    merge_set(existing.recommendation_ids, incoming.recommendation_ids);
    fill(existing.developer, incoming.developer);
    fill(existing.price, incoming.price);
    fill(existing.description, incoming.description);
    fill(existing.homepage_url, incoming.homepage_url);
    fill(existing.policy_url, incoming.policy_url);
    fill(existing.policy_ref, incoming.policy_ref);
    fill(existing.evidence_ref, incoming.evidence_ref);
    return changed;
}

}  // namespace

IngestSummary CorpusStore::ingest(const std::vector<AppRecord>& records) {
    IngestSummary summary;
    for (const auto& record : records) {
        if (record.app_id.empty() || record.name.empty()) {
            ++summary.rejected;
            summary.errors.push_back("record missing id or name");
            continue;
        }
        const std::string key = normalize_app_name(record.name);
        auto name_it = by_name_.find(key);
        if (name_it == by_name_.end()) {
            records_[record.app_id] = record;
            index_record(record);
            for (const auto& p : record.platforms) {
                (void)p;
            }
            ++summary.inserted;
        } else {
            AppRecord& existing = records_.at(name_it->second);
            if (record.app_id != existing.app_id) alias_[record.app_id] = existing.app_id;
            if (merge_record(existing, record)) {
                index_record(existing);
                ++summary.merged;
            } else {
                ++summary.unchanged;
            }
        }
    }
    // Rebuild the incremental per-platform counters after each commit.
    platform_app_count_.clear();
    for (const auto& [platform, ids] : by_platform_)
        platform_app_count_[platform] = ids.size();
    return summary;
}

const AppRecord* CorpusStore::find(const std::string& app_id) const {
    auto it = records_.find(app_id);
    if (it != records_.end()) return &it->second;
    auto alias = alias_.find(app_id);
    if (alias != alias_.end()) return &records_.at(alias->second);
    return nullptr;
}

std::vector<std::string> CorpusStore::app_ids() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& [id, record] : records_) {
        (void)record;
        out.push_back(id);
    }
    return out;
}

std::set<std::string> CorpusStore::platforms() const {
    std::set<std::string> out;
    for (const auto& [p, ids] : by_platform_) {
        (void)ids;
        out.insert(p);
    }
    return out;
}

std::vector<std::string> CorpusStore::apps_on_platform(const std::string& platform) const {
    auto it = by_platform_.find(platform);
    if (it == by_platform_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::vector<std::string> CorpusStore::apps_in_genre(const std::string& genre) const {
    auto it = by_genre_.find(genre);
    if (it == by_genre_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::optional<std::string> CorpusStore::policy_text(const std::string& app_id) const {
    auto it = policy_texts_.find(app_id);
    if (it != policy_texts_.end()) return it->second;
    const AppRecord* record = find(app_id);
    if (!record || record->policy_ref.empty() || dir_.empty()) return std::nullopt;
    std::ifstream in(fs::path(dir_) / "policies" / record->policy_ref, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void CorpusStore::set_policy_text(const std::string& app_id, const std::string& text) {
    policy_texts_[app_id] = text;
}

std::optional<std::vector<std::string>> CorpusStore::evidence(
    const std::string& app_id) const {
    auto it = evidence_.find(app_id);
    if (it != evidence_.end()) return it->second;
    const AppRecord* record = find(app_id);
    if (!record || record->evidence_ref.empty() || dir_.empty()) return std::nullopt;
    std::ifstream in(fs::path(dir_) / "evidence" / record->evidence_ref);
    if (!in) return std::nullopt;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw StoreError("evidence file " + record->evidence_ref + ": " + e.what());
    }
    std::vector<std::string> ids;
    for (const auto& id : j) ids.push_back(id.get<std::string>());
    return ids;
}

void CorpusStore::set_evidence(const std::string& app_id, std::vector<std::string> ids) {
    evidence_[app_id] = std::move(ids);
}

void CorpusStore::set_ppg(const std::string& app_id, std::size_t ppg) {
    ppg_[app_id] = ppg;
}

std::optional<std::size_t> CorpusStore::ppg_of(const std::string& app_id) const {
    auto it = ppg_.find(app_id);
    if (it == ppg_.end()) return std::nullopt;
    return it->second;
}

CorpusStore CorpusStore::open(const std::string& dir) {
    CorpusStore store;
    store.dir_ = dir;
    const fs::path apps = fs::path(dir) / "apps.jsonl";
    std::ifstream in(apps);
    if (!in) throw StoreError("corpus store has no apps.jsonl: " + apps.string());
    std::vector<AppRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(app_record_from_json(line));
        } catch (const ParseError& e) {
            throw StoreError(apps.string() + ":" + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    store.ingest(records);
    const fs::path pages_dir = fs::path(dir) / "pages";
    if (fs::exists(pages_dir / "index.json")) store.attach_pages(PageStore::open(pages_dir.string()));
    return store;
}

void CorpusStore::save(const std::string& dir) const {
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / "apps.jsonl");
    if (!out) throw StoreError("cannot write apps.jsonl in " + dir);
    for (const auto& [id, record] : records_) {
        (void)id;
        out << app_record_to_json(record) << "\n";
    }
    // Derived indices, written for diffability and external tooling.
    nlohmann::ordered_json indices;
    auto by_platform = nlohmann::ordered_json::object();
    for (const auto& [p, ids] : by_platform_) by_platform[p] = ids;
    auto by_genre = nlohmann::ordered_json::object();
    for (const auto& [g, ids] : by_genre_) by_genre[g] = ids;
    auto by_name = nlohmann::ordered_json::object();
    for (const auto& [n, id] : by_name_) by_name[n] = id;
    indices["by_platform"] = std::move(by_platform);
    indices["by_genre"] = std::move(by_genre);
    indices["by_name"] = std::move(by_name);
    std::ofstream idx(fs::path(dir) / "indices.json");
    idx << indices.dump(2) << "\n";
    fs::create_directories(fs::path(dir) / "policies");
    for (const auto& [app_id, text] : policy_texts_) {
        const AppRecord* record = find(app_id);
        const std::string file =
            record && !record->policy_ref.empty() ? record->policy_ref : app_id + ".txt";
        std::ofstream pf(fs::path(dir) / "policies" / file, std::ios::binary);
        pf << text;
    }
}

std::vector<AppRecord> load_metadata_jsonl(const std::string& path,
                                           IngestSummary* errors) {
    std::ifstream in(path);
    if (!in) throw StoreError("cannot open metadata file: " + path);
    std::vector<AppRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(app_record_from_json(line));
        } catch (const ParseError& e) {
            if (!errors) throw;
            ++errors->rejected;
            errors->errors.push_back(path + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return records;
}

bool app_policy_available(const CorpusStore& store, const AppRecord& record,
                          int max_hops) {
    if (!record.policy_url.empty()) return true;
    if (!record.policy_ref.empty()) return true;
    if (record.homepage_url.empty()) return false;
    const PageStore* pages = store.pages();
    if (!pages) return false;
    const PrivacyLinkResult links =
        find_policy_links(*pages, record.homepage_url, max_hops);
    return !links.urls.empty();
}

PlatformStats availability(const CorpusStore& store, const std::string& platform,
                           int max_hops) {
    if (!store.platforms().count(platform)) throw UnknownPlatformError(platform);
    PlatformStats stats;
    stats.platform = platform;
    for (const auto& app_id : store.apps_on_platform(platform)) {
        const AppRecord* record = store.find(app_id);
        if (!record) continue;
        ++stats.app_count;
        if (app_policy_available(store, *record, max_hops)) ++stats.policy_count;
    }
    if (stats.app_count > 0)
        stats.availability = static_cast<double>(stats.policy_count) /
                             static_cast<double>(stats.app_count);
    return stats;
}

double ppg_percentile(const CorpusStore& store, const std::string& app_id) {
    const auto own = store.ppg_of(app_id);
    if (!own) throw NoPpgError(app_id);
    const auto& all = store.ppg_values();
    const std::size_t n = all.size();
    // Mean rank of the tied block: ranks below + (ties + 1) / 2.
    std::size_t below = 0;
    std::size_t ties = 0;
    for (const auto& [id, value] : all) {
        (void)id;
        if (value < *own) ++below;
        if (value == *own) ++ties;
    }
    const double mean_rank =
        static_cast<double>(below) + (static_cast<double>(ties) + 1.0) / 2.0;
    return 100.0 * (mean_rank - 0.5) / static_cast<double>(n);
}

namespace {

std::string squash_whitespace(const std::string& text) {
    std::string out;
    bool in_ws = true;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            if (!in_ws) out += ' ';
            in_ws = true;
        } else {
            out += c;
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

}  // namespace

std::vector<ReuseCluster> reuse_detector(const CorpusStore& store) {
    std::map<std::string, std::vector<std::string>> by_text;
    for (const auto& [app_id, record] : store.records()) {
        (void)record;
        const auto text = store.policy_text(app_id);
        if (!text) continue;
        by_text[squash_whitespace(*text)].push_back(app_id);
    }
    std::vector<ReuseCluster> clusters;
    for (auto& [text, ids] : by_text) {
        (void)text;
        if (ids.size() < 2) continue;
        std::sort(ids.begin(), ids.end());
        clusters.push_back({ids, ids.size()});
    }
    std::sort(clusters.begin(), clusters.end(), [](const ReuseCluster& a, const ReuseCluster& b) {
        if (a.size != b.size) return a.size > b.size;
        return a.app_ids.front() < b.app_ids.front();
    });
    return clusters;
}

double description_similarity(const std::string& a, const std::string& b) {
    auto ta = phrase_tokens(a);
    auto tb = phrase_tokens(b);
    std::set<std::string> sa(ta.begin(), ta.end());
    std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() || sb.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

CounterpartSet find_counterparts(const AppRecord& target, const CorpusStore& store,
                                 std::size_t k) {
    CounterpartSet result;
    result.target_app_id = target.app_id;
    result.k = k;

    // Candidate pool with the best discovery source per app.
    std::map<std::string, CounterpartSource> pool;
    auto offer = [&](const std::string& raw_id, CounterpartSource source) {
        const AppRecord* record = store.find(raw_id);
        if (!record) return;
        const std::string& id = record->app_id;
        if (id == target.app_id) return;
        auto it = pool.find(id);
        if (it == pool.end() || static_cast<int>(source) < static_cast<int>(it->second))
            pool[id] = source;
    };
    for (const auto& rec_id : target.recommendation_ids) {
        const AppRecord* record = store.find(rec_id);
        if (!record) continue;
        bool shares_platform = false;
        for (const auto& p : record->platforms)
            if (target.platforms.count(p)) shares_platform = true;
        offer(rec_id, shares_platform ? CounterpartSource::platform_rec
                                      : CounterpartSource::cross_platform_rec);
    }
    for (const auto& genre : target.genres)
        for (const auto& id : store.apps_in_genre(genre))
            offer(id, CounterpartSource::genre);

    if (pool.empty()) return result;  // not comparable
    result.comparable = true;

    struct Candidate {
        std::string id;
        CounterpartSource source;
        double similarity;
    };
    std::vector<Candidate> candidates;
    for (const auto& [id, source] : pool) {
        const AppRecord* record = store.find(id);
        candidates.push_back(
            {id, source,
             description_similarity(target.description, record->description)});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.source != b.source) return static_cast<int>(a.source) < static_cast<int>(b.source);
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.id < b.id;
    });
    for (const auto& c : candidates) {
        if (result.counterparts.size() >= k) break;
        result.counterparts.emplace_back(c.id, c.source);
    }
    return result;
}

}  // namespace ppvet
