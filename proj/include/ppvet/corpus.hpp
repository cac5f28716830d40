#pragma once

// App metadata store and corpus-level statistics: JSON-lines metadata with
// name-normalized de-duplication, per-platform availability under the
// two-hop rule, PPG percentiles with mean-rank ties, and exact-text policy
// reuse clusters. Storage is a plain directory so the corpus stays diffable.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppvet/compliance.hpp"
#include "ppvet/errors.hpp"
#include "ppvet/textproc.hpp"

namespace ppvet {

struct AppRecord {
    std::string app_id;
    std::string name;
    std::set<std::string> platforms;
    std::string developer;
    std::string price;
    std::set<std::string> genres;
    std::string description;
    std::string homepage_url;
    std::string policy_url;
    std::set<std::string> recommendation_ids;
    std::string policy_ref;    // file under <store>/policies/
    std::string evidence_ref;  // file under <store>/evidence/
};

AppRecord app_record_from_json(const std::string& json_line);
std::string app_record_to_json(const AppRecord& record);

// De-duplication key: lowercase, punctuation stripped, whitespace collapsed.
std::string normalize_app_name(const std::string& name);

struct IngestSummary {
    std::size_t inserted = 0;
    std::size_t merged = 0;
    std::size_t unchanged = 0;
    std::size_t rejected = 0;
    std::vector<std::string> errors;  // one message per rejected record
};

struct PlatformStats {
    std::string platform;
    std::size_t app_count = 0;
    std::size_t policy_count = 0;                // apps counted available
    std::optional<double> availability;          // empty for a platform with 0 apps
    std::optional<double> ppg_mean;
    std::optional<double> ppg_median;
    std::optional<double> overbroad_ratio;       // overbroad / comparable
    std::size_t comparable_count = 0;
    std::size_t overbroad_count = 0;
};

struct ReuseCluster {
    std::vector<std::string> app_ids;  // sorted
    std::size_t size = 0;
};

class CorpusStore {
public:
    CorpusStore() = default;

    // Loads apps.jsonl (and the page store under pages/, if present) from a
    // store directory.
    static CorpusStore open(const std::string& dir);
    void save(const std::string& dir) const;

    IngestSummary ingest(const std::vector<AppRecord>& records);

    const std::map<std::string, AppRecord>& records() const { return records_; }
    const AppRecord* find(const std::string& app_id) const;
    std::vector<std::string> app_ids() const;
    std::set<std::string> platforms() const;
    std::vector<std::string> apps_on_platform(const std::string& platform) const;
    std::vector<std::string> apps_in_genre(const std::string& genre) const;

    // Policy plaintext, loaded from policy_ref or set directly.
    std::optional<std::string> policy_text(const std::string& app_id) const;
    void set_policy_text(const std::string& app_id, const std::string& text);

    std::optional<std::vector<std::string>> evidence(const std::string& app_id) const;
    void set_evidence(const std::string& app_id, std::vector<std::string> ids);

    const PageStore* pages() const { return page_store_ ? &*page_store_ : nullptr; }
    void attach_pages(PageStore pages) { page_store_ = std::move(pages); }

    // Analysis results feeding percentile and stats queries.
    void set_ppg(const std::string& app_id, std::size_t ppg);
    std::optional<std::size_t> ppg_of(const std::string& app_id) const;
    const std::map<std::string, std::size_t>& ppg_values() const { return ppg_; }

    // Incrementally maintained availability counters (apps with a policy URL
    // per platform); the availability query recomputes from records, and the
    // two must agree.
    const std::map<std::string, std::size_t>& platform_app_counts() const {
        return platform_app_count_;
    }

    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::map<std::string, AppRecord> records_;
    std::map<std::string, std::string> alias_;  // merged app id -> canonical id
    std::map<std::string, std::string> by_name_;
    std::map<std::string, std::set<std::string>> by_platform_;
    std::map<std::string, std::set<std::string>> by_genre_;
    std::map<std::string, std::size_t> platform_app_count_;
    std::map<std::string, std::string> policy_texts_;
    std::map<std::string, std::vector<std::string>> evidence_;
    std::map<std::string, std::size_t> ppg_;
    std::optional<PageStore> page_store_;

    void index_record(const AppRecord& record);
};

std::vector<AppRecord> load_metadata_jsonl(const std::string& path, IngestSummary* errors);

// An app is available iff its item page carries a policy URL or a privacy
// link is discoverable within `max_hops` of its stored homepage.
bool app_policy_available(const CorpusStore& store, const AppRecord& record,
                          int max_hops = 2);

// Availability fragment for one platform. Throws UnknownPlatformError.
PlatformStats availability(const CorpusStore& store, const std::string& platform,
                           int max_hops = 2);

// Percentile rank of the app's PPG among all apps with a recorded PPG;
// ties share the mean rank, a single app lands on 50. Throws NoPpgError.
double ppg_percentile(const CorpusStore& store, const std::string& app_id);

// Groups apps whose policy plaintexts are byte-identical after whitespace
// normalization; only groups of two or more count as reuse.
std::vector<ReuseCluster> reuse_detector(const CorpusStore& store);

// Counterpart discovery for the minimization comparison. The pool unions
// same-platform recommendations, cross-platform recommendations and
// same-genre apps; ranking is source priority first, then description
// similarity (token-set Jaccard), then app id.
CounterpartSet find_counterparts(const AppRecord& target, const CorpusStore& store,
                                 std::size_t k = 10);

double description_similarity(const std::string& a, const std::string& b);

}  // namespace ppvet
