#pragma once

// Policy text preprocessing: stored HTML to plaintext, privacy-link
// discovery over an offline page store, and rule-based sentence
// segmentation. Everything here is pure and offline; hop traversal only
// ever reads pages already on disk.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppvet/errors.hpp"

namespace ppvet {

enum class DocumentKind { policy_html, homepage_html, policy_text };

struct RawDocument {
    std::string app_id;
    DocumentKind kind = DocumentKind::policy_text;
    std::string bytes;
    std::string source_url;
};

struct Sentence {
    std::size_t index = 0;
    std::string text;
};

struct DocumentProvenance {
    std::string source_url;
    std::string source_kind;  // "html" or "text"
    bool degraded = false;    // malformed HTML handled best-effort
};

struct PolicyDocument {
    std::string app_id;
    std::vector<Sentence> sentences;
    DocumentProvenance provenance;
};

struct PlaintextResult {
    std::string text;
    bool degraded = false;
};

// Drops script/style/nav boilerplate, turns block elements into paragraph
// breaks and list items into lines, decodes entity references. Throws
// InputError if the document kind is wrong or the visible text is empty.
PlaintextResult html_to_plaintext(const RawDocument& doc);

struct Anchor {
    std::string href;     // as written
    std::string resolved; // absolute, against the document URL
    std::string text;
};

std::vector<Anchor> extract_anchors(const std::string& html,
                                    const std::string& base_url);

struct PrivacyLinkResult {
    std::vector<std::string> urls;
    // Privacy anchors that point back at the containing page (self links,
    // bare fragments); surfaced separately as fake-redirection candidates.
    std::vector<std::string> fake_redirects;
};

// Privacy anchors of a single stored homepage: anchors whose text contains
// "privacy" case-insensitively. With `extended_keywords`, also matches
// "notice"/"terms"-style anchor texts (off by default).
PrivacyLinkResult extract_privacy_links(const RawDocument& doc,
                                        bool extended_keywords = false);

// Offline page store: a directory with index.json mapping URLs to files.
class PageStore {
public:
    static PageStore open(const std::string& dir);
    static PageStore create(const std::string& dir);

    bool contains(const std::string& url) const;
    std::optional<std::string> get(const std::string& url) const;
    void add(const std::string& url, const std::string& html,
             const std::string& fetched_at = "");
    void save() const;
    std::size_t size() const { return index_.size(); }

private:
    struct Entry {
        std::string file;
        std::string fetched_at;
    };
    std::string dir_;
    std::map<std::string, Entry> index_;
};

// Breadth-first privacy-link discovery from a stored homepage, following
// stored pages only, up to `max_hops` clicks (default 2). Pages at depth
// < max_hops are scanned; a privacy anchor found on a depth-d page is a
// policy reached in d+1 hops.
PrivacyLinkResult find_policy_links(const PageStore& store,
                                    const std::string& homepage_url,
                                    int max_hops = 2,
                                    bool extended_keywords = false);

// Deterministic splitting on sentence terminators with abbreviation and
// decimal guards; a line without a terminator (heading, bullet) is one
// sentence. Throws InputError on empty input.
std::vector<Sentence> segment_sentences(const std::string& text);

// Convenience: raw document -> segmented PolicyDocument.
PolicyDocument make_policy_document(const RawDocument& doc);

std::string resolve_url(const std::string& base, const std::string& href);
std::string url_host(const std::string& url);

// Second-level label of a URL host ("vrchat" from https://www.vrchat.com/x).
std::string registrable_label(const std::string& url);

}  // namespace ppvet
