#include "ppvet/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace ppvet {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Elements whose payload is boilerplate, never visible policy text.
const std::set<std::string> kSkipTags = {"script", "style", "noscript", "nav",
                                         "head", "template"};

const std::set<std::string> kBlockTags = {
    "p", "div", "h1", "h2", "h3", "h4", "h5", "h6", "ul", "ol", "li",
    "table", "tr", "td", "th", "section", "article", "header", "footer",
    "blockquote", "pre", "form", "hr", "br", "dl", "dt", "dd", "main",
    "aside", "figure", "figcaption", "address", "fieldset"};

void append_utf8(std::string& out, unsigned long cp) {
    if (cp <= 0x7F) {
        out += static_cast<char>(cp);
    } else if (cp <= 0x7FF) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp <= 0xFFFF) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp <= 0x10FFFF) {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Decodes the entity starting at s[i] (s[i] == '&'). Returns chars consumed,
// 0 when not an entity.
std::size_t decode_entity(const std::string& s, std::size_t i, std::string& out) {
    const std::size_t end = s.find(';', i + 1);
    if (end == std::string::npos || end - i > 12) return 0;
    const std::string body = s.substr(i + 1, end - i - 1);
    if (body.empty()) return 0;
    if (body[0] == '#') {
        unsigned long cp = 0;
        try {
            cp = (body.size() > 1 && (body[1] == 'x' || body[1] == 'X'))
                     ? std::stoul(body.substr(2), nullptr, 16)
                     : std::stoul(body.substr(1), nullptr, 10);
        } catch (...) {
            return 0;
        }
        append_utf8(out, cp);
        return end - i + 1;
    }
    static const std::map<std::string, std::string> named = {
        {"amp", "&"},  {"lt", "<"},    {"gt", ">"},      {"quot", "\""},
        {"apos", "'"}, {"nbsp", " "},  {"ndash", "-"},   {"mdash", "-"},
        {"rsquo", "'"}, {"lsquo", "'"}, {"ldquo", "\""}, {"rdquo", "\""},
        {"copy", "(c)"}, {"reg", "(r)"}, {"hellip", "..."}, {"bull", "*"}};
    auto it = named.find(lower(body));
    if (it == named.end()) return 0;
    out += it->second;
    return end - i + 1;
}

std::string decode_entities(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == '&') {
            const std::size_t used = decode_entity(s, i, out);
            if (used) {
                i += used;
                continue;
            }
        }
        out += s[i++];
    }
    return out;
}

// Collapse whitespace runs per line, drop blank lines.
std::string tidy_lines(const std::string& raw) {
    std::vector<std::string> lines;
    std::string line;
    auto flush = [&]() {
        std::string collapsed;
        bool in_ws = true;
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!in_ws) collapsed += ' ';
                in_ws = true;
            } else {
                collapsed += c;
                in_ws = false;
            }
        }
        while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
        if (!collapsed.empty()) lines.push_back(collapsed);
        line.clear();
    };
    for (char c : raw) {
        if (c == '\n')
            flush();
        else
            line += c;
    }
    flush();
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) out += '\n';
        out += l;
    }
    return out;
}

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::string attrs;  // raw attribute text
    std::size_t end = 0;  // index just past '>'
    bool unterminated = false;
};

Tag parse_tag(const std::string& html, std::size_t i) {
    // html[i] == '<'
    Tag tag;
    std::size_t j = i + 1;
    if (j < html.size() && html[j] == '/') {
        tag.closing = true;
        ++j;
    }
    std::size_t name_start = j;
    while (j < html.size() && (std::isalnum(static_cast<unsigned char>(html[j])) ||
                               html[j] == '-' || html[j] == '_'))
        ++j;
    tag.name = lower(html.substr(name_start, j - name_start));
    std::size_t attrs_start = j;
    bool in_quote = false;
    char quote = 0;
    while (j < html.size()) {
        char c = html[j];
        if (in_quote) {
            if (c == quote) in_quote = false;
        } else if (c == '"' || c == '\'') {
            in_quote = true;
            quote = c;
        } else if (c == '>') {
            break;
        }
        ++j;
    }
    if (j >= html.size()) {
        tag.unterminated = true;
        tag.end = html.size();
        tag.attrs = html.substr(attrs_start);
        return tag;
    }
    tag.attrs = html.substr(attrs_start, j - attrs_start);
    if (!tag.attrs.empty() && tag.attrs.back() == '/') tag.self_closing = true;
    tag.end = j + 1;
    return tag;
}

std::optional<std::string> attr_value(const std::string& attrs, const std::string& name) {
    const std::string hay = lower(attrs);
    std::size_t pos = 0;
    while ((pos = hay.find(name, pos)) != std::string::npos) {
        // attribute name must stand alone
        if (pos > 0 && (std::isalnum(static_cast<unsigned char>(hay[pos - 1])) ||
                        hay[pos - 1] == '-')) {
            pos += name.size();
            continue;
        }
        std::size_t j = pos + name.size();
        while (j < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[j]))) ++j;
        if (j >= attrs.size() || attrs[j] != '=') {
            pos += name.size();
            continue;
        }
        ++j;
        while (j < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[j]))) ++j;
        if (j < attrs.size() && (attrs[j] == '"' || attrs[j] == '\'')) {
            const char quote = attrs[j];
            const std::size_t close = attrs.find(quote, j + 1);
            if (close == std::string::npos) return attrs.substr(j + 1);
            return attrs.substr(j + 1, close - j - 1);
        }
        std::size_t end = j;
        while (end < attrs.size() && !std::isspace(static_cast<unsigned char>(attrs[end])) &&
               attrs[end] != '>')
            ++end;
        return attrs.substr(j, end - j);
    }
    return std::nullopt;
}

struct HtmlText {
    std::string text;
    bool degraded = false;
};

HtmlText html_text(const std::string& html) {
    HtmlText result;
    std::string& out = result.text;
    std::size_t i = 0;
    while (i < html.size()) {
        const char c = html[i];
        if (c != '<') {
            out += c;
            ++i;
            continue;
        }
        if (html.compare(i, 4, "<!--") == 0) {
            const std::size_t end = html.find("-->", i + 4);
            if (end == std::string::npos) {
                result.degraded = true;
                break;
            }
            i = end + 3;
            continue;
        }
        if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
            const std::size_t end = html.find('>', i);
            if (end == std::string::npos) {
                result.degraded = true;
                break;
            }
            i = end + 1;
            continue;
        }
        if (i + 1 < html.size() && !std::isalpha(static_cast<unsigned char>(html[i + 1])) &&
            html[i + 1] != '/') {
            // Stray '<' in text.
            out += c;
            ++i;
            continue;
        }
        Tag tag = parse_tag(html, i);
        if (tag.unterminated) {
            result.degraded = true;
            break;
        }
        i = tag.end;
        if (!tag.closing && !tag.self_closing && kSkipTags.count(tag.name)) {
            // Swallow the payload up to the matching close tag.
            const std::string close = "</" + tag.name;
            const std::string hay = lower(html);
            const std::size_t end = hay.find(close, i);
            if (end == std::string::npos) {
                result.degraded = true;
                break;
            }
            const std::size_t gt = html.find('>', end);
            if (gt == std::string::npos) {
                result.degraded = true;
                break;
            }
            i = gt + 1;
            out += '\n';
            continue;
        }
        if (kBlockTags.count(tag.name)) out += '\n';
    }
    out = decode_entities(out);
    return result;
}

const std::set<std::string> kAbbrev = {
    "eg",  "ie",  "etc", "mr",  "mrs", "ms",  "dr",   "prof", "inc",
    "ltd", "co",  "corp", "vs", "st",  "no",  "approx", "dept", "jr",
    "sr",  "al",  "cf",  "resp", "vol", "sec", "para"};

bool is_abbreviation_before(const std::string& line, std::size_t dot) {
    // Collect the dotted word ending at `dot`, e.g. "e.g" or "Dr".
    std::size_t start = dot;
    while (start > 0) {
        const char c = line[start - 1];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '.')
            --start;
        else
            break;
    }
    std::string word;
    for (std::size_t k = start; k < dot; ++k)
        if (line[k] != '.') word += static_cast<char>(std::tolower(
                static_cast<unsigned char>(line[k])));
    if (word.empty()) return false;
    if (word.size() == 1) return true;  // initials: "J. Smith"
    return kAbbrev.count(word) > 0;
}

bool is_list_numbering(const std::string& line, std::size_t from, std::size_t dot) {
    // "1." / "2.3." style prefixes at the start of a sentence.
    for (std::size_t k = from; k < dot; ++k) {
        const char c = line[k];
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != ' ' &&
            c != ')' && c != '(')
            return false;
    }
    return true;
}

}  // namespace

PlaintextResult html_to_plaintext(const RawDocument& doc) {
    if (doc.kind != DocumentKind::policy_html)
        throw InputError("html_to_plaintext expects a policy_html document");
    if (doc.bytes.empty()) throw InputError("empty HTML document");
    HtmlText extracted = html_text(doc.bytes);
    PlaintextResult result;
    result.text = tidy_lines(extracted.text);
    result.degraded = extracted.degraded;
    if (result.text.empty())
        throw InputError("document '" + doc.app_id + "' has no visible text");
    return result;
}

std::vector<Anchor> extract_anchors(const std::string& html, const std::string& base_url) {
    std::vector<Anchor> anchors;
    const std::string hay = lower(html);
    std::size_t i = 0;
    while ((i = hay.find("<a", i)) != std::string::npos) {
        if (i + 2 < hay.size() && (std::isalnum(static_cast<unsigned char>(hay[i + 2])))) {
            i += 2;
            continue;  // <abbr>, <article>...
        }
        Tag tag = parse_tag(html, i);
        if (tag.unterminated) break;
        std::size_t close = hay.find("</a", tag.end);
        if (close == std::string::npos) close = hay.size();
        Anchor a;
        if (auto href = attr_value(tag.attrs, "href")) a.href = *href;
        HtmlText inner = html_text(html.substr(tag.end, close - tag.end));
        a.text = tidy_lines(inner.text);
        std::replace(a.text.begin(), a.text.end(), '\n', ' ');
        a.resolved = a.href.empty() ? "" : resolve_url(base_url, a.href);
        anchors.push_back(std::move(a));
        i = close;
    }
    return anchors;
}

namespace {

bool anchor_text_matches(const std::string& text, bool extended) {
    const std::string t = lower(text);
    if (t.find("privacy") != std::string::npos) return true;
    if (!extended) return false;
    for (const char* kw : {"notice", "terms", "legal", "statement", "disclaimer"})
        if (t.find(kw) != std::string::npos) return true;
    return false;
}

bool is_self_link(const std::string& href, const std::string& resolved,
                  const std::string& page_url) {
    if (!href.empty() && href[0] == '#') return true;
    if (resolved.empty()) return true;
    std::string a = resolved, b = page_url;
    const std::size_t ha = a.find('#');
    if (ha != std::string::npos) a = a.substr(0, ha);
    const std::size_t hb = b.find('#');
    if (hb != std::string::npos) b = b.substr(0, hb);
    return a == b;
}

}  // namespace

PrivacyLinkResult extract_privacy_links(const RawDocument& doc, bool extended_keywords) {
    if (doc.kind != DocumentKind::homepage_html)
        throw InputError("extract_privacy_links expects a homepage_html document");
    PrivacyLinkResult result;
    for (const auto& a : extract_anchors(doc.bytes, doc.source_url)) {
        if (!anchor_text_matches(a.text, extended_keywords)) continue;
        if (a.href.empty()) continue;
        const std::string scheme = a.href.substr(0, a.href.find(':'));
        if (scheme == "javascript" || scheme == "mailto" || scheme == "tel") continue;
        if (is_self_link(a.href, a.resolved, doc.source_url)) {
            result.fake_redirects.push_back(a.resolved.empty() ? doc.source_url
                                                               : a.resolved);
        } else if (std::find(result.urls.begin(), result.urls.end(), a.resolved) ==
                   result.urls.end()) {
            result.urls.push_back(a.resolved);
        }
    }
    return result;
}

// --- page store ---------------------------------------------------------

PageStore PageStore::open(const std::string& dir) {
    PageStore store;
    store.dir_ = dir;
    const fs::path index_path = fs::path(dir) / "index.json";
    std::ifstream in(index_path);
    if (!in) throw StoreError("page store index not found: " + index_path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw StoreError("page store index: " + std::string(e.what()));
    }
    for (const auto& [url, entry] : doc.value("pages", nlohmann::json::object()).items())
        store.index_[url] = {entry.at("file").get<std::string>(),
                             entry.value("fetched_at", "")};
    return store;
}

PageStore PageStore::create(const std::string& dir) {
    fs::create_directories(dir);
    PageStore store;
    store.dir_ = dir;
    store.save();
    return store;
}

bool PageStore::contains(const std::string& url) const {
    return index_.count(url) > 0;
}

std::optional<std::string> PageStore::get(const std::string& url) const {
    auto it = index_.find(url);
    if (it == index_.end()) return std::nullopt;
    std::ifstream in(fs::path(dir_) / it->second.file, std::ios::binary);
    if (!in) throw StoreError("page file missing: " + it->second.file);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::string fnv1a64_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

}  // namespace

void PageStore::add(const std::string& url, const std::string& html,
                    const std::string& fetched_at) {
    const std::string file = fnv1a64_hex(url) + ".html";
    std::ofstream out(fs::path(dir_) / file, std::ios::binary);
    if (!out) throw StoreError("cannot write page file: " + file);
    out << html;
    index_[url] = {file, fetched_at};
}

void PageStore::save() const {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    auto pages = nlohmann::ordered_json::object();
    for (const auto& [url, entry] : index_)
        pages[url] = {{"file", entry.file}, {"fetched_at", entry.fetched_at}};
    doc["pages"] = std::move(pages);
    std::ofstream out(fs::path(dir_) / "index.json");
    if (!out) throw StoreError("cannot write page store index in " + dir_);
    out << doc.dump(2) << "\n";
}

PrivacyLinkResult find_policy_links(const PageStore& store,
                                    const std::string& homepage_url, int max_hops,
                                    bool extended_keywords) {
    if (max_hops < 1) throw ConfigError("max_hops must be >= 1");
    PrivacyLinkResult result;
    std::set<std::string> visited;
    std::set<std::string> found;
    std::deque<std::pair<std::string, int>> queue;
    queue.emplace_back(homepage_url, 0);
    visited.insert(homepage_url);
    while (!queue.empty()) {
        auto [url, depth] = queue.front();
        queue.pop_front();
        auto html = store.get(url);
        if (!html) continue;
        RawDocument page{"", DocumentKind::homepage_html, *html, url};
        PrivacyLinkResult page_links = extract_privacy_links(page, extended_keywords);
        for (const auto& u : page_links.urls) {
            if (found.insert(u).second) result.urls.push_back(u);
        }
        for (const auto& u : page_links.fake_redirects)
            result.fake_redirects.push_back(u);
        if (depth + 1 >= max_hops) continue;
        for (const auto& a : extract_anchors(*html, url)) {
            if (a.resolved.empty()) continue;
            if (!store.contains(a.resolved)) continue;
            if (visited.insert(a.resolved).second)
                queue.emplace_back(a.resolved, depth + 1);
        }
    }
    return result;
}

// --- sentence segmentation ----------------------------------------------

std::vector<Sentence> segment_sentences(const std::string& text) {
    if (text.empty()) throw InputError("segment_sentences: empty input");
    std::vector<Sentence> sentences;
    auto emit = [&](const std::string& raw) {
        // Collapse internal whitespace; never drop non-whitespace.
        std::string out;
        bool in_ws = true;
        for (char c : raw) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!in_ws) out += ' ';
                in_ws = true;
            } else {
                out += c;
                in_ws = false;
            }
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        if (!out.empty()) sentences.push_back({sentences.size(), out});
    };

    std::string line;
    auto process_line = [&]() {
        std::size_t start = 0;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (c != '.' && c != '?' && c != '!') continue;
            if (c == '.') {
                const bool decimal =
                    i > 0 && i + 1 < line.size() &&
                    std::isdigit(static_cast<unsigned char>(line[i - 1])) &&
                    std::isdigit(static_cast<unsigned char>(line[i + 1]));
                if (decimal) continue;
                if (is_abbreviation_before(line, i)) continue;
                if (is_list_numbering(line, start, i)) continue;
                // Swallow ellipsis runs.
                while (i + 1 < line.size() && line[i + 1] == '.') ++i;
            }
            // Attach closing quotes/brackets to this sentence.
            while (i + 1 < line.size() &&
                   (line[i + 1] == '"' || line[i + 1] == '\'' || line[i + 1] == ')' ||
                    line[i + 1] == ']'))
                ++i;
            emit(line.substr(start, i - start + 1));
            start = i + 1;
        }
        if (start < line.size()) emit(line.substr(start));
        line.clear();
    };

    for (char c : text) {
        if (c == '\n')
            process_line();
        else
            line += c;
    }
    process_line();
    return sentences;
}

PolicyDocument make_policy_document(const RawDocument& doc) {
    PolicyDocument out;
    out.app_id = doc.app_id;
    out.provenance.source_url = doc.source_url;
    if (doc.kind == DocumentKind::policy_html) {
        PlaintextResult plain = html_to_plaintext(doc);
        out.provenance.source_kind = "html";
        out.provenance.degraded = plain.degraded;
        out.sentences = segment_sentences(plain.text);
    } else if (doc.kind == DocumentKind::policy_text) {
        if (doc.bytes.empty()) throw InputError("empty policy text");
        out.provenance.source_kind = "text";
        out.sentences = segment_sentences(doc.bytes);
    } else {
        throw InputError("make_policy_document expects policy_html or policy_text");
    }
    return out;
}

// --- URLs ----------------------------------------------------------------

std::string resolve_url(const std::string& base, const std::string& href) {
    if (href.empty()) return base;
    const std::size_t scheme_end = href.find("://");
    if (scheme_end != std::string::npos && scheme_end < 10) return href;

    std::string base_scheme = "https";
    std::string rest = base;
    const std::size_t base_scheme_end = base.find("://");
    if (base_scheme_end != std::string::npos) {
        base_scheme = base.substr(0, base_scheme_end);
        rest = base.substr(base_scheme_end + 3);
    }
    const std::size_t slash = rest.find('/');
    const std::string host = slash == std::string::npos ? rest : rest.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : rest.substr(slash);

    if (href.rfind("//", 0) == 0) return base_scheme + ":" + href;
    if (href[0] == '/') return base_scheme + "://" + host + href;
    if (href[0] == '#') return base_scheme + "://" + host + path + href;
    if (href[0] == '?') {
        const std::size_t q = path.find('?');
        if (q != std::string::npos) path = path.substr(0, q);
        return base_scheme + "://" + host + path + href;
    }
    // Relative path: resolve against the base directory.
    std::size_t dir_end = path.rfind('/');
    std::string dir = dir_end == std::string::npos ? "/" : path.substr(0, dir_end + 1);
    std::string merged = dir + href;
    // Fold "./" and "../" segments.
    std::vector<std::string> parts;
    std::string seg;
    for (std::size_t i = 1; i <= merged.size(); ++i) {
        if (i == merged.size() || merged[i] == '/') {
            if (seg == "..") {
                if (!parts.empty()) parts.pop_back();
            } else if (!seg.empty() && seg != ".") {
                parts.push_back(seg);
            }
            seg.clear();
        } else {
            seg += merged[i];
        }
    }
    std::string out = base_scheme + "://" + host;
    for (const auto& p : parts) out += "/" + p;
    if (parts.empty()) out += "/";
    return out;
}

std::string url_host(const std::string& url) {
    std::string rest = url;
    const std::size_t scheme_end = url.find("://");
    if (scheme_end != std::string::npos) rest = url.substr(scheme_end + 3);
    const std::size_t slash = rest.find_first_of("/?#");
    return lower(slash == std::string::npos ? rest : rest.substr(0, slash));
}

std::string registrable_label(const std::string& url) {
    std::string host = url_host(url);
    // host "www.vrchat.com" -> labels [www, vrchat, com]
    std::vector<std::string> labels;
    std::string cur;
    for (char c : host) {
        if (c == '.') {
            labels.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    labels.push_back(cur);
    static const std::set<std::string> kPublic = {"com", "net",  "org", "io",  "co",
                                                  "uk",  "gov",  "edu", "app", "dev",
                                                  "gg",  "info", "biz", "us"};
    for (auto it = labels.rbegin(); it != labels.rend(); ++it) {
        if (it->empty()) continue;
        if (!kPublic.count(*it)) return *it;
    }
    return host;
}

}  // namespace ppvet
