#ifndef SECITE_CORPUS_HPP
#define SECITE_CORPUS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "secite/util.hpp"

namespace secite {

struct TargetPaper {
    std::string id;
    std::string title;
    std::optional<std::string> full_text;
};

struct Sentence {
    std::size_t index = 0;
    std::string text;
    std::size_t begin = 0;  // byte offsets into Document::raw_text
    std::size_t end = 0;    // exclusive
};

struct ReferenceEntry {
    int number = 0;
    std::string raw_string;  // bibliography line with the leading marker removed
};

enum class DocumentStatus { Parsed, ParseFailed };

struct Document {
    std::string id;
    std::string source_path;
    std::string raw_text;
    std::vector<Sentence> sentences;
    std::vector<ReferenceEntry> references;
    // Byte offset of the References/Bibliography heading; body text (where
    // citing sentences live) ends here. npos when no heading exists.
    std::size_t reference_section_begin = std::string::npos;
    DocumentStatus status = DocumentStatus::Parsed;
    std::string failure_reason;
    std::vector<std::string> warnings;
};

struct Corpus {
    TargetPaper target;
    std::vector<Document> documents;
    std::vector<std::string> warnings;
};

// Abbreviations whose trailing period never ends a sentence.
inline const std::vector<std::string>& sentence_abbreviations() {
    static const std::vector<std::string> kAbbrev = {
        "et al.", "e.g.", "i.e.", "vs.", "cf.", "al.",
        "Fig.",   "Figs.", "Eq.",  "Eqs.", "Sec.", "Tab.",
        "No.",    "Vol.",  "pp.",  "Dr.",  "Mr.",  "Mrs.",
        "Ms.",    "Prof.", "St.",
    };
    return kAbbrev;
}

namespace detail {

inline bool ends_with_abbreviation(std::string_view text_upto_dot) {
    for (const std::string& abbr : sentence_abbreviations()) {
        if (text_upto_dot.size() < abbr.size()) continue;
        const std::string_view tail = text_upto_dot.substr(text_upto_dot.size() - abbr.size());
        if (!ieq(tail, abbr)) continue;
        // Require a word boundary before the abbreviation ("final." must not
        // match "al.").
        const std::size_t before = text_upto_dot.size() - abbr.size();
        if (before == 0) return true;
        const unsigned char prev = static_cast<unsigned char>(text_upto_dot[before - 1]);
        if (!std::isalpha(prev)) return true;
    }
    return false;
}

inline bool is_terminal_punct(char c) { return c == '.' || c == '!' || c == '?'; }

inline bool is_closing_char(char c) { return c == '"' || c == '\'' || c == ')'; }

}  // namespace detail

// Rule-based splitter: a sentence ends at '.', '!' or '?' (plus adjoining
// closing quotes/parens) when followed by whitespace and an uppercase letter,
// digit or '['. Abbreviations from sentence_abbreviations() suppress splits.
// Spans cover every non-whitespace byte of the input.
inline std::vector<Sentence> segment_sentences(std::string_view raw_text) {
    std::vector<Sentence> out;
    const std::size_t n = raw_text.size();
    std::size_t pos = 0;

    auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && is_ascii_space(raw_text[begin])) ++begin;
        while (end > begin && is_ascii_space(raw_text[end - 1])) --end;
        if (begin >= end) return;
        Sentence s;
        s.index = out.size();
        s.begin = begin;
        s.end = end;
        s.text = std::string(raw_text.substr(begin, end - begin));
        out.push_back(std::move(s));
    };

    std::size_t sentence_start = 0;
    while (pos < n) {
        const char c = raw_text[pos];
        if (!detail::is_terminal_punct(c)) {
            ++pos;
            continue;
        }
        // Consume a run of terminal punctuation ("?!", "...") as one ending.
        std::size_t end = pos + 1;
        while (end < n && detail::is_terminal_punct(raw_text[end])) ++end;
        while (end < n && detail::is_closing_char(raw_text[end])) ++end;

        bool boundary = false;
        if (end >= n) {
            boundary = true;
        } else if (is_ascii_space(raw_text[end])) {
            std::size_t next = end;
            while (next < n && is_ascii_space(raw_text[next])) ++next;
            if (next < n) {
                const unsigned char nc = static_cast<unsigned char>(raw_text[next]);
                boundary = std::isupper(nc) || std::isdigit(nc) || nc == '[';
            } else {
                boundary = true;  // trailing whitespace only
            }
        }
        if (boundary && raw_text[pos] == '.' && end == pos + 1 &&
            detail::ends_with_abbreviation(raw_text.substr(0, pos + 1))) {
            boundary = false;
        }
        if (boundary) {
            emit(sentence_start, end);
            sentence_start = end;
        }
        pos = end;
    }
    emit(sentence_start, n);
    return out;
}

namespace detail {

// Line-initial "[n]" entry marker; returns text after the marker.
inline bool parse_bracket_entry(std::string_view line, int& number, std::string& rest) {
    std::size_t i = 0;
    while (i < line.size() && is_ascii_space(line[i])) ++i;
    if (i >= line.size() || line[i] != '[') return false;
    ++i;
    std::size_t d = i;
    while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
    if (d == i || d >= line.size() || line[d] != ']') return false;
    const std::string digits(line.substr(i, d - i));
    if (digits.size() > 9) return false;
    number = std::stoi(digits);
    rest = trim(line.substr(d + 1));
    return true;
}

// Line-initial "n." entry marker (requires whitespace after the dot so years
// like "2008." inside wrapped lines are less likely to match).
inline bool parse_dotted_entry(std::string_view line, int& number, std::string& rest) {
    std::size_t i = 0;
    while (i < line.size() && is_ascii_space(line[i])) ++i;
    std::size_t d = i;
    while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
    if (d == i || d - i > 4) return false;
    if (d >= line.size() || line[d] != '.') return false;
    if (d + 1 >= line.size() || !is_ascii_space(line[d + 1])) return false;
    number = std::stoi(std::string(line.substr(i, d - i)));
    rest = trim(line.substr(d + 1));
    return true;
}

inline bool is_reference_heading(std::string_view line) {
    std::string t = trim(line);
    if (!t.empty() && t.back() == ':') t.pop_back();
    t = trim(t);
    return ieq(t, "references") || ieq(t, "bibliography");
}

}  // namespace detail

// Byte offset of the last "References"/"Bibliography" heading line, or npos.
inline std::size_t reference_section_offset(std::string_view raw_text) {
    std::size_t found = std::string_view::npos;
    std::size_t pos = 0;
    while (pos <= raw_text.size()) {
        std::size_t nl = raw_text.find('\n', pos);
        if (nl == std::string_view::npos) nl = raw_text.size();
        if (detail::is_reference_heading(raw_text.substr(pos, nl - pos))) found = pos;
        if (nl == raw_text.size()) break;
        pos = nl + 1;
    }
    return found;
}

// Locates the last "References"/"Bibliography" heading and splits the section
// below it into numbered entries ("[n]" or "n." styles). Duplicate numbers
// keep the first entry and record a warning.
inline std::vector<ReferenceEntry> parse_reference_list(std::string_view raw_text,
                                                        WarningLog* warnings = nullptr) {
    std::vector<std::string> lines = split(raw_text, '\n');
    std::size_t heading = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (detail::is_reference_heading(lines[i])) heading = i;
    }
    std::vector<ReferenceEntry> entries;
    if (heading == lines.size()) return entries;

    std::map<int, std::size_t> seen;
    int current = -1;
    std::string body;

    auto flush = [&]() {
        if (current < 0) return;
        const std::string text = normalize_whitespace(body);
        if (text.empty()) {
            warn(warnings, "reference entry [" + std::to_string(current) + "] has no text; skipped");
        } else if (seen.count(current)) {
            warn(warnings,
                 "duplicate reference number " + std::to_string(current) + "; keeping first entry");
        } else {
            seen[current] = entries.size();
            entries.push_back(ReferenceEntry{current, text});
        }
        current = -1;
        body.clear();
    };

    for (std::size_t i = heading + 1; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        int number = 0;
        std::string rest;
        if (detail::parse_bracket_entry(line, number, rest) ||
            detail::parse_dotted_entry(line, number, rest)) {
            flush();
            if (number < 1) {
                warn(warnings, "reference number " + std::to_string(number) + " out of range; skipped");
                continue;
            }
            current = number;
            body = rest;
        } else if (current >= 0) {
            body += ' ';
            body += line;
        }
    }
    flush();
    return entries;
}

namespace detail {

inline Document build_document(std::string id, std::string path) {
    Document doc;
    doc.id = std::move(id);
    doc.source_path = std::move(path);
    std::string content;
    if (!read_file(doc.source_path, content)) {
        doc.status = DocumentStatus::ParseFailed;
        doc.failure_reason = "cannot read file: " + doc.source_path;
        return doc;
    }
    if (!utf8_valid(content)) {
        doc.status = DocumentStatus::ParseFailed;
        doc.failure_reason = "invalid UTF-8: " + doc.source_path;
        return doc;
    }
    doc.raw_text = std::move(content);
    doc.sentences = segment_sentences(doc.raw_text);
    doc.reference_section_begin = reference_section_offset(doc.raw_text);
    WarningLog log;
    doc.references = parse_reference_list(doc.raw_text, &log);
    doc.warnings = std::move(log.items);
    doc.status = DocumentStatus::Parsed;
    return doc;
}

}  // namespace detail

// Manifest schema (JSON):
//   { "target": { "id": "...", "title": "...", "full_text_path": "..."? },
//     "documents": [ { "id": "...", "path": "..." }, ... ] }
// Relative paths resolve against the manifest's directory. A missing or
// malformed manifest throws; unreadable documents become parse_failed entries.
inline Corpus ingest_corpus(const std::string& manifest_path) {
    std::string manifest_text;
    if (!read_file(manifest_path, manifest_text)) {
        throw std::runtime_error("cannot read manifest: " + manifest_path);
    }
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(manifest_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("malformed manifest " + manifest_path + ": " + e.what());
    }
    if (!m.is_object() || !m.contains("target") || !m["target"].is_object()) {
        throw std::runtime_error("malformed manifest: missing \"target\" object");
    }
    const auto& t = m["target"];
    if (!t.contains("id") || !t["id"].is_string() || !t.contains("title") ||
        !t["title"].is_string()) {
        throw std::runtime_error("malformed manifest: target requires string \"id\" and \"title\"");
    }

    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    Corpus corpus;
    corpus.target.id = t["id"].get<std::string>();
    corpus.target.title = t["title"].get<std::string>();
    if (normalize_whitespace(corpus.target.title).empty()) {
        throw std::runtime_error("malformed manifest: target title is empty");
    }
    if (t.contains("full_text_path") && t["full_text_path"].is_string()) {
        const std::string p = resolve(t["full_text_path"].get<std::string>());
        std::string full_text;
        if (read_file(p, full_text) && utf8_valid(full_text)) {
            corpus.target.full_text = std::move(full_text);
        } else {
            corpus.warnings.push_back("target full text unreadable or not UTF-8: " + p);
        }
    }

    if (!m.contains("documents") || !m["documents"].is_array()) {
        throw std::runtime_error("malformed manifest: missing \"documents\" array");
    }
    for (const auto& d : m["documents"]) {
        if (!d.is_object() || !d.contains("id") || !d["id"].is_string() || !d.contains("path") ||
            !d["path"].is_string()) {
            throw std::runtime_error("malformed manifest: each document requires string \"id\" and \"path\"");
        }
        corpus.documents.push_back(
            detail::build_document(d["id"].get<std::string>(), resolve(d["path"].get<std::string>())));
    }
    if (corpus.documents.empty()) {
        corpus.warnings.push_back("manifest lists no documents; corpus is empty");
    }
    return corpus;
}

inline std::size_t count_parsed(const Corpus& corpus) {
    std::size_t n = 0;
    for (const auto& d : corpus.documents) {
        if (d.status == DocumentStatus::Parsed) ++n;
    }
    return n;
}

}  // namespace secite

#endif  // SECITE_CORPUS_HPP
