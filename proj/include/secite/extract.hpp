#ifndef SECITE_EXTRACT_HPP
#define SECITE_EXTRACT_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "secite/corpus.hpp"
#include "secite/textprep.hpp"
#include "secite/util.hpp"

namespace secite {

struct MarkerGroup {
    std::size_t begin = 0;  // byte offsets within the sentence, '[' .. ']' inclusive
    std::size_t end = 0;    // exclusive
    std::set<int> numbers;
};

struct CitationContext {
    std::string doc_id;
    std::size_t sentence_index = 0;
    std::string text;
    std::vector<MarkerGroup> marker_groups;
    std::set<int> target_numbers;
};

namespace detail {

// U+2013 EN DASH, handled as '-'.
inline std::string replace_en_dash(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
            static_cast<unsigned char>(s[i + 1]) == 0x80 &&
            static_cast<unsigned char>(s[i + 2]) == 0x93) {
            out.push_back('-');
            i += 3;
        } else {
            out.push_back(s[i]);
            ++i;
        }
    }
    return out;
}

inline std::optional<int> parse_int(std::string_view s) {
    if (s.empty() || s.size() > 8) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace detail

// Expands the inside of one bracket pair: comma-separated singletons "n" and
// inclusive ranges "a-b" (en-dash allowed). Returns nullopt when any item is
// malformed; the whole group is then skipped.
inline std::optional<std::set<int>> expand_marker(std::string_view marker_text) {
    const std::string normalized = detail::replace_en_dash(marker_text);
    std::set<int> numbers;
    for (const std::string& raw_item : split(normalized, ',')) {
        const std::string item = trim(raw_item);
        if (item.empty()) return std::nullopt;
        const std::size_t dash = item.find('-');
        if (dash == std::string::npos) {
            const auto n = detail::parse_int(item);
            if (!n || *n < 1) return std::nullopt;
            numbers.insert(*n);
        } else {
            const auto a = detail::parse_int(trim(item.substr(0, dash)));
            const auto b = detail::parse_int(trim(item.substr(dash + 1)));
            if (!a || !b || *a < 1 || *a > *b) return std::nullopt;
            for (int v = *a; v <= *b; ++v) numbers.insert(v);
        }
    }
    if (numbers.empty()) return std::nullopt;
    return numbers;
}

namespace detail {

// A bracket's content is a marker candidate when it holds digits and list
// syntax only; "[CLS]"-style brackets are ignored without a warning.
inline bool marker_candidate(std::string_view inside) {
    bool has_digit = false;
    const std::string normalized = replace_en_dash(inside);
    for (char c : normalized) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            has_digit = true;
        } else if (c != ',' && c != '-' && !is_ascii_space(c)) {
            return false;
        }
    }
    return has_digit;
}

}  // namespace detail

inline std::vector<MarkerGroup> find_marker_groups(std::string_view sentence,
                                                   WarningLog* warnings = nullptr) {
    std::vector<MarkerGroup> groups;
    std::size_t i = 0;
    while (i < sentence.size()) {
        if (sentence[i] != '[') {
            ++i;
            continue;
        }
        const std::size_t close = sentence.find(']', i + 1);
        if (close == std::string_view::npos) break;
        const std::string_view inside = sentence.substr(i + 1, close - i - 1);
        if (detail::marker_candidate(inside)) {
            if (auto numbers = expand_marker(inside)) {
                groups.push_back(MarkerGroup{i, close + 1, std::move(*numbers)});
            } else {
                warn(warnings, "invalid citation marker \"[" + std::string(inside) + "]\" skipped");
            }
        }
        i = close + 1;
    }
    return groups;
}

namespace detail {

// Lowercase, punctuation to spaces, collapse whitespace.
inline std::vector<std::string> normalize_tokens(std::string_view s) {
    std::string buf;
    buf.reserve(s.size());
    for (char c : s) {
        const unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            buf.push_back(static_cast<char>(std::tolower(u)));
        } else {
            buf.push_back(' ');
        }
    }
    return split_whitespace(buf);
}

}  // namespace detail

// Reference entries whose normalized text contains at least 80% of the
// normalized target-title tokens (multiset containment) denote the target.
inline std::set<int> resolve_target_reference(const Document& doc, const TargetPaper& target,
                                              double threshold = 0.8) {
    std::set<int> out;
    const std::vector<std::string> title_tokens = detail::normalize_tokens(target.title);
    if (title_tokens.empty()) return out;

    std::map<std::string, int> title_counts;
    for (const auto& t : title_tokens) ++title_counts[t];

    for (const ReferenceEntry& entry : doc.references) {
        std::map<std::string, int> entry_counts;
        for (const auto& t : detail::normalize_tokens(entry.raw_string)) ++entry_counts[t];
        std::size_t covered = 0;
        for (const auto& [tok, cnt] : title_counts) {
            auto it = entry_counts.find(tok);
            if (it != entry_counts.end()) covered += std::min(cnt, it->second);
        }
        const double coverage = static_cast<double>(covered) / title_tokens.size();
        if (coverage >= threshold) out.insert(entry.number);
    }
    return out;
}

namespace detail {

// One warning per document when parenthesized author-year citations show up;
// that style has no numeric resolver here.
inline bool looks_author_year(std::string_view sentence) {
    std::size_t i = 0;
    while ((i = sentence.find('(', i)) != std::string_view::npos) {
        const std::size_t close = sentence.find(')', i + 1);
        if (close == std::string_view::npos) break;
        const std::string_view inside = sentence.substr(i + 1, close - i - 1);
        for (std::size_t j = 0; j + 4 <= inside.size(); ++j) {
            if (std::isdigit(static_cast<unsigned char>(inside[j])) &&
                std::isdigit(static_cast<unsigned char>(inside[j + 1])) &&
                std::isdigit(static_cast<unsigned char>(inside[j + 2])) &&
                std::isdigit(static_cast<unsigned char>(inside[j + 3]))) {
                const int year = (inside[j] - '0') * 1000 + (inside[j + 1] - '0') * 100 +
                                 (inside[j + 2] - '0') * 10 + (inside[j + 3] - '0');
                const bool word_before = j > 0 && (inside[j - 1] == ' ' || inside[j - 1] == ',');
                if (year >= 1900 && year <= 2099 && word_before) return true;
            }
        }
        i = close + 1;
    }
    return false;
}

}  // namespace detail

struct ExtractionOutput {
    std::vector<CitationContext> contexts;
    std::size_t dedup_count = 0;
    std::vector<std::string> warnings;
};

// Scans every sentence of the document for bracket markers and keeps those
// whose expanded numbers intersect target_numbers. Duplicates (identical
// cleaned text) within the document are dropped and counted.
inline ExtractionOutput extract_citation_contexts(
    const Document& doc, const std::set<int>& target_numbers,
    const std::set<std::string>& stopwords = default_stopwords()) {
    ExtractionOutput out;
    if (target_numbers.empty()) return out;
    WarningLog log;
    bool author_year_warned = false;
    std::unordered_set<std::string> seen_cleaned;

    for (const Sentence& sentence : doc.sentences) {
        // Citing sentences live in the body; bibliography entries carry the
        // same "[n]" syntax but are not citation contexts.
        if (sentence.begin >= doc.reference_section_begin) break;
        if (!author_year_warned && detail::looks_author_year(sentence.text)) {
            log.add("author-year citation style detected; only bracketed numeric markers are resolved");
            author_year_warned = true;
        }
        std::vector<MarkerGroup> groups = find_marker_groups(sentence.text, &log);
        if (groups.empty()) continue;
        std::set<int> hit;
        for (const MarkerGroup& g : groups) {
            for (int n : g.numbers) {
                if (target_numbers.count(n)) hit.insert(n);
            }
        }
        if (hit.empty()) continue;

        const std::string cleaned = clean_text(sentence.text, stopwords).cleaned_text;
        if (!seen_cleaned.insert(cleaned).second) {
            ++out.dedup_count;
            continue;
        }
        CitationContext ctx;
        ctx.doc_id = doc.id;
        ctx.sentence_index = sentence.index;
        ctx.text = sentence.text;
        ctx.marker_groups = std::move(groups);
        ctx.target_numbers = std::move(hit);
        out.contexts.push_back(std::move(ctx));
    }
    out.warnings = std::move(log.items);
    return out;
}

namespace detail {

// Words that introduce an enumerated clause rather than belonging to it.
inline const std::unordered_set<std::string>& clause_connectors() {
    static const std::unordered_set<std::string> kConnectors = {
        "from", "including", "include", "includes", "involving", "like", "such",
        "as",   "in",        "on",      "of",       "with",      "via",  "using",
        "by",   "and",       "or",      "to",       "for",       "per",  "through",
        "at",   "are",       "is",      "namely",   "eg",        "e",    "g",
    };
    return kConnectors;
}

inline std::string strip_word_punct(std::string_view w) {
    std::size_t b = 0, e = w.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(w[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(w[e - 1]))) --e;
    return to_lower_ascii(w.substr(b, e - b));
}

struct TrimSegment {
    std::size_t begin = 0;  // into the sentence body
    std::size_t end = 0;
    char delim_after = '\0';  // ',' or ';' following this segment, if any
    std::vector<std::size_t> group_indices;
};

}  // namespace detail

// When the sentence is a comma/semicolon-separated enumeration of
// clause+marker units, keeps the sentence head plus only the units whose
// markers intersect the target numbers. Anything else is returned unchanged.
inline CitationContext trim_context(const CitationContext& ctx) {
    if (ctx.marker_groups.size() < 2) return ctx;

    const std::string& text = ctx.text;
    // Peel trailing terminal punctuation / closing quotes.
    std::size_t body_end = text.size();
    while (body_end > 0) {
        const char c = text[body_end - 1];
        if (c == '.' || c == '!' || c == '?' || c == '"' || c == '\'' || c == ')' ||
            is_ascii_space(c)) {
            --body_end;
        } else {
            break;
        }
    }
    const std::string tail = text.substr(body_end);

    // Split at top-level ',' and ';' (outside brackets).
    std::vector<detail::TrimSegment> segments;
    {
        detail::TrimSegment cur;
        cur.begin = 0;
        int depth = 0;
        for (std::size_t i = 0; i < body_end; ++i) {
            const char c = text[i];
            if (c == '[') ++depth;
            if (c == ']' && depth > 0) --depth;
            if (depth == 0 && (c == ',' || c == ';')) {
                cur.end = i;
                cur.delim_after = c;
                segments.push_back(cur);
                cur = detail::TrimSegment{};
                cur.begin = i + 1;
            }
        }
        cur.end = body_end;
        segments.push_back(cur);
    }
    if (segments.size() < 2) return ctx;

    // Map marker groups into segments; a unit segment holds exactly one group
    // and nothing but whitespace after it.
    for (std::size_t gi = 0; gi < ctx.marker_groups.size(); ++gi) {
        const MarkerGroup& g = ctx.marker_groups[gi];
        for (auto& seg : segments) {
            if (g.begin >= seg.begin && g.end <= seg.end) {
                seg.group_indices.push_back(gi);
                break;
            }
        }
    }
    auto is_unit = [&](const detail::TrimSegment& seg) {
        if (seg.group_indices.size() != 1) return false;
        const MarkerGroup& g = ctx.marker_groups[seg.group_indices[0]];
        for (std::size_t i = g.end; i < seg.end; ++i) {
            if (!is_ascii_space(text[i])) return false;
        }
        return true;
    };

    // The enumeration is the maximal trailing run of unit segments; everything
    // before it must be marker-free or the structure is ambiguous.
    std::size_t run_start = segments.size();
    while (run_start > 0 && is_unit(segments[run_start - 1])) --run_start;
    const std::size_t run_len = segments.size() - run_start;
    if (run_len < 2) return ctx;
    for (std::size_t i = 0; i < run_start; ++i) {
        if (!segments[i].group_indices.empty()) return ctx;
    }

    // Select the units carrying target markers.
    std::vector<std::size_t> selected;
    for (std::size_t i = run_start; i < segments.size(); ++i) {
        const MarkerGroup& g = ctx.marker_groups[segments[i].group_indices[0]];
        for (int n : g.numbers) {
            if (ctx.target_numbers.count(n)) {
                selected.push_back(i);
                break;
            }
        }
    }
    if (selected.empty() || selected.size() == run_len) return ctx;

    // Clause start inside a unit: skip leading whitespace and a leading
    // coordinator; for the first unit, also walk back from the marker across
    // non-connector words so the shared sentence head stays in place.
    auto clause_begin = [&](std::size_t seg_index) -> std::size_t {
        const detail::TrimSegment& seg = segments[seg_index];
        std::size_t b = seg.begin;
        while (b < seg.end && is_ascii_space(text[b])) ++b;
        if (seg_index != run_start) {
            // strip one leading coordinator ("and", "or")
            std::size_t we = b;
            while (we < seg.end && !is_ascii_space(text[we])) ++we;
            const std::string w = detail::strip_word_punct(text.substr(b, we - b));
            if (w == "and" || w == "or") {
                while (we < seg.end && is_ascii_space(text[we])) ++we;
                b = we;
            }
            return b;
        }
        // First unit: words between b and the marker, scanned backward.
        const MarkerGroup& g = ctx.marker_groups[seg.group_indices[0]];
        std::vector<std::pair<std::size_t, std::size_t>> words;
        std::size_t i = b;
        while (i < g.begin) {
            while (i < g.begin && is_ascii_space(text[i])) ++i;
            std::size_t ws = i;
            while (i < g.begin && !is_ascii_space(text[i])) ++i;
            if (i > ws) words.emplace_back(ws, i);
        }
        std::size_t start = b;  // all words in the clause unless a connector cuts it
        for (std::size_t w = words.size(); w-- > 0;) {
            const std::string word =
                detail::strip_word_punct(text.substr(words[w].first, words[w].second - words[w].first));
            if (detail::clause_connectors().count(word)) {
                start = (w + 1 < words.size()) ? words[w + 1].first
                                               : g.begin;  // connector right before the marker
                break;
            }
        }
        return start;
    };

    // Rebuild: head (everything before the first unit's clause) + selected
    // clauses joined with the original delimiter style.
    const std::size_t head_end = clause_begin(run_start);
    std::string out = text.substr(0, head_end);
    const char join_delim = segments[run_start].delim_after ? segments[run_start].delim_after : ',';
    bool first = true;
    for (std::size_t seg_index : selected) {
        const detail::TrimSegment& seg = segments[seg_index];
        const MarkerGroup& g = ctx.marker_groups[seg.group_indices[0]];
        const std::size_t cb = (seg_index == run_start) ? head_end : clause_begin(seg_index);
        if (!first) {
            out.push_back(join_delim);
            out.push_back(' ');
        }
        out += text.substr(cb, g.end - cb);
        first = false;
    }
    out += tail;

    CitationContext trimmed;
    trimmed.doc_id = ctx.doc_id;
    trimmed.sentence_index = ctx.sentence_index;
    trimmed.text = std::move(out);
    trimmed.marker_groups = find_marker_groups(trimmed.text);
    std::set<int> remaining;
    for (const MarkerGroup& g : trimmed.marker_groups) {
        for (int n : g.numbers) {
            if (ctx.target_numbers.count(n)) remaining.insert(n);
        }
    }
    trimmed.target_numbers = std::move(remaining);
    return trimmed;
}

struct ManualContextLine {
    std::string doc_id;
    std::string sentence;
};

// Manual-context merge file: one citation sentence per line,
// "doc_id<TAB>sentence". Blank lines skipped; lines without a TAB warned.
inline std::vector<ManualContextLine> parse_manual_contexts(const std::string& path,
                                                            WarningLog* warnings = nullptr) {
    std::string content;
    if (!read_file(path, content)) {
        throw std::runtime_error("cannot read manual context file: " + path);
    }
    std::vector<ManualContextLine> out;
    std::size_t lineno = 0;
    for (const std::string& line : split(content, '\n')) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            warn(warnings, "manual context line " + std::to_string(lineno) + " has no TAB separator; skipped");
            continue;
        }
        ManualContextLine m;
        m.doc_id = trim(line.substr(0, tab));
        m.sentence = trim(line.substr(tab + 1));
        if (m.doc_id.empty() || m.sentence.empty()) {
            warn(warnings, "manual context line " + std::to_string(lineno) + " is incomplete; skipped");
            continue;
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace secite

#endif  // SECITE_EXTRACT_HPP
