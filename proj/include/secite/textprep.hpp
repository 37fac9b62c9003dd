#ifndef SECITE_TEXTPREP_HPP
#define SECITE_TEXTPREP_HPP

#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "secite/util.hpp"

namespace secite {

// Default stopword list (common English function words). Overridable via
// load_stopwords(); the same list ships as data/stopwords.txt.
inline const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> kStopwords = {
        "a",       "about",   "above",  "after",   "again",   "against", "all",     "am",
        "an",      "and",     "any",    "are",     "as",      "at",      "be",      "because",
        "been",    "before",  "being",  "below",   "between", "both",    "but",     "by",
        "can",     "cannot",  "could",  "did",     "do",      "does",    "doing",   "down",
        "during",  "each",    "few",    "for",     "from",    "further", "had",     "has",
        "have",    "having",  "he",     "her",     "here",    "hers",    "herself", "him",
        "himself", "his",     "how",    "i",       "if",      "in",      "into",    "is",
        "it",      "its",     "itself", "just",    "me",      "more",    "most",    "my",
        "myself",  "no",      "nor",    "not",     "now",     "of",      "off",     "on",
        "once",    "only",    "or",     "other",   "our",     "ours",    "ourselves",
        "out",     "over",    "own",    "same",    "she",     "should",  "so",      "some",
        "such",    "than",    "that",   "the",     "their",   "theirs",  "them",    "themselves",
        "then",    "there",   "these",  "they",    "this",    "those",   "through", "to",
        "too",     "under",   "until",  "up",      "very",    "was",     "we",      "were",
        "what",    "when",    "where",  "which",   "while",   "who",     "whom",    "why",
        "will",    "with",    "would",  "you",     "your",    "yours",   "yourself",
        "yourselves",
    };
    return kStopwords;
}

// Stopword / lexicon file format: UTF-8, one word per line, '#' comments.
inline std::set<std::string> load_wordlist(const std::string& path) {
    std::string content;
    if (!read_file(path, content)) {
        throw std::runtime_error("cannot read word list: " + path);
    }
    std::set<std::string> words;
    for (const std::string& line : split(content, '\n')) {
        const std::size_t hash = line.find('#');
        const std::string word = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (!word.empty()) words.insert(to_lower_ascii(word));
    }
    return words;
}

inline std::set<std::string> load_stopwords(const std::string& path) { return load_wordlist(path); }

namespace detail {

// Fold common accented Latin code points to ASCII; anything else non-ASCII
// is dropped by the caller.
inline const char* ascii_fold(char32_t cp) {
    switch (cp) {
        case U'À': case U'Á': case U'Â': case U'Ã': case U'Ä': case U'Å':
        case U'à': case U'á': case U'â': case U'ã': case U'ä': case U'å':
        case U'Ā': case U'ā': case U'Ă': case U'ă': case U'Ą': case U'ą':
            return "a";
        case U'Ç': case U'ç': case U'Ć': case U'ć': case U'Č': case U'č':
            return "c";
        case U'È': case U'É': case U'Ê': case U'Ë':
        case U'è': case U'é': case U'ê': case U'ë':
        case U'Ē': case U'ē': case U'Ė': case U'ė': case U'Ę': case U'ę':
            return "e";
        case U'Ì': case U'Í': case U'Î': case U'Ï':
        case U'ì': case U'í': case U'î': case U'ï':
        case U'Ī': case U'ī': case U'İ': case U'ı':
            return "i";
        case U'Ñ': case U'ñ': case U'Ń': case U'ń': case U'Ň': case U'ň':
            return "n";
        case U'Ò': case U'Ó': case U'Ô': case U'Õ': case U'Ö': case U'Ø':
        case U'ò': case U'ó': case U'ô': case U'õ': case U'ö': case U'ø':
        case U'Ő': case U'ő':
            return "o";
        case U'Ù': case U'Ú': case U'Û': case U'Ü':
        case U'ù': case U'ú': case U'û': case U'ü': case U'Ū': case U'ū':
            return "u";
        case U'Ý': case U'ý': case U'ÿ':
            return "y";
        case U'Š': case U'š': case U'Ś': case U'ś':
            return "s";
        case U'Ž': case U'ž': case U'Ź': case U'ź': case U'Ż': case U'ż':
            return "z";
        case U'ß':
            return "ss";
        case U'Æ': case U'æ':
            return "ae";
        case U'Œ': case U'œ':
            return "oe";
        default:
            return nullptr;
    }
}

// Decode one UTF-8 code point; returns bytes consumed (invalid bytes decode
// as U+FFFD over one byte so cleaning never throws).
inline std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
        cp = c;
        return 1;
    }
    auto cont = [&](std::size_t j) {
        return j < s.size() && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80;
    };
    if ((c & 0xE0) == 0xC0 && cont(i + 1)) {
        cp = (static_cast<char32_t>(c & 0x1F) << 6) |
             (static_cast<unsigned char>(s[i + 1]) & 0x3F);
        return 2;
    }
    if ((c & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
        cp = (static_cast<char32_t>(c & 0x0F) << 12) |
             ((static_cast<char32_t>(static_cast<unsigned char>(s[i + 1]) & 0x3F)) << 6) |
             (static_cast<unsigned char>(s[i + 2]) & 0x3F);
        return 3;
    }
    if ((c & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        cp = (static_cast<char32_t>(c & 0x07) << 18) |
             ((static_cast<char32_t>(static_cast<unsigned char>(s[i + 1]) & 0x3F)) << 12) |
             ((static_cast<char32_t>(static_cast<unsigned char>(s[i + 2]) & 0x3F)) << 6) |
             (static_cast<unsigned char>(s[i + 3]) & 0x3F);
        return 4;
    }
    cp = 0xFFFD;
    return 1;
}

}  // namespace detail

struct CleanedStatement {
    std::string doc_id;
    std::size_t sentence_index = 0;
    std::string original_text;  // kept verbatim; citation markers survive here
    std::vector<std::string> tokens;
    std::string cleaned_text;  // tokens joined by single spaces
};

struct CleanResult {
    std::vector<std::string> tokens;
    std::string cleaned_text;
};

// Lowercases, folds accents to ASCII, deletes every character outside [a-z]
// (whitespace stays as the separator), splits, and drops stopwords. Citation
// markers like "[12]" vanish from the cleaned copy.
inline CleanResult clean_text(std::string_view text, const std::set<std::string>& stopwords) {
    std::string folded;
    folded.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = 0;
        i += detail::decode_utf8(text, i, cp);
        if (cp < 0x80) {
            const char c = static_cast<char>(cp);
            if (std::isalpha(static_cast<unsigned char>(c))) {
                folded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            } else if (is_ascii_space(c)) {
                folded.push_back(' ');
            }
            // digits, punctuation, symbols: dropped
        } else if (const char* rep = detail::ascii_fold(cp)) {
            folded += rep;
        }
    }

    CleanResult result;
    for (std::string& tok : split_whitespace(folded)) {
        if (stopwords.count(tok)) continue;
        if (!result.cleaned_text.empty()) result.cleaned_text.push_back(' ');
        result.cleaned_text += tok;
        result.tokens.push_back(std::move(tok));
    }
    return result;
}

inline CleanedStatement make_cleaned_statement(std::string doc_id, std::size_t sentence_index,
                                               std::string original_text,
                                               const std::set<std::string>& stopwords) {
    CleanedStatement s;
    s.doc_id = std::move(doc_id);
    s.sentence_index = sentence_index;
    CleanResult r = clean_text(original_text, stopwords);
    s.original_text = std::move(original_text);
    s.tokens = std::move(r.tokens);
    s.cleaned_text = std::move(r.cleaned_text);
    return s;
}

struct DedupResult {
    std::vector<CleanedStatement> statements;
    std::size_t dedup_count = 0;
};

// Removes statements with identical cleaned_text, keeping the first in corpus
// order. Bracket markers were stripped by cleaning, so statements differing
// only in reference numbers collapse.
inline DedupResult dedup_statements(std::vector<CleanedStatement> statements) {
    DedupResult out;
    std::unordered_set<std::string> seen;
    for (auto& s : statements) {
        if (seen.insert(s.cleaned_text).second) {
            out.statements.push_back(std::move(s));
        } else {
            ++out.dedup_count;
        }
    }
    return out;
}

}  // namespace secite

#endif  // SECITE_TEXTPREP_HPP
