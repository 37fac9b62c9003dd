#include <catch_amalgamated.hpp>

#include "secite/corpus.hpp"
#include "support.hpp"

using namespace secite;

TEST_CASE("segment_sentences splits at terminal punctuation before capitals") {
    const auto s = segment_sentences("A works [1]. B fails [2].");
    REQUIRE(s.size() == 2);
    CHECK(s[0].text == "A works [1].");
    CHECK(s[1].text == "B fails [2].");
    CHECK(s[0].index == 0);
    CHECK(s[1].index == 1);
}

TEST_CASE("segment_sentences suppresses abbreviation splits") {
    const auto s = segment_sentences("See Smith et al. [3] for details.");
    REQUIRE(s.size() == 1);
    CHECK(s[0].text == "See Smith et al. [3] for details.");

    CHECK(segment_sentences("Results in Fig. 3 agree. More follows.").size() == 2);
    CHECK(segment_sentences("We use caches, e.g. LRU, in practice.").size() == 1);
}

TEST_CASE("segment_sentences handles empty and whitespace input") {
    CHECK(segment_sentences("").empty());
    CHECK(segment_sentences("  \n\t ").empty());
}

TEST_CASE("segment_sentences keeps trailing fragment without punctuation") {
    const auto s = segment_sentences("First sentence. Trailing fragment without end");
    REQUIRE(s.size() == 2);
    CHECK(s[1].text == "Trailing fragment without end");

    // lowercase after a period is a continuation, not a boundary
    CHECK(segment_sentences("Version 2.0 of the tool. and a note").size() == 1);
}

TEST_CASE("segment_sentences spans slice back to the original text") {
    const std::string text = "One sentence here!  Another? Yes. And [4] digits 7 too.";
    const auto sentences = segment_sentences(text);
    std::size_t prev_end = 0;
    for (const auto& s : sentences) {
        CHECK(s.begin >= prev_end);
        CHECK(s.text == text.substr(s.begin, s.end - s.begin));
        prev_end = s.end;
    }
}

TEST_CASE("segment_sentences covers all non-whitespace text (property)") {
    Rng rng(2024);
    const std::string alphabet = "abcXYZ [].!?,;:0123  \n";
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        const std::size_t len = rng.next_index(120);
        for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[rng.next_index(alphabet.size())]);

        const auto sentences = segment_sentences(text);
        std::string joined;
        for (const auto& s : sentences) joined += s.text;
        auto strip_ws = [](const std::string& in) {
            std::string out;
            for (char c : in) {
                if (!is_ascii_space(c)) out.push_back(c);
            }
            return out;
        };
        REQUIRE(strip_ws(joined) == strip_ws(text));

        // determinism
        const auto again = segment_sentences(text);
        REQUIRE(again.size() == sentences.size());
        for (std::size_t i = 0; i < again.size(); ++i) {
            CHECK(again[i].begin == sentences[i].begin);
            CHECK(again[i].end == sentences[i].end);
        }
    }
}

TEST_CASE("parse_reference_list reads bracketed entries") {
    const std::string text =
        "Body text citing things [55].\n"
        "References\n"
        "[55] Yu et al. RRF: a tool for reproducing process races. 2017.\n"
        "[56] Other work.\n";
    const auto refs = parse_reference_list(text);
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].number == 55);
    CHECK(refs[0].raw_string == "Yu et al. RRF: a tool for reproducing process races. 2017.");
    CHECK(refs[1].number == 56);
}

TEST_CASE("parse_reference_list reads dotted entries and continuation lines") {
    const std::string text =
        "References:\n"
        "1. First author. A long title\n"
        "   that wraps onto the next line. 2020.\n"
        "2. Second author. Short. 2021.\n";
    const auto refs = parse_reference_list(text);
    REQUIRE(refs.size() == 2);
    CHECK(refs[0].raw_string == "First author. A long title that wraps onto the next line. 2020.");
}

TEST_CASE("parse_reference_list without a heading returns empty") {
    CHECK(parse_reference_list("no heading here\n[1] looks like an entry\n").empty());
}

TEST_CASE("parse_reference_list keeps first duplicate and warns") {
    WarningLog log;
    const auto refs = parse_reference_list(
        "References\n[1] First entry.\n[1] Second entry with the same number.\n", &log);
    REQUIRE(refs.size() == 1);
    CHECK(refs[0].raw_string == "First entry.");
    REQUIRE(log.items.size() == 1);
    CHECK(log.items[0].find("duplicate reference number 1") != std::string::npos);
}

TEST_CASE("parse_reference_list numbers are strictly unique (property)") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::string text = "References\n";
        const std::size_t entries = 1 + rng.next_index(12);
        for (std::size_t i = 0; i < entries; ++i) {
            text += "[" + std::to_string(1 + rng.next_index(8)) + "] Entry body " +
                    std::to_string(i) + ".\n";
        }
        const auto refs = parse_reference_list(text);
        std::set<int> numbers;
        for (const auto& r : refs) {
            CHECK(numbers.insert(r.number).second);
        }
    }
}

TEST_CASE("parse_reference_list uses the last heading") {
    const std::string text =
        "References\n[1] Decoy in an early section.\n"
        "More body text.\n"
        "References\n[2] Real entry.\n";
    const auto refs = parse_reference_list(text);
    REQUIRE(refs.size() == 1);
    CHECK(refs[0].number == 2);
}

TEST_CASE("ingest_corpus loads the fixture manifest") {
    const Corpus corpus = ingest_corpus(testsupport::fixture_path("manifest.json"));
    CHECK(corpus.target.id == "rrf");
    CHECK(corpus.target.full_text.has_value());
    REQUIRE(corpus.documents.size() == 9);
    CHECK(count_parsed(corpus) == 7);

    const Document& doc8 = corpus.documents[7];
    CHECK(doc8.status == DocumentStatus::ParseFailed);
    CHECK(doc8.failure_reason.find("cannot read file") != std::string::npos);
    const Document& doc9 = corpus.documents[8];
    CHECK(doc9.status == DocumentStatus::ParseFailed);
    CHECK(doc9.failure_reason.find("invalid UTF-8") != std::string::npos);

    // duplicate reference number in doc4 surfaces as a document warning
    const Document& doc4 = corpus.documents[3];
    bool dup_warned = false;
    for (const auto& w : doc4.warnings) {
        if (w.find("duplicate reference number 55") != std::string::npos) dup_warned = true;
    }
    CHECK(dup_warned);
}

TEST_CASE("ingest_corpus fails fast on manifest problems") {
    CHECK_THROWS_WITH(ingest_corpus("/nonexistent/manifest.json"),
                      Catch::Matchers::ContainsSubstring("cannot read manifest"));

    const std::string dir = testsupport::temp_dir("manifest");
    write_file(dir + "/bad.json", "{ not json");
    CHECK_THROWS_WITH(ingest_corpus(dir + "/bad.json"),
                      Catch::Matchers::ContainsSubstring("malformed manifest"));

    write_file(dir + "/no_title.json", R"({"target":{"id":"x"},"documents":[]})");
    CHECK_THROWS(ingest_corpus(dir + "/no_title.json"));

    write_file(dir + "/blank_title.json", R"({"target":{"id":"x","title":"   "},"documents":[]})");
    CHECK_THROWS_WITH(ingest_corpus(dir + "/blank_title.json"),
                      Catch::Matchers::ContainsSubstring("title is empty"));
}

TEST_CASE("ingest_corpus with empty document list warns and succeeds") {
    const std::string dir = testsupport::temp_dir("empty_corpus");
    write_file(dir + "/m.json", R"({"target":{"id":"t","title":"Some Title"},"documents":[]})");
    const Corpus corpus = ingest_corpus(dir + "/m.json");
    CHECK(corpus.documents.empty());
    REQUIRE(corpus.warnings.size() == 1);
    CHECK(corpus.warnings[0].find("no documents") != std::string::npos);
}

TEST_CASE("ingest_corpus with only readable files parses everything") {
    const std::string dir = testsupport::temp_dir("allvalid");
    for (int i = 1; i <= 3; ++i) {
        write_file(dir + "/d" + std::to_string(i) + ".txt",
                   "Document " + std::to_string(i) + " body citing [1].\nReferences\n[1] Entry.\n");
    }
    write_file(dir + "/m.json",
               R"({"target":{"id":"t","title":"A Title"},"documents":[)"
               R"({"id":"d1","path":"d1.txt"},{"id":"d2","path":"d2.txt"},{"id":"d3","path":"d3.txt"}]})");
    const Corpus corpus = ingest_corpus(dir + "/m.json");
    REQUIRE(corpus.documents.size() == 3);
    CHECK(count_parsed(corpus) == 3);
}

TEST_CASE("ingest_corpus resolves paths relative to the manifest") {
    const std::string dir = testsupport::temp_dir("relpaths");
    std::filesystem::create_directories(dir + "/sub");
    write_file(dir + "/sub/d.txt", "One sentence citing [1].\nReferences\n[1] Entry.\n");
    write_file(dir + "/m.json",
               R"({"target":{"id":"t","title":"A Title"},"documents":[{"id":"d","path":"sub/d.txt"}]})");
    const Corpus corpus = ingest_corpus(dir + "/m.json");
    REQUIRE(corpus.documents.size() == 1);
    CHECK(corpus.documents[0].status == DocumentStatus::Parsed);
    CHECK(corpus.documents[0].references.size() == 1);
}

TEST_CASE("utf8_valid distinguishes well-formed from malformed sequences") {
    CHECK(utf8_valid("plain ascii"));
    CHECK(utf8_valid("caf\xc3\xa9 r\xc3\xa9sum\xc3\xa9"));
    CHECK(utf8_valid("dash \xe2\x80\x93 and \xf0\x9f\x98\x80"));
    CHECK_FALSE(utf8_valid("\xff\xfe"));
    CHECK_FALSE(utf8_valid("truncated \xc3"));
    CHECK_FALSE(utf8_valid("overlong \xc0\xaf"));
    CHECK_FALSE(utf8_valid("surrogate \xed\xa0\x80"));
}

TEST_CASE("reference_section_offset finds the heading line") {
    const std::string text = "body\nReferences\n[1] x\n";
    CHECK(reference_section_offset(text) == 5);
    CHECK(reference_section_offset("no heading") == std::string::npos);
}
