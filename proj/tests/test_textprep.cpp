#include <catch_amalgamated.hpp>

#include "secite/textprep.hpp"
#include "support.hpp"

using namespace secite;

TEST_CASE("clean_text drops stopwords, digits, and punctuation") {
    const auto r = clean_text("The tool is effective and fast [12].", default_stopwords());
    CHECK(r.tokens == std::vector<std::string>{"tool", "effective", "fast"});
    CHECK(r.cleaned_text == "tool effective fast");
}

TEST_CASE("clean_text on empty and non-alphabetic input") {
    CHECK(clean_text("", default_stopwords()).tokens.empty());
    CHECK(clean_text("123 [45] --", default_stopwords()).tokens.empty());
    CHECK(clean_text("123 [45] --", default_stopwords()).cleaned_text.empty());
}

TEST_CASE("clean_text folds accents and uppercase") {
    const auto r = clean_text("Naïve Müller compared RÉSUMÉ quality", default_stopwords());
    CHECK(r.tokens == std::vector<std::string>{"naive", "muller", "compared", "resume", "quality"});
}

TEST_CASE("clean_text is idempotent (property)") {
    Rng rng(31);
    const std::string pieces[] = {"tool", "Fast", "[12]", "99", "the", "é", "–", "!!", "x-y", " "};
    for (int trial = 0; trial < 1000; ++trial) {
        std::string text;
        const std::size_t len = rng.next_index(20);
        for (std::size_t i = 0; i < len; ++i) text += pieces[rng.next_index(std::size(pieces))];
        const auto once = clean_text(text, default_stopwords());
        const auto twice = clean_text(once.cleaned_text, default_stopwords());
        REQUIRE(once.tokens == twice.tokens);
    }
}

TEST_CASE("clean_text token count never exceeds whitespace token count") {
    Rng rng(77);
    const std::string alphabet = "abc DEF 123 [,.] \t";
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        for (std::size_t i = 0, n = rng.next_index(60); i < n; ++i) {
            text.push_back(alphabet[rng.next_index(alphabet.size())]);
        }
        const auto cleaned = clean_text(text, default_stopwords());
        CHECK(cleaned.tokens.size() <= split_whitespace(text).size());
    }
}

TEST_CASE("dedup_statements keeps the first of identical cleaned texts") {
    std::vector<CleanedStatement> statements;
    statements.push_back(make_cleaned_statement("a", 0, "The tool is effective and fast [12].",
                                                default_stopwords()));
    statements.push_back(make_cleaned_statement("b", 3, "The tool is effective and fast [99].",
                                                default_stopwords()));
    statements.push_back(
        make_cleaned_statement("c", 1, "A different statement entirely.", default_stopwords()));

    const auto result = dedup_statements(statements);
    REQUIRE(result.statements.size() == 2);
    CHECK(result.dedup_count == 1);
    CHECK(result.statements[0].doc_id == "a");  // first occurrence wins
    CHECK(result.statements[0].original_text.find("[12]") != std::string::npos);
}

TEST_CASE("dedup_statements with all-unique input is the identity") {
    std::vector<CleanedStatement> statements;
    statements.push_back(make_cleaned_statement("a", 0, "alpha result", default_stopwords()));
    statements.push_back(make_cleaned_statement("a", 1, "beta result", default_stopwords()));
    const auto result = dedup_statements(statements);
    CHECK(result.statements.size() == 2);
    CHECK(result.dedup_count == 0);
}

TEST_CASE("original text is retained unmodified") {
    const std::string original = "Robust RRF results [7,9] – see details.";
    const auto s = make_cleaned_statement("d", 2, original, default_stopwords());
    CHECK(s.original_text == original);
    for (const auto& tok : s.tokens) {
        for (char c : tok) {
            CHECK(c >= 'a');
            CHECK(c <= 'z');
        }
        CHECK(default_stopwords().count(tok) == 0);
    }
}

TEST_CASE("stopword files load with comments and blank lines") {
    const std::string dir = testsupport::temp_dir("stopwords");
    write_file(dir + "/sw.txt", "# comment line\nfoo\n\nBAR  \nbaz # trailing\n");
    const auto words = load_stopwords(dir + "/sw.txt");
    CHECK(words == std::set<std::string>{"foo", "bar", "baz"});
    CHECK_THROWS_WITH(load_stopwords(dir + "/missing.txt"),
                      Catch::Matchers::ContainsSubstring("cannot read word list"));
}

TEST_CASE("bundled stopword file matches the built-in list") {
    const auto from_file = load_stopwords(testsupport::data_path("stopwords.txt"));
    CHECK(from_file == default_stopwords());
}
