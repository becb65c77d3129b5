#include <doctest.h>

#include "scisimp/text.hpp"

using namespace scisimp;

TEST_CASE("normalize_term strips punctuation and case-folds") {
    CHECK(normalize_term("Haloperidol,") == "haloperidol");
    CHECK(normalize_term("  Quality   of Care ") == "quality of care");
    CHECK(normalize_term("CD012520") == "cd012520");
    CHECK(normalize_term("(evidence-based)") == "evidence-based");
    CHECK(normalize_term("\"quoted!\"") == "quoted");
}

TEST_CASE("normalize_term may return empty") {
    CHECK(normalize_term("...") == "");
    CHECK(normalize_term("   ") == "");
    CHECK(normalize_term("") == "");
}

TEST_CASE("normalize_term composes combining marks (NFC)") {
    // "cafe" + combining acute equals precomposed e-acute
    std::string decomposed = "café";
    std::string precomposed = "café";
    CHECK(normalize_term(decomposed) == normalize_term(precomposed));
    CHECK(normalize_term("CAFÉ") == normalize_term(decomposed));
}

TEST_CASE("tokenize records byte spans into the original string") {
    std::string text = "patients receiving evidence-based care";
    auto tokens = tokenize(text);
    REQUIRE(tokens.size() == 4);
    for (const auto& t : tokens)
        CHECK(text.substr(t.begin, t.end - t.begin) == t.raw);
    CHECK(tokens[2].normalized == "evidence-based");
}

TEST_CASE("codepoint_length counts code points, not bytes") {
    CHECK(codepoint_length("abc") == 3);
    CHECK(codepoint_length("café") == 4);
    CHECK(codepoint_length("") == 0);
}

TEST_CASE("tokenize_for_eval detaches edge punctuation") {
    auto t = tokenize_for_eval("Quality of care outcomes (proportions of patients).");
    std::vector<std::string> expected = {"quality", "of", "care", "outcomes", "(",
                                         "proportions", "of", "patients", ")", "."};
    CHECK(t == expected);
}

TEST_CASE("stopword list covers function words only") {
    CHECK(is_stopword("the"));
    CHECK(is_stopword("of"));
    CHECK(!is_stopword("haloperidol"));
    CHECK(!is_stopword("care"));
    CHECK(stopword_list().size() > 100);
}
