#include <doctest.h>

#include <string>
#include <vector>

#include "scisimp/diff.hpp"

using namespace scisimp;

TEST_CASE("identical token streams produce no spans") {
    std::vector<std::string> same = {"a", "b", "c"};
    CHECK(diff_tokens(same, same).empty());
    CHECK(diff_report("same text here", "same text here").empty());
}

TEST_CASE("a single substitution is one replace span") {
    auto spans = diff_tokens({"a", "b", "c"}, {"a", "X", "c"});
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].op == DiffOp::replace);
    CHECK(spans[0].source_begin == 1);
    CHECK(spans[0].source_end == 2);
    CHECK(spans[0].output_begin == 1);
    CHECK(spans[0].output_end == 2);
}

TEST_CASE("pure insertion and removal are classified as such") {
    auto ins = diff_tokens({"a", "c"}, {"a", "b", "c"});
    REQUIRE(ins.size() == 1);
    CHECK(ins[0].op == DiffOp::insert);
    CHECK(ins[0].source_begin == ins[0].source_end);
    CHECK(ins[0].output_begin == 1);
    CHECK(ins[0].output_end == 2);

    auto rem = diff_tokens({"a", "b", "c"}, {"a", "c"});
    REQUIRE(rem.size() == 1);
    CHECK(rem[0].op == DiffOp::remove);
    CHECK(rem[0].source_begin == 1);
    CHECK(rem[0].source_end == 2);
    CHECK(rem[0].output_begin == rem[0].output_end);
}

TEST_CASE("an explanatory parenthetical shows up as an insertion") {
    auto spans = diff_report("patients received haloperidol daily",
                             "patients received haloperidol (a strong medicine) daily");
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].op == DiffOp::insert);
    // inserted region covers "( a strong medicine )" as eval tokens
    CHECK(spans[0].output_end - spans[0].output_begin == 5);
}

TEST_CASE("empty sides are handled") {
    CHECK(diff_tokens({}, {}).empty());
    auto all_in = diff_tokens({}, {"x", "y"});
    REQUIRE(all_in.size() == 1);
    CHECK(all_in[0].op == DiffOp::insert);
    auto all_out = diff_tokens({"x", "y"}, {});
    REQUIRE(all_out.size() == 1);
    CHECK(all_out[0].op == DiffOp::remove);
}

TEST_CASE("html report highlights modified output regions") {
    auto html = diff_html({{"CD1", "0", "0"}},
                          {"patients received haloperidol"},
                          {"patients got a strong medicine"});
    CHECK(html.find("<html") != std::string::npos);
    CHECK(html.find("CD1") != std::string::npos);
    CHECK(html.find("class=\"mod\"") != std::string::npos);
    CHECK(html.find("strong") != std::string::npos);
}
