#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scisimp/prompts.hpp"

using namespace scisimp;

namespace {

const char* kPromptDir = SCISIMP_SOURCE_DIR "/prompts";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

Batch make_batch(const std::vector<std::string>& texts) {
    Batch b;
    for (std::size_t i = 0; i < texts.size(); ++i) b.items.push_back({i, texts[i]});
    return b;
}

}  // namespace

TEST_CASE("library loads all seven template pairs verbatim") {
    auto lib = PromptLibrary::load(kPromptDir);
    for (PromptId id : {PromptId::C, PromptId::R, PromptId::P1, PromptId::P2,
                        PromptId::PNI1, PromptId::PN1, PromptId::PI2}) {
        const auto& tpl = lib.get(id);
        CHECK(tpl.id == id);
        std::string stem = to_string(id);
        std::transform(stem.begin(), stem.end(), stem.begin(), ::tolower);
        CHECK(tpl.batch_text ==
              read_file(std::string(kPromptDir) + "/" + stem + ".batch.txt"));
        CHECK(tpl.single_text ==
              read_file(std::string(kPromptDir) + "/" + stem + ".single.txt"));
    }
    CHECK(lib.get(PromptId::PN1).expected_format == ResponseFormat::python_list);
    CHECK(lib.get(PromptId::P2).expected_format == ResponseFormat::enumerated_list);
    CHECK(!is_simplify_prompt(PromptId::C));
    CHECK(!is_simplify_prompt(PromptId::R));
    CHECK(is_simplify_prompt(PromptId::PI2));
}

TEST_CASE("render uses batch text for 10 and single text for 1") {
    auto lib = PromptLibrary::load(kPromptDir);
    const auto& p2 = lib.get(PromptId::P2);

    std::vector<std::string> ten(10);
    for (int i = 0; i < 10; ++i) ten[i] = "text number " + std::to_string(i);
    auto rendered = render_prompt(p2, make_batch(ten));
    CHECK(rendered.starts_with("You are given 10 texts, TREAT THEM SEPARATELY."));
    CHECK(rendered.find("\n1. text number 0\n") != std::string::npos);
    CHECK(rendered.find("\n10. text number 9") != std::string::npos);

    auto single = render_prompt(p2, make_batch({"only one"}));
    CHECK(single.starts_with("You are given 1 text.\n"));
    CHECK(single.find("1. only one") != std::string::npos);
    CHECK(single.find("10 texts") == std::string::npos);
}

TEST_CASE("render rewrites the item count for other batch sizes") {
    auto lib = PromptLibrary::load(kPromptDir);
    std::vector<std::string> five = {"a", "b", "c", "d", "e"};
    auto rendered = render_prompt(lib.get(PromptId::C), make_batch(five));
    CHECK(rendered.find("given 5 texts") != std::string::npos);
    CHECK(rendered.find("RETURN ONLY THE 5 TEXTS.") != std::string::npos);
    CHECK(rendered.find("10") == std::string::npos);
    CHECK(rendered.find("\n5. e") != std::string::npos);
}

TEST_CASE("shuffle_and_batch slices 9160 texts into 916 full batches") {
    std::vector<std::string> texts(9160);
    for (std::size_t i = 0; i < texts.size(); ++i) texts[i] = std::to_string(i);
    auto batches = shuffle_and_batch(texts, 10, 42);
    REQUIRE(batches.size() == 916);
    std::set<std::size_t> seen;
    for (std::size_t b = 0; b < batches.size(); ++b) {
        CHECK(batches[b].batch_id == b);
        CHECK(batches[b].items.size() == 10);
        for (const auto& item : batches[b].items) {
            CHECK(texts[item.record_index] == item.text);
            seen.insert(item.record_index);
        }
    }
    CHECK(seen.size() == texts.size());  // a permutation, nothing lost
}

TEST_CASE("shuffle_and_batch is seed-deterministic with a ragged tail") {
    std::vector<std::string> texts = {"a", "b", "c", "d", "e"};
    auto one = shuffle_and_batch(texts, 3, 7);
    auto two = shuffle_and_batch(texts, 3, 7);
    REQUIRE(one.size() == 2);
    CHECK(one[0].items.size() == 3);
    CHECK(one[1].items.size() == 2);
    for (std::size_t b = 0; b < one.size(); ++b)
        for (std::size_t i = 0; i < one[b].items.size(); ++i)
            CHECK(one[b].items[i].record_index == two[b].items[i].record_index);
    auto other = shuffle_and_batch(texts, 3, 8);
    bool same = true;
    for (std::size_t b = 0; b < one.size() && same; ++b)
        for (std::size_t i = 0; i < one[b].items.size(); ++i)
            if (one[b].items[i].record_index != other[b].items[i].record_index)
                same = false;
    CHECK(!same);

    CHECK(shuffle_and_batch({"solo"}, 10, 1).size() == 1);
}

TEST_CASE("enumerated responses parse with numbering variants") {
    auto r = parse_response("1. alpha\n2) beta\n3 - gamma\n", 3,
                            ResponseFormat::enumerated_list);
    REQUIRE(r.ok);
    CHECK(r.items == std::vector<std::string>{"alpha", "beta", "gamma"});
}

TEST_CASE("continuation lines attach until a blank line closes the list") {
    std::string raw =
        "Sure, here you go:\n\n"
        "1. first item\nstill the first item\n"
        "2. second item\n\n"
        "Hope that helps!";
    auto r = parse_response(raw, 2, ResponseFormat::enumerated_list);
    REQUIRE(r.ok);
    CHECK(r.items[0] == "first item still the first item");
    CHECK(r.items[1] == "second item");
}

TEST_CASE("enumerated failure reasons") {
    auto wrong = parse_response("1. a\n2. b\n", 3, ResponseFormat::enumerated_list);
    CHECK(!wrong.ok);
    CHECK(wrong.failure == ParseFailureReason::wrong_count);

    auto empty = parse_response("1. a\n2.\n3. c\n", 3, ResponseFormat::enumerated_list);
    CHECK(!empty.ok);
    CHECK(empty.failure == ParseFailureReason::empty_item);

    auto none = parse_response("I cannot help with that.", 3,
                               ResponseFormat::enumerated_list);
    CHECK(!none.ok);
    CHECK(none.failure == ParseFailureReason::no_list_found);
}

TEST_CASE("python lists parse with quotes, escapes, and code fences") {
    auto plain = parse_response("['one text', \"two text\"]", 2,
                                ResponseFormat::python_list);
    REQUIRE(plain.ok);
    CHECK(plain.items == std::vector<std::string>{"one text", "two text"});

    auto esc = parse_response("[\"it's done\", 'quote \\' inside', 'plain']", 3,
                              ResponseFormat::python_list);
    REQUIRE(esc.ok);
    CHECK(esc.items[0] == "it's done");
    CHECK(esc.items[1] == "quote ' inside");
}

TEST_CASE("golden fixture responses") {
    std::string fx = SCISIMP_SOURCE_DIR "/fixtures/responses/";
    auto fenced = parse_response(read_file(fx + "pn1_fenced.txt"), 2,
                                 ResponseFormat::python_list);
    CHECK(fenced.ok);

    auto prose = parse_response(read_file(fx + "enumerated_prose.txt"), 3,
                                ResponseFormat::enumerated_list);
    REQUIRE(prose.ok);
    CHECK(prose.items == std::vector<std::string>{"aaa", "bbb", "ccc"});

    auto escapes = parse_response(read_file(fx + "python_escapes.txt"), 3,
                                  ResponseFormat::python_list);
    REQUIRE(escapes.ok);
    CHECK(escapes.items[1] == "quote ' inside");

    auto refusal = parse_response(read_file(fx + "refusal.txt"), 10,
                                  ResponseFormat::enumerated_list);
    CHECK(!refusal.ok);
}

TEST_CASE("parser never crashes on noise") {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 500; ++iter) {
        std::string raw;
        int len = static_cast<int>(rng() % 200);
        for (int i = 0; i < len; ++i)
            raw += static_cast<char>("0123456789.'\"[]()\n ab"[rng() % 21]);
        for (auto fmt : {ResponseFormat::enumerated_list, ResponseFormat::plain_list,
                         ResponseFormat::python_list}) {
            auto r = parse_response(raw, 1 + rng() % 10, fmt);
            if (r.ok) CHECK(!r.items.empty());
        }
    }
}

TEST_CASE("rendered prompts round-trip through extract_numbered_items") {
    auto lib = PromptLibrary::load(kPromptDir);
    std::vector<std::string> texts = {"first body", "second body", "third body"};
    auto rendered = render_prompt(lib.get(PromptId::P1), make_batch(texts));
    CHECK(extract_numbered_items(rendered) == texts);
}
