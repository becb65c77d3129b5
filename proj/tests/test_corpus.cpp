#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "scisimp/corpus.hpp"
#include "scisimp/errors.hpp"

using namespace scisimp;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
}

}  // namespace

TEST_CASE("load_dataset parses TSV in file order") {
    auto path = write_temp("ds_ok.tsv",
                           "pair_id\tpara_id\tsent_id\ttext\n"
                           "CD1\t0\t0\talpha beta\n"
                           "CD1\t0\t1\tgamma\n");
    auto records = load_dataset(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].text == "alpha beta");
    CHECK(records[1].sent_id == "1");
}

TEST_CASE("load_dataset rejects duplicates and bad rows with line numbers") {
    auto dup = write_temp("ds_dup.tsv",
                          "pair_id\tpara_id\tsent_id\ttext\n"
                          "CD1\t0\t0\ta\nCD1\t0\t0\tb\n");
    CHECK_THROWS_AS(load_dataset(dup), DuplicateIdError);

    auto bad = write_temp("ds_bad.tsv",
                          "pair_id\tpara_id\tsent_id\ttext\n"
                          "CD1\t0\t0\ta\nCD2\tmissing fields\n");
    try {
        load_dataset(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    auto no_header = write_temp("ds_nohdr.tsv", "CD1\t0\t0\ta\n");
    CHECK_THROWS_AS(load_dataset(no_header), ParseError);
}

TEST_CASE("load_dataset reads JSON-lines") {
    auto path = write_temp("ds.jsonl",
                           "{\"pair_id\":\"CD1\",\"para_id\":\"0\",\"sent_id\":\"5\","
                           "\"text\":\"hello world\"}\n");
    auto records = load_dataset(path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].text == "hello world");
}

TEST_CASE("compute_stats single record") {
    std::vector<TextRecord> records = {{"p", "0", "0", "ab"}};
    auto s = compute_stats(records);
    CHECK(s.total_texts == 1);
    CHECK(s.unique_texts == 1);
    CHECK(s.mean_length_chars == doctest::Approx(2.0));
}

TEST_CASE("compute_stats counts unique texts by exact raw equality") {
    std::string ten(10, 'x'), twenty(20, 'y');
    std::vector<TextRecord> records = {
        {"p", "0", "0", ten}, {"p", "0", "1", ten}, {"p", "0", "2", twenty}};
    auto s = compute_stats(records);
    CHECK(s.total_texts == 3);
    CHECK(s.unique_texts == 2);
    CHECK(s.mean_length_chars == doctest::Approx(15.0));
}

TEST_CASE("histogram is a contiguous partition covering min..max") {
    std::vector<TextRecord> records;
    for (int i = 0; i < 40; ++i)
        records.push_back({"p", "0", std::to_string(i), std::string(10 + 7 * i, 'a')});
    auto s = compute_stats(records);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < s.length_histogram.size(); ++i) {
        const auto& b = s.length_histogram[i];
        CHECK(b.hi == b.lo + 25);
        if (i > 0) CHECK(b.lo == s.length_histogram[i - 1].hi);
        total += b.count;
    }
    CHECK(total == s.unique_texts);
    CHECK(s.length_histogram.front().lo <= 10);
    CHECK(s.length_histogram.back().hi > 10 + 7 * 39);
}

TEST_CASE("load_corpus reads JSON-lines and skips empty documents") {
    auto path = write_temp("corpus.jsonl",
                           "{\"doc_id\":\"a\",\"text\":\"some text\"}\n"
                           "{\"doc_id\":\"b\",\"text\":\"   \"}\n"
                           "{\"doc_id\":\"c\",\"text\":\"more\"}\n");
    auto docs = load_corpus(path);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].doc_id == "a");
    CHECK(docs[1].doc_id == "c");
}

TEST_CASE("load_corpus reads a directory of text files") {
    fs::path dir = fs::temp_directory_path() / "scisimp_corpus_dir";
    fs::create_directories(dir);
    std::ofstream(dir / "d1.txt") << "first document";
    std::ofstream(dir / "d2.txt") << "second document";
    auto docs = load_corpus(dir.string());
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].doc_id == "d1.txt");
}
