#include "scisimp/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "scisimp/errors.hpp"
#include "scisimp/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace scisimp {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<Document> load_corpus_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("doc_id") || !j.contains("text"))
            throw ParseError("expected {\"doc_id\",\"text\"} object", lineno);
        Document d{j["doc_id"].get<std::string>(), j["text"].get<std::string>()};
        if (!seen.insert(d.doc_id).second) throw DuplicateIdError(d.doc_id);
        if (trim(d.text).empty()) continue;
        docs.push_back(std::move(d));
    }
    return docs;
}

}  // namespace

std::vector<Document> load_corpus(const std::string& path) {
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(path))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        std::vector<Document> docs;
        for (const auto& f : files) {
            Document d{f.filename().string(), read_file(f)};
            if (trim(d.text).empty()) continue;
            docs.push_back(std::move(d));
        }
        return docs;
    }
    return load_corpus_jsonl(path);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::vector<TextRecord> load_dataset_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty dataset file", 0);
    ++lineno;
    auto header = split_tabs(strip_cr(line));
    // Submission files use "simplified_text" for the payload column.
    if (header.size() < 4 || header[0] != "pair_id" || header[1] != "para_id" ||
        header[2] != "sent_id" || (header[3] != "text" && header[3] != "simplified_text"))
        throw ParseError("expected TSV header pair_id\\tpara_id\\tsent_id\\ttext", lineno);

    std::vector<TextRecord> records;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != 4) throw ParseError("expected 4 tab-separated fields", lineno);
        TextRecord r{fields[0], fields[1], fields[2], fields[3]};
        if (trim(r.text).empty()) throw ParseError("empty text field", lineno);
        if (!seen.insert(r.key()).second) throw DuplicateIdError(r.key());
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<TextRecord> load_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path);
    std::vector<TextRecord> records;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw ParseError("invalid JSON object", lineno);
        for (const char* f : {"pair_id", "para_id", "sent_id", "text"})
            if (!j.contains(f)) throw ParseError(std::string("missing field ") + f, lineno);
        auto as_string = [&](const char* f) {
            const json& v = j[f];
            return v.is_string() ? v.get<std::string>() : v.dump();
        };
        TextRecord r{as_string("pair_id"), as_string("para_id"), as_string("sent_id"),
                     j["text"].get<std::string>()};
        if (trim(r.text).empty()) throw ParseError("empty text field", lineno);
        if (!seen.insert(r.key()).second) throw DuplicateIdError(r.key());
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

std::vector<TextRecord> load_dataset(const std::string& path) {
    auto ext = fs::path(path).extension().string();
    if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json")
        return load_dataset_jsonl(path);
    return load_dataset_tsv(path);
}

DatasetStats compute_stats(const std::vector<TextRecord>& records) {
    DatasetStats stats;
    stats.total_texts = records.size();

    std::unordered_set<std::string> unique;
    for (const auto& r : records) unique.insert(r.text);
    stats.unique_texts = unique.size();

    if (unique.empty()) return stats;

    std::vector<std::uint64_t> lengths;
    lengths.reserve(unique.size());
    std::uint64_t total_len = 0;
    for (const auto& t : unique) {
        std::uint64_t len = codepoint_length(t);
        lengths.push_back(len);
        total_len += len;
    }
    stats.mean_length_chars = static_cast<double>(total_len) / lengths.size();

    constexpr std::uint64_t kWidth = 25;
    auto [min_it, max_it] = std::minmax_element(lengths.begin(), lengths.end());
    std::uint64_t first = *min_it / kWidth;
    std::uint64_t last = *max_it / kWidth;
    stats.length_histogram.resize(last - first + 1);
    for (std::size_t i = 0; i < stats.length_histogram.size(); ++i) {
        stats.length_histogram[i].lo = (first + i) * kWidth;
        stats.length_histogram[i].hi = (first + i + 1) * kWidth;
    }
    for (std::uint64_t len : lengths)
        ++stats.length_histogram[len / kWidth - first].count;
    return stats;
}

std::string DatasetStats::to_json() const {
    json j;
    j["total_texts"] = total_texts;
    j["unique_texts"] = unique_texts;
    j["mean_length_chars"] = mean_length_chars;
    j["histogram"] = json::array();
    for (const auto& b : length_histogram)
        j["histogram"].push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    return j.dump(2);
}

std::string DatasetStats::histogram_csv() const {
    std::ostringstream out;
    out << "bucket_lo,bucket_hi,count\n";
    for (const auto& b : length_histogram)
        out << b.lo << "," << b.hi << "," << b.count << "\n";
    return out.str();
}

}  // namespace scisimp
