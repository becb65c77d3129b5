#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scisimp {

struct Document {
    std::string doc_id;
    std::string text;
};

// One task item of the simplification dataset.
struct TextRecord {
    std::string pair_id;
    std::string para_id;
    std::string sent_id;
    std::string text;

    std::string key() const { return pair_id + "\t" + para_id + "\t" + sent_id; }
};

struct HistogramBucket {
    std::uint64_t lo = 0;  // inclusive
    std::uint64_t hi = 0;  // exclusive
    std::uint64_t count = 0;
};

struct DatasetStats {
    std::uint64_t total_texts = 0;
    std::uint64_t unique_texts = 0;  // exact raw-string uniqueness
    double mean_length_chars = 0.0;  // over unique texts, in code points
    std::vector<HistogramBucket> length_histogram;  // width-25 buckets

    std::string to_json() const;
    std::string histogram_csv() const;
};

// Reads a corpus from a directory of plain-text files (one document per file,
// doc_id = filename) or a JSON-lines file with {"doc_id","text"} objects.
// Trims documents; drops documents that are empty after trimming. Throws
// ParseError / DuplicateIdError on malformed input.
std::vector<Document> load_corpus(const std::string& path);

// Reads the task dataset from TSV (header pair_id\tpara_id\tsent_id\ttext)
// or JSON-lines. Records come back in file order. Throws ParseError with the
// offending line number and DuplicateIdError on repeated id triples.
std::vector<TextRecord> load_dataset(const std::string& path);

// Histogram bucket width is fixed at 25 characters starting at 0.
DatasetStats compute_stats(const std::vector<TextRecord>& records);

}  // namespace scisimp
