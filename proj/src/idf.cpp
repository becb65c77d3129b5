#include "scisimp/idf.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "scisimp/errors.hpp"
#include "scisimp/text.hpp"

using nlohmann::json;

namespace scisimp {

double ln_ratio_idf(std::uint64_t doc_count, double df) {
    return std::log(static_cast<double>(doc_count) / df);
}

std::uint64_t IdfIndex::df(std::string_view term) const {
    auto it = df_.find(std::string(term));
    return it == df_.end() ? 0 : it->second;
}

double IdfIndex::idf(std::string_view term) const {
    std::uint64_t d = df(term);
    return formula_(doc_count_, d > 0 ? static_cast<double>(d) : kOovDf);
}

IdfIndexBuilder::IdfIndexBuilder(std::string label, std::size_t max_ngram, IdfFormula formula) {
    index_.label_ = std::move(label);
    index_.max_ngram_ = max_ngram;
    index_.formula_ = std::move(formula);
}

void IdfIndexBuilder::add_document(const Document& doc) {
    std::vector<std::string> terms;
    for (const Token& t : tokenize(doc.text))
        if (!t.normalized.empty()) terms.push_back(t.normalized);

    // Each phrase counts once per document.
    std::unordered_set<std::string> phrases;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        std::string phrase;
        for (std::size_t n = 0; n < index_.max_ngram_ && i + n < terms.size(); ++n) {
            if (n > 0) phrase += ' ';
            phrase += terms[i + n];
            phrases.insert(phrase);
        }
    }
    for (const auto& p : phrases) ++index_.df_[p];
    ++index_.doc_count_;
}

IdfIndex IdfIndexBuilder::build() && {
    if (index_.doc_count_ == 0) throw EmptyCorpusError();
    return std::move(index_);
}

IdfIndex build_idf_index(const std::vector<Document>& docs, const std::string& label,
                         std::size_t max_ngram) {
    IdfIndexBuilder builder(label, max_ngram);
    for (const auto& d : docs) builder.add_document(d);
    return std::move(builder).build();
}

void IdfIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write index file: " + path);
    json header;
    header["label"] = label_;
    header["doc_count"] = doc_count_;
    header["formula"] = "ln(N/df)";
    header["max_ngram"] = max_ngram_;
    header["version"] = 1;
    out << header.dump() << "\n";
    for (const auto& [term, df] : df_) {
        json row;
        row["term"] = term;
        row["df"] = df;
        out << row.dump() << "\n";
    }
}

IdfIndex IdfIndex::load(const std::string& path, IdfFormula formula) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open index file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty index file", 0);
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.contains("label") || !header.contains("doc_count"))
        throw ParseError("bad index header", 1);

    IdfIndex index;
    index.label_ = header["label"].get<std::string>();
    index.doc_count_ = header["doc_count"].get<std::uint64_t>();
    index.max_ngram_ = header.value("max_ngram", kDefaultMaxNgram);
    index.formula_ = std::move(formula);
    if (index.doc_count_ == 0) throw EmptyCorpusError();

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.contains("term") || !row.contains("df"))
            throw ParseError("bad index row", lineno);
        std::uint64_t df = row["df"].get<std::uint64_t>();
        if (df == 0 || df > index.doc_count_)
            throw ParseError("df out of range", lineno);
        index.df_[row["term"].get<std::string>()] = df;
    }
    return index;
}

}  // namespace scisimp
