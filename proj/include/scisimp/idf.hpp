#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scisimp/corpus.hpp"

namespace scisimp {

// idf weighting as a pluggable function of (doc_count, df). df may be
// fractional for the out-of-vocabulary policy.
using IdfFormula = std::function<double(std::uint64_t doc_count, double df)>;

// Plain log-ratio: ln(N / df).
double ln_ratio_idf(std::uint64_t doc_count, double df);

// Immutable term -> idf map over one reference corpus. Stores raw document
// frequencies; idf values are recomputed from df on lookup so the weighting
// stays swappable across save/load.
class IdfIndex {
public:
    static constexpr double kOovDf = 0.5;  // unseen terms score rarer than df=1
    static constexpr std::size_t kDefaultMaxNgram = 4;

    const std::string& label() const { return label_; }
    std::uint64_t doc_count() const { return doc_count_; }
    std::size_t term_count() const { return df_.size(); }
    std::size_t max_ngram() const { return max_ngram_; }

    // df of a normalized term/phrase; 0 if unseen.
    std::uint64_t df(std::string_view term) const;
    bool contains(std::string_view term) const { return df(term) > 0; }

    // idf of a normalized term; unseen terms get the OOV policy value
    // formula(N, 0.5).
    double idf(std::string_view term) const;

    const std::unordered_map<std::string, std::uint64_t>& df_map() const { return df_; }

    // JSON-lines persistence: header {"label","doc_count","formula","max_ngram"}
    // then one {"term","df"} per line.
    void save(const std::string& path) const;
    static IdfIndex load(const std::string& path, IdfFormula formula = ln_ratio_idf);

    friend class IdfIndexBuilder;

private:
    std::string label_;
    std::uint64_t doc_count_ = 0;
    std::size_t max_ngram_ = kDefaultMaxNgram;
    std::unordered_map<std::string, std::uint64_t> df_;
    IdfFormula formula_ = ln_ratio_idf;
};

// Accumulates document frequencies over all 1..max_ngram token phrases.
// A phrase counts once per document that contains it on token boundaries.
class IdfIndexBuilder {
public:
    explicit IdfIndexBuilder(std::string label,
                             std::size_t max_ngram = IdfIndex::kDefaultMaxNgram,
                             IdfFormula formula = ln_ratio_idf);

    void add_document(const Document& doc);

    // Throws EmptyCorpusError if no documents were added.
    IdfIndex build() &&;

private:
    IdfIndex index_;
};

IdfIndex build_idf_index(const std::vector<Document>& docs, const std::string& label,
                         std::size_t max_ngram = IdfIndex::kDefaultMaxNgram);

}  // namespace scisimp
