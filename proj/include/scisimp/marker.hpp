#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scisimp/idf.hpp"

namespace scisimp {

struct KeyphraseCandidate {
    std::string phrase;      // normalized
    std::size_t begin = 0;   // byte span in the original text
    std::size_t end = 0;
    double score = 0.0;      // mean token idf in the science index (salience)
};

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool operator==(const Span&) const = default;
};

struct MarkedText {
    std::string original;
    std::vector<Span> spans;  // sorted ascending, pairwise disjoint
    std::size_t marked_count() const { return spans.size(); }
};

struct ComplexityVerdict {
    std::string phrase;
    double idf_science = 0.0;
    double idf_lifestyle = 0.0;
    double contrast = 0.0;
    bool is_complex = false;
};

enum class ContrastDirection {
    science_minus_lifestyle,  // the rule as the source method states it
    lifestyle_minus_science,  // inverted reading, selectable via CLI
};

struct MarkOptions {
    double threshold = 0.1;
    ContrastDirection direction = ContrastDirection::science_minus_lifestyle;
    std::size_t max_window = 4;  // tokens per candidate phrase
};

// Stopword-bounded token windows of 1..max_window tokens. Boundary tokens
// must be content words; candidates may overlap at this stage. Salience is
// the mean idf of the phrase's tokens in `science` (0 when null).
std::vector<KeyphraseCandidate> extract_candidates(std::string_view text,
                                                   const IdfIndex* science = nullptr,
                                                   std::size_t max_window = 4);

ComplexityVerdict classify(const std::string& phrase, const IdfIndex& science,
                           const IdfIndex& lifestyle, double threshold,
                           ContrastDirection direction =
                               ContrastDirection::science_minus_lifestyle);

// extract -> classify -> resolve overlaps (strongest contrast first, then
// longer span, then leftmost; the contrast-first order is what keeps
// marked_count monotone in the threshold). Resulting spans are disjoint and
// sorted.
MarkedText mark(std::string_view text, const IdfIndex& science,
                const IdfIndex& lifestyle, const MarkOptions& opts = {});

// Wraps each span in square brackets; no other bytes are altered.
std::string render_brackets(const MarkedText& m);

// Removes all '[' and ']' characters; inverse of render_brackets on marked
// texts, identity on bracket-free texts.
std::string strip_brackets(std::string_view text);

}  // namespace scisimp
