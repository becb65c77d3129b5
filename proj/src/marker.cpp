#include "scisimp/marker.hpp"

#include <algorithm>

#include "scisimp/text.hpp"

namespace scisimp {
namespace {

bool is_content_token(const Token& t) {
    if (t.normalized.empty()) return false;
    return !is_stopword(t.normalized);
}

bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}

// Shrinks a token span so brackets hug the term, not its attached punctuation
// ("care," -> "care").
std::size_t trim_front(std::string_view text, std::size_t begin, std::size_t end) {
    while (begin < end && is_ascii_punct(text[begin])) ++begin;
    return begin;
}

std::size_t trim_back(std::string_view text, std::size_t begin, std::size_t end) {
    while (end > begin && is_ascii_punct(text[end - 1])) --end;
    return end;
}

}  // namespace

std::vector<KeyphraseCandidate> extract_candidates(std::string_view text,
                                                   const IdfIndex* science,
                                                   std::size_t max_window) {
    std::vector<Token> tokens = tokenize(text);
    std::vector<KeyphraseCandidate> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!is_content_token(tokens[i])) continue;
        std::string phrase;
        double idf_sum = 0.0;
        std::size_t content = 0;
        for (std::size_t n = 0; n < max_window && i + n < tokens.size(); ++n) {
            const Token& t = tokens[i + n];
            if (t.normalized.empty()) break;  // non-word token ends the window
            if (!phrase.empty()) phrase += ' ';
            phrase += t.normalized;
            if (science) idf_sum += science->idf(t.normalized);
            ++content;
            // Boundary tokens must be content words; interior stopwords are
            // allowed ("quality of care").
            if (is_stopword(t.normalized)) continue;
            KeyphraseCandidate c;
            c.phrase = phrase;
            c.begin = trim_front(text, tokens[i].begin, tokens[i].end);
            c.end = trim_back(text, c.begin, t.end);
            c.score = science ? idf_sum / static_cast<double>(content) : 0.0;
            out.push_back(std::move(c));
        }
    }
    return out;
}

ComplexityVerdict classify(const std::string& phrase, const IdfIndex& science,
                           const IdfIndex& lifestyle, double threshold,
                           ContrastDirection direction) {
    ComplexityVerdict v;
    v.phrase = phrase;
    v.idf_science = science.idf(phrase);
    v.idf_lifestyle = lifestyle.idf(phrase);
    v.contrast = direction == ContrastDirection::science_minus_lifestyle
                     ? v.idf_science - v.idf_lifestyle
                     : v.idf_lifestyle - v.idf_science;
    v.is_complex = v.contrast > threshold;
    return v;
}

MarkedText mark(std::string_view text, const IdfIndex& science,
                const IdfIndex& lifestyle, const MarkOptions& opts) {
    MarkedText m;
    m.original = std::string(text);

    struct Scored {
        KeyphraseCandidate candidate;
        double contrast = 0.0;
    };
    std::vector<Scored> complex_candidates;
    for (auto& c : extract_candidates(text, &science, opts.max_window)) {
        ComplexityVerdict v = classify(c.phrase, science, lifestyle,
                                       opts.threshold, opts.direction);
        if (v.is_complex) complex_candidates.push_back({std::move(c), v.contrast});
    }

    // Overlap resolution: strongest contrast first, then longer span, then
    // leftmost. Keeping contrast as the primary key makes the surviving
    // candidates a prefix of one threshold-independent order, so raising the
    // threshold can only remove spans, never add them.
    std::stable_sort(complex_candidates.begin(), complex_candidates.end(),
                     [](const Scored& a, const Scored& b) {
                         if (a.contrast != b.contrast) return a.contrast > b.contrast;
                         std::size_t la = a.candidate.end - a.candidate.begin;
                         std::size_t lb = b.candidate.end - b.candidate.begin;
                         if (la != lb) return la > lb;
                         return a.candidate.begin < b.candidate.begin;
                     });
    for (const auto& [c, contrast] : complex_candidates) {
        bool overlaps = std::any_of(m.spans.begin(), m.spans.end(), [&](const Span& s) {
            return c.begin < s.end && s.begin < c.end;
        });
        if (!overlaps) m.spans.push_back({c.begin, c.end});
    }
    std::sort(m.spans.begin(), m.spans.end(),
              [](const Span& a, const Span& b) { return a.begin < b.begin; });
    return m;
}

std::string render_brackets(const MarkedText& m) {
    std::string out;
    out.reserve(m.original.size() + 2 * m.spans.size());
    std::size_t pos = 0;
    for (const Span& s : m.spans) {
        out.append(m.original, pos, s.begin - pos);
        out.push_back('[');
        out.append(m.original, s.begin, s.end - s.begin);
        out.push_back(']');
        pos = s.end;
    }
    out.append(m.original, pos, m.original.size() - pos);
    return out;
}

std::string strip_brackets(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text)
        if (c != '[' && c != ']') out.push_back(c);
    return out;
}

}  // namespace scisimp
