#include "scisimp/text.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_set>

namespace scisimp {
namespace {

using u32 = char32_t;

// ---- UTF-8 ----------------------------------------------------------------

// Decodes one code point starting at i; advances i. Invalid bytes are passed
// through as their raw value so round-trips never lose data.
u32 decode_utf8(std::string_view s, std::size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) { ++i; return c; }
    int len = 0;
    u32 cp = 0;
    if ((c & 0xE0) == 0xC0) { len = 2; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { len = 3; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { len = 4; cp = c & 0x07; }
    else { ++i; return c; }
    if (i + len > s.size()) { ++i; return c; }
    for (int k = 1; k < len; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) { ++i; return c; }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += len;
    return cp;
}

void encode_utf8(u32 cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::vector<u32> decode_all(std::string_view s) {
    std::vector<u32> cps;
    cps.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) cps.push_back(decode_utf8(s, i));
    return cps;
}

// ---- Classification -------------------------------------------------------

bool is_space_cp(u32 cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punct_cp(u32 cp) {
    if (cp < 0x80) {
        char c = static_cast<char>(cp);
        return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
               (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
    }
    switch (cp) {
        case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
            return true;
        default:
            return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E);
    }
}

// ---- Canonical composition (Latin subset) ---------------------------------

// base letter + combining mark -> precomposed code point, covering the Latin
// diacritics that occur in English-language scientific text.
u32 compose(u32 base, u32 mark) {
    struct Entry { u32 base; u32 mark; u32 composed; };
    static constexpr Entry kTable[] = {
        {'A', 0x300, 0xC0}, {'A', 0x301, 0xC1}, {'A', 0x302, 0xC2}, {'A', 0x303, 0xC3},
        {'A', 0x308, 0xC4}, {'A', 0x30A, 0xC5},
        {'C', 0x327, 0xC7}, {'C', 0x301, 0x106}, {'C', 0x30C, 0x10C},
        {'E', 0x300, 0xC8}, {'E', 0x301, 0xC9}, {'E', 0x302, 0xCA}, {'E', 0x308, 0xCB},
        {'I', 0x300, 0xCC}, {'I', 0x301, 0xCD}, {'I', 0x302, 0xCE}, {'I', 0x308, 0xCF},
        {'N', 0x303, 0xD1}, {'N', 0x301, 0x143},
        {'O', 0x300, 0xD2}, {'O', 0x301, 0xD3}, {'O', 0x302, 0xD4}, {'O', 0x303, 0xD5},
        {'O', 0x308, 0xD6},
        {'S', 0x30C, 0x160},
        {'U', 0x300, 0xD9}, {'U', 0x301, 0xDA}, {'U', 0x302, 0xDB}, {'U', 0x308, 0xDC},
        {'Y', 0x301, 0xDD}, {'Y', 0x308, 0x178},
        {'Z', 0x30C, 0x17D},
        {'a', 0x300, 0xE0}, {'a', 0x301, 0xE1}, {'a', 0x302, 0xE2}, {'a', 0x303, 0xE3},
        {'a', 0x308, 0xE4}, {'a', 0x30A, 0xE5},
        {'c', 0x327, 0xE7}, {'c', 0x301, 0x107}, {'c', 0x30C, 0x10D},
        {'e', 0x300, 0xE8}, {'e', 0x301, 0xE9}, {'e', 0x302, 0xEA}, {'e', 0x308, 0xEB},
        {'i', 0x300, 0xEC}, {'i', 0x301, 0xED}, {'i', 0x302, 0xEE}, {'i', 0x308, 0xEF},
        {'n', 0x303, 0xF1}, {'n', 0x301, 0x144},
        {'o', 0x300, 0xF2}, {'o', 0x301, 0xF3}, {'o', 0x302, 0xF4}, {'o', 0x303, 0xF5},
        {'o', 0x308, 0xF6},
        {'s', 0x30C, 0x161},
        {'u', 0x300, 0xF9}, {'u', 0x301, 0xFA}, {'u', 0x302, 0xFB}, {'u', 0x308, 0xFC},
        {'y', 0x301, 0xFD}, {'y', 0x308, 0xFF},
        {'z', 0x30C, 0x17E},
    };
    for (const auto& e : kTable)
        if (e.base == base && e.mark == mark) return e.composed;
    return 0;
}

bool is_combining_mark(u32 cp) { return cp >= 0x300 && cp <= 0x36F; }

u32 lower_cp(u32 cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x100 && cp <= 0x177 && (cp % 2 == 0)) return cp + 1;
    if (cp >= 0x179 && cp <= 0x17D && (cp % 2 == 1)) return cp + 1;
    return cp;
}

std::vector<u32> nfc_lower(std::string_view raw) {
    std::vector<u32> cps = decode_all(raw);
    std::vector<u32> out;
    out.reserve(cps.size());
    for (u32 cp : cps) {
        if (!out.empty() && is_combining_mark(cp)) {
            if (u32 comp = compose(out.back(), cp); comp != 0) {
                out.back() = comp;
                continue;
            }
        }
        out.push_back(cp);
    }
    for (u32& cp : out) cp = lower_cp(cp);
    return out;
}

}  // namespace

std::string normalize_term(std::string_view raw) {
    std::vector<u32> cps = nfc_lower(raw);

    // Collapse whitespace runs and trim.
    std::vector<u32> collapsed;
    bool pending_space = false;
    for (u32 cp : cps) {
        if (is_space_cp(cp)) {
            pending_space = !collapsed.empty();
        } else {
            if (pending_space) collapsed.push_back(' ');
            pending_space = false;
            collapsed.push_back(cp);
        }
    }

    // Strip leading/trailing punctuation (not internal hyphens etc.).
    std::size_t b = 0, e = collapsed.size();
    while (b < e && is_punct_cp(collapsed[b])) ++b;
    while (e > b && (is_punct_cp(collapsed[e - 1]) || collapsed[e - 1] == ' ')) --e;

    std::string out;
    for (std::size_t i = b; i < e; ++i) encode_utf8(collapsed[i], out);
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t j = i;
        u32 cp = decode_utf8(text, j);
        if (is_space_cp(cp)) { i = j; continue; }
        std::size_t begin = i;
        while (i < text.size()) {
            std::size_t k = i;
            u32 c = decode_utf8(text, k);
            if (is_space_cp(c)) break;
            i = k;
        }
        Token t;
        t.begin = begin;
        t.end = i;
        t.raw = std::string(text.substr(begin, i - begin));
        t.normalized = normalize_term(t.raw);
        tokens.push_back(std::move(t));
    }
    return tokens;
}

std::size_t codepoint_length(std::string_view text) {
    std::size_t n = 0;
    for (char c : text)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    return n;
}

std::vector<std::string> tokenize_for_eval(std::string_view text) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(text)) {
        std::vector<u32> cps = nfc_lower(t.raw);
        std::size_t b = 0, e = cps.size();
        std::vector<u32> lead, trail;
        while (b < e && is_punct_cp(cps[b])) lead.push_back(cps[b++]);
        while (e > b && is_punct_cp(cps[e - 1])) trail.push_back(cps[--e]);
        std::reverse(trail.begin(), trail.end());
        for (u32 cp : lead) { std::string s; encode_utf8(cp, s); out.push_back(std::move(s)); }
        if (e > b) {
            std::string core;
            for (std::size_t i = b; i < e; ++i) encode_utf8(cps[i], core);
            out.push_back(std::move(core));
        }
        for (u32 cp : trail) { std::string s; encode_utf8(cp, s); out.push_back(std::move(s)); }
    }
    return out;
}

namespace {

// Versioned English stopword list, v1. Function words only; domain terms
// never appear here.
const char* const kStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an",
    "and", "any", "are", "aren't", "as", "at", "be", "because", "been", "before",
    "being", "below", "between", "both", "but", "by", "can", "cannot", "could",
    "couldn't", "did", "didn't", "do", "does", "doesn't", "doing", "don't", "down",
    "during", "each", "e.g", "either", "few", "for", "from", "further", "had",
    "hadn't", "has", "hasn't", "have", "haven't", "having", "he", "her", "here",
    "hers", "herself", "him", "himself", "his", "how", "i", "i.e", "if", "in",
    "into", "is", "isn't", "it", "its", "itself", "just", "may", "me", "might",
    "more", "most", "must", "my", "myself", "neither", "no", "nor", "not", "of",
    "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
    "ourselves", "out", "over", "own", "per", "same", "shall", "she", "should",
    "shouldn't", "so", "some", "such", "than", "that", "the", "their", "theirs",
    "them", "themselves", "then", "there", "these", "they", "this", "those",
    "through", "to", "too", "under", "until", "up", "upon", "us", "very", "was",
    "wasn't", "we", "were", "weren't", "what", "when", "where", "which", "while",
    "who", "whom", "whose", "why", "will", "with", "within", "without", "won't",
    "would", "wouldn't", "you", "your", "yours", "yourself", "yourselves",
};

}  // namespace

const std::vector<std::string>& stopword_list() {
    static const std::vector<std::string> list(std::begin(kStopwords), std::end(kStopwords));
    return list;
}

bool is_stopword(std::string_view word) {
    static const std::unordered_set<std::string_view> set(std::begin(kStopwords),
                                                          std::end(kStopwords));
    return set.contains(word);
}

}  // namespace scisimp
