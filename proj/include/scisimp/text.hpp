#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scisimp {

// A token located in its source string by byte offsets.
struct Token {
    std::string raw;         // original slice [begin, end)
    std::string normalized;  // normalize_term(raw); may be empty
    std::size_t begin = 0;
    std::size_t end = 0;
};

// Lowercase, Unicode-NFC (Latin compositions), strip leading/trailing
// punctuation, collapse internal whitespace to single spaces. May return
// an empty string; callers skip empty terms.
std::string normalize_term(std::string_view raw);

// Whitespace-split tokens with byte spans into the original string.
std::vector<Token> tokenize(std::string_view text);

// Number of Unicode code points (falls back to byte count on invalid UTF-8 tails).
std::size_t codepoint_length(std::string_view text);

// Tokenization used by the SARI metric and diff reports: lowercase, detach
// leading/trailing punctuation into separate tokens, split on whitespace.
std::vector<std::string> tokenize_for_eval(std::string_view text);

// Shared stopword check against the versioned English list shipped with the
// artifact. `word` must already be normalized.
bool is_stopword(std::string_view word);

// The full shipped stopword list, for inspection/tests.
const std::vector<std::string>& stopword_list();

}  // namespace scisimp
