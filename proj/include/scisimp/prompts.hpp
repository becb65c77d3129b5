#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scisimp {

enum class PromptId { C, R, P1, P2, PNI1, PN1, PI2 };

const char* to_string(PromptId id);
std::optional<PromptId> prompt_id_from_string(std::string_view s);
bool is_simplify_prompt(PromptId id);  // P*, i.e. not C/R

enum class ResponseFormat { enumerated_list, plain_list, python_list };

struct PromptTemplate {
    PromptId id = PromptId::P2;
    std::string batch_text;   // verbatim file contents, contains the literal "10"
    std::string single_text;  // committed single-text variant
    ResponseFormat expected_format = ResponseFormat::enumerated_list;
};

// Loads the seven committed template pairs from a directory of
// <id>.batch.txt / <id>.single.txt files.
class PromptLibrary {
public:
    static PromptLibrary load(const std::string& dir);
    const PromptTemplate& get(PromptId id) const;

private:
    std::vector<PromptTemplate> templates_;
};

struct BatchItem {
    std::size_t record_index = 0;  // position in the caller's record list
    std::string text;
};

struct Batch {
    std::uint64_t batch_id = 0;
    std::vector<BatchItem> items;
};

// Deterministic Fisher-Yates shuffle under `seed`, then consecutive slices of
// size `batch_size` (last batch may be smaller). Does not depend on
// std::shuffle so the permutation is stable across platforms.
std::vector<Batch> shuffle_and_batch(const std::vector<std::string>& texts,
                                     std::size_t batch_size, std::uint64_t seed);

// Template text (batch variant, counts rewritten for sizes other than 10;
// single variant for size 1) followed by "1. <text>" ... "n. <text>" lines.
std::string render_prompt(const PromptTemplate& tpl, const Batch& batch);

enum class ParseFailureReason { wrong_count, empty_item, malformed_list, no_list_found };
const char* to_string(ParseFailureReason r);

struct ParsedResponse {
    bool ok = false;
    std::vector<std::string> items;
    std::string raw;
    ParseFailureReason failure = ParseFailureReason::no_list_found;
};

// Strict-but-salvaging parser: strips code fences and surrounding prose,
// then recovers exactly `expected` items or reports why it could not.
ParsedResponse parse_response(std::string_view raw, std::size_t expected,
                              ResponseFormat format);

// Recovers the "1. ..." item lines from a rendered prompt (used by the mock
// provider); continuation lines attach to the preceding item.
std::vector<std::string> extract_numbered_items(std::string_view text);

}  // namespace scisimp
