#pragma once

#include <array>
#include <string>
#include <vector>

namespace scisimp {

enum class DiffOp { insert, remove, replace };

// A changed region between two token sequences, expressed in token indices
// ([begin, end) on each side; empty range on the untouched side).
struct DiffSpan {
    DiffOp op = DiffOp::replace;
    std::size_t source_begin = 0;
    std::size_t source_end = 0;
    std::size_t output_begin = 0;
    std::size_t output_end = 0;
};

// Token-level LCS diff. Identical inputs yield an empty result.
std::vector<DiffSpan> diff_tokens(const std::vector<std::string>& source,
                                  const std::vector<std::string>& output);

// Convenience over tokenize_for_eval.
std::vector<DiffSpan> diff_report(const std::string& source, const std::string& output);

// Static HTML inspection report: one row per record, modifications highlighted.
std::string diff_html(const std::vector<std::array<std::string, 3>>& rows_ids,
                      const std::vector<std::string>& sources,
                      const std::vector<std::string>& outputs);

}  // namespace scisimp
