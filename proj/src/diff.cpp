#include "scisimp/diff.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "scisimp/text.hpp"

namespace scisimp {

std::vector<DiffSpan> diff_tokens(const std::vector<std::string>& source,
                                  const std::vector<std::string>& output) {
    const std::size_t n = source.size(), m = output.size();
    // LCS length table; sentences are short so the quadratic DP is fine.
    std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            lcs[i][j] = source[i] == output[j]
                            ? lcs[i + 1][j + 1] + 1
                            : std::max(lcs[i + 1][j], lcs[i][j + 1]);
        }
    }

    std::vector<DiffSpan> spans;
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && source[i] == output[j]) {
            ++i;
            ++j;
            continue;
        }
        DiffSpan span;
        span.source_begin = i;
        span.output_begin = j;
        // Extend the changed region until the token sequences re-sync.
        while (i < n || j < m) {
            if (i < n && j < m && source[i] == output[j]) break;
            if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) ++j;
            else ++i;
        }
        span.source_end = i;
        span.output_end = j;
        if (span.source_begin == span.source_end) span.op = DiffOp::insert;
        else if (span.output_begin == span.output_end) span.op = DiffOp::remove;
        else span.op = DiffOp::replace;
        spans.push_back(span);
    }
    return spans;
}

std::vector<DiffSpan> diff_report(const std::string& source, const std::string& output) {
    return diff_tokens(tokenize_for_eval(source), tokenize_for_eval(output));
}

namespace {

std::string html_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Output tokens with inserted/replaced regions highlighted.
std::string render_marked_output(const std::vector<std::string>& out_tokens,
                                 const std::vector<DiffSpan>& spans) {
    std::ostringstream html;
    std::size_t pos = 0;
    auto emit_plain = [&](std::size_t until) {
        for (; pos < until; ++pos) html << html_escape(out_tokens[pos]) << " ";
    };
    for (const auto& s : spans) {
        emit_plain(s.output_begin);
        if (s.output_end > s.output_begin) {
            html << "<span class=\"mod\">";
            for (; pos < s.output_end; ++pos) html << html_escape(out_tokens[pos]) << " ";
            html << "</span>";
        }
    }
    emit_plain(out_tokens.size());
    return html.str();
}

}  // namespace

std::string diff_html(const std::vector<std::array<std::string, 3>>& rows_ids,
                      const std::vector<std::string>& sources,
                      const std::vector<std::string>& outputs) {
    std::ostringstream html;
    html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n"
         << "<style>body{font-family:sans-serif}table{border-collapse:collapse}"
         << "td,th{border:1px solid #ccc;padding:6px;vertical-align:top}"
         << ".mod{color:#0a7a0a;font-weight:bold}</style>\n"
         << "<title>Simplification diff report</title></head><body>\n"
         << "<table><tr><th>pair_id</th><th>para_id</th><th>sent_id</th>"
         << "<th>original</th><th>output (modifications marked)</th></tr>\n";
    for (std::size_t i = 0; i < sources.size(); ++i) {
        std::vector<std::string> src_tokens = tokenize_for_eval(sources[i]);
        std::vector<std::string> out_tokens = tokenize_for_eval(outputs[i]);
        auto spans = diff_tokens(src_tokens, out_tokens);
        html << "<tr><td>" << html_escape(rows_ids[i][0]) << "</td><td>"
             << html_escape(rows_ids[i][1]) << "</td><td>" << html_escape(rows_ids[i][2])
             << "</td><td>" << html_escape(sources[i]) << "</td><td>"
             << render_marked_output(out_tokens, spans) << "</td></tr>\n";
    }
    html << "</table></body></html>\n";
    return html.str();
}

}  // namespace scisimp
