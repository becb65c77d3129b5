#include "scisimp/prompts.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "scisimp/errors.hpp"

namespace fs = std::filesystem;

namespace scisimp {

const char* to_string(PromptId id) {
    switch (id) {
        case PromptId::C: return "c";
        case PromptId::R: return "r";
        case PromptId::P1: return "p1";
        case PromptId::P2: return "p2";
        case PromptId::PNI1: return "pni1";
        case PromptId::PN1: return "pn1";
        case PromptId::PI2: return "pi2";
    }
    return "?";
}

std::optional<PromptId> prompt_id_from_string(std::string_view s) {
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (PromptId id : {PromptId::C, PromptId::R, PromptId::P1, PromptId::P2,
                        PromptId::PNI1, PromptId::PN1, PromptId::PI2})
        if (lower == to_string(id)) return id;
    return std::nullopt;
}

bool is_simplify_prompt(PromptId id) { return id != PromptId::C && id != PromptId::R; }

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open prompt file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

PromptLibrary PromptLibrary::load(const std::string& dir) {
    PromptLibrary lib;
    for (PromptId id : {PromptId::C, PromptId::R, PromptId::P1, PromptId::P2,
                        PromptId::PNI1, PromptId::PN1, PromptId::PI2}) {
        PromptTemplate t;
        t.id = id;
        t.batch_text = read_file(fs::path(dir) / (std::string(to_string(id)) + ".batch.txt"));
        t.single_text = read_file(fs::path(dir) / (std::string(to_string(id)) + ".single.txt"));
        t.expected_format = id == PromptId::PN1 ? ResponseFormat::python_list
                                                : ResponseFormat::enumerated_list;
        lib.templates_.push_back(std::move(t));
    }
    return lib;
}

const PromptTemplate& PromptLibrary::get(PromptId id) const {
    for (const auto& t : templates_)
        if (t.id == id) return t;
    throw Error("prompt template not loaded");
}

std::vector<Batch> shuffle_and_batch(const std::vector<std::string>& texts,
                                     std::size_t batch_size, std::uint64_t seed) {
    if (batch_size == 0) throw Error("batch_size must be >= 1");
    std::vector<std::size_t> perm(texts.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;

    // Hand-rolled Fisher-Yates; std::shuffle is implementation-defined and
    // the permutation must be stable across platforms.
    std::mt19937_64 rng(seed);
    for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng() % i]);

    std::vector<Batch> batches;
    for (std::size_t pos = 0; pos < perm.size(); pos += batch_size) {
        Batch b;
        b.batch_id = batches.size();
        for (std::size_t k = pos; k < std::min(pos + batch_size, perm.size()); ++k)
            b.items.push_back({perm[k], texts[perm[k]]});
        batches.push_back(std::move(b));
    }
    return batches;
}

namespace {

// Replaces standalone occurrences of "10" (no adjacent digits) with `count`.
std::string rewrite_count(const std::string& text, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '1' && i + 1 < text.size() && text[i + 1] == '0' &&
            (i == 0 || !std::isdigit(static_cast<unsigned char>(text[i - 1]))) &&
            (i + 2 >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i + 2])))) {
            out += std::to_string(count);
            i += 2;
        } else {
            out.push_back(text[i++]);
        }
    }
    return out;
}

}  // namespace

std::string render_prompt(const PromptTemplate& tpl, const Batch& batch) {
    if (batch.items.empty()) throw Error("cannot render empty batch");
    std::string base = batch.items.size() == 1 ? tpl.single_text : tpl.batch_text;
    if (batch.items.size() != 10 && batch.items.size() != 1)
        base = rewrite_count(base, batch.items.size());
    while (!base.empty() && (base.back() == '\n' || base.back() == '\r' || base.back() == ' '))
        base.pop_back();
    std::ostringstream out;
    out << base << "\n";
    for (std::size_t i = 0; i < batch.items.size(); ++i)
        out << (i + 1) << ". " << batch.items[i].text << "\n";
    return out.str();
}

const char* to_string(ParseFailureReason r) {
    switch (r) {
        case ParseFailureReason::wrong_count: return "wrong_count";
        case ParseFailureReason::empty_item: return "empty_item";
        case ParseFailureReason::malformed_list: return "malformed_list";
        case ParseFailureReason::no_list_found: return "no_list_found";
    }
    return "?";
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_lines_drop_fences(std::string_view raw) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t pos = raw.find('\n', start);
        std::string_view line = pos == std::string_view::npos
                                    ? raw.substr(start)
                                    : raw.substr(start, pos - start);
        std::string t = trim(line);
        if (t.rfind("```", 0) != 0) lines.emplace_back(line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return lines;
}

// Parses an enumerated-line prefix like "3.", "3)", "3 -"; returns the item
// number and the offset past the prefix, or 0 on no match.
std::size_t match_enumeration(const std::string& line, std::size_t& rest_offset) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t digits_begin = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == digits_begin || i - digits_begin > 6) return 0;
    std::size_t number = std::stoull(line.substr(digits_begin, i - digits_begin));
    if (number == 0) return 0;
    if (i < line.size() && (line[i] == '.' || line[i] == ')')) {
        ++i;
    } else {
        std::size_t j = i;
        while (j < line.size() && line[j] == ' ') ++j;
        if (j < line.size() && line[j] == '-') i = j + 1;
        else return 0;
    }
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    rest_offset = i;
    return number;
}

ParsedResponse finish(ParsedResponse r, std::size_t expected) {
    for (auto& item : r.items) item = trim(item);
    if (r.items.size() != expected) {
        r.ok = false;
        r.failure = ParseFailureReason::wrong_count;
        return r;
    }
    for (const auto& item : r.items) {
        if (item.empty()) {
            r.ok = false;
            r.failure = ParseFailureReason::empty_item;
            return r;
        }
    }
    r.ok = true;
    return r;
}

ParsedResponse parse_enumerated(std::string_view raw, std::size_t expected) {
    ParsedResponse r;
    r.raw = std::string(raw);
    auto lines = split_lines_drop_fences(raw);
    bool in_list = false;
    bool list_closed = false;  // blank line after items ends the list
    std::size_t next = 1;
    for (const auto& line : lines) {
        std::size_t rest = 0;
        std::size_t number = match_enumeration(line, rest);
        if (number == 1 && !in_list) {
            in_list = true;
            next = 2;
            r.items.push_back(line.substr(rest));
            continue;
        }
        if (!in_list) continue;  // leading prose
        if (number == next) {
            r.items.push_back(line.substr(rest));
            ++next;
            list_closed = false;
            continue;
        }
        if (trim(line).empty()) {
            list_closed = true;
            continue;
        }
        // Continuation of the current item; ignored once the list was closed
        // by a blank line (trailing prose).
        if (!list_closed && !r.items.empty())
            r.items.back() += " " + trim(line);
    }
    if (!in_list) {
        r.failure = ParseFailureReason::no_list_found;
        return r;
    }
    return finish(std::move(r), expected);
}

ParsedResponse parse_python_list(std::string_view raw, std::size_t expected) {
    ParsedResponse r;
    r.raw = std::string(raw);
    std::string text;
    for (const auto& line : split_lines_drop_fences(raw)) {
        text += line;
        text += '\n';
    }
    std::size_t i = text.find('[');
    if (i == std::string::npos) {
        r.failure = ParseFailureReason::no_list_found;
        return r;
    }
    ++i;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    bool expect_item = true;
    while (true) {
        skip_ws();
        if (i >= text.size()) {
            r.failure = ParseFailureReason::malformed_list;
            return r;
        }
        if (text[i] == ']') {
            ++i;
            break;
        }
        if (!expect_item) {
            r.failure = ParseFailureReason::malformed_list;
            return r;
        }
        char quote = text[i];
        if (quote != '\'' && quote != '"') {
            r.failure = ParseFailureReason::malformed_list;
            return r;
        }
        ++i;
        std::string item;
        bool closed = false;
        while (i < text.size()) {
            char c = text[i++];
            if (c == '\\' && i < text.size()) {
                char e = text[i++];
                switch (e) {
                    case 'n': item += '\n'; break;
                    case 't': item += '\t'; break;
                    default: item += e; break;
                }
            } else if (c == quote) {
                closed = true;
                break;
            } else {
                item.push_back(c);
            }
        }
        if (!closed) {
            r.failure = ParseFailureReason::malformed_list;
            return r;
        }
        r.items.push_back(std::move(item));
        skip_ws();
        if (i < text.size() && text[i] == ',') {
            ++i;
            expect_item = true;
        } else {
            expect_item = false;
        }
    }
    return finish(std::move(r), expected);
}

ParsedResponse parse_plain(std::string_view raw, std::size_t expected) {
    ParsedResponse r;
    r.raw = std::string(raw);
    for (const auto& line : split_lines_drop_fences(raw)) {
        std::string t = trim(line);
        if (!t.empty()) r.items.push_back(std::move(t));
    }
    if (r.items.empty()) {
        r.failure = ParseFailureReason::no_list_found;
        return r;
    }
    return finish(std::move(r), expected);
}

}  // namespace

std::vector<std::string> extract_numbered_items(std::string_view text) {
    std::vector<std::string> items;
    std::size_t next = 1;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        std::string line(pos == std::string_view::npos ? text.substr(start)
                                                       : text.substr(start, pos - start));
        std::size_t rest = 0;
        std::size_t number = match_enumeration(line, rest);
        if (number == next) {
            items.push_back(trim(line.substr(rest)));
            ++next;
        } else if (!items.empty() && !trim(line).empty()) {
            items.back() += " " + trim(line);
        }
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return items;
}

ParsedResponse parse_response(std::string_view raw, std::size_t expected,
                              ResponseFormat format) {
    switch (format) {
        case ResponseFormat::enumerated_list: return parse_enumerated(raw, expected);
        case ResponseFormat::python_list: return parse_python_list(raw, expected);
        case ResponseFormat::plain_list: return parse_plain(raw, expected);
    }
    ParsedResponse r;
    r.raw = std::string(raw);
    return r;
}

}  // namespace scisimp
