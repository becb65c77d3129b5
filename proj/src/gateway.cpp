#include "scisimp/gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "scisimp/errors.hpp"
#include "scisimp/prompts.hpp"

using nlohmann::json;

namespace scisimp {

// ---- Ledger ----------------------------------------------------------------

void UsageLedger::append(LedgerEntry e) {
    std::lock_guard lock(mu_);
    entries_.push_back(std::move(e));
}

std::vector<LedgerEntry> UsageLedger::snapshot() const {
    std::lock_guard lock(mu_);
    return entries_;
}

std::vector<ProviderTotals> UsageLedger::totals(
    const std::vector<ProviderConfig>& configs) const {
    std::map<std::string, ProviderTotals> agg;
    for (const auto& e : snapshot()) {
        auto& t = agg[e.provider_id];
        t.provider_id = e.provider_id;
        ++t.requests;
        t.input_tokens += e.input_tokens;
        t.output_tokens += e.output_tokens;
    }
    for (auto& [id, t] : agg) {
        for (const auto& c : configs) {
            if (c.provider_id == id) {
                t.input_cost = Money::token_cost(t.input_tokens, c.input_price_per_1m);
                t.output_cost = Money::token_cost(t.output_tokens, c.output_price_per_1m);
                break;
            }
        }
    }
    std::vector<ProviderTotals> out;
    for (auto& [id, t] : agg) out.push_back(std::move(t));
    return out;
}

void UsageLedger::save_jsonl(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write ledger file: " + path);
    for (const auto& e : snapshot()) {
        json j;
        j["provider"] = e.provider_id;
        j["timestamp_ms"] = e.timestamp_ms;
        j["input_tokens"] = e.input_tokens;
        j["output_tokens"] = e.output_tokens;
        j["latency_ms"] = e.latency_ms;
        j["outcome"] = e.outcome;
        out << j.dump() << "\n";
    }
}

// ---- Mock client -----------------------------------------------------------

namespace {

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string simplify_brackets(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '[') continue;
        if (c == ']') out += " (explained simply)";
        else out.push_back(c);
    }
    return out;
}

std::string python_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\\' || c == '\'') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

bool wants_python_list(const std::string& prompt) {
    return prompt.find("python list") != std::string::npos;
}

std::string format_items(const std::vector<std::string>& items, bool python) {
    std::ostringstream out;
    if (python) {
        out << "[";
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out << ", ";
            out << python_quote(items[i]);
        }
        out << "]";
    } else {
        for (std::size_t i = 0; i < items.size(); ++i)
            out << (i + 1) << ". " << items[i] << "\n";
    }
    return out.str();
}

constexpr const char* kGarbage =
    "I'm sorry, I cannot process these texts in the requested format.";

}  // namespace

MockChatClient::MockChatClient(ProviderConfig config, UsageLedger* ledger)
    : config_(std::move(config)), ledger_(ledger) {}

Completion MockChatClient::complete(const std::string& prompt) {
    std::uint64_t seq = ++calls_;  // 1-based submission order
    const MockBehavior behavior = config_.mock.value_or(MockBehavior{});

    std::string text;
    switch (behavior.mode) {
        case MockMode::echo:
            text = format_items(extract_numbered_items(prompt), wants_python_list(prompt));
            break;
        case MockMode::bracket_simplify: {
            std::vector<std::string> items = extract_numbered_items(prompt);
            for (auto& item : items) item = simplify_brackets(item);
            text = format_items(items, wants_python_list(prompt));
            break;
        }
        case MockMode::fail_every_k:
            if (behavior.k > 0 && seq % behavior.k == 0) {
                text = kGarbage;
            } else {
                text = format_items(extract_numbered_items(prompt), wants_python_list(prompt));
            }
            break;
        case MockMode::garbage:
            text = kGarbage;
            break;
    }

    Completion c;
    c.text = std::move(text);
    c.usage.input_tokens = prompt.size() / 4 + 1;
    c.usage.output_tokens = c.text.size() / 4 + 1;
    if (ledger_) {
        ledger_->append({config_.provider_id, now_ms(), c.usage.input_tokens,
                         c.usage.output_tokens, 0, "ok"});
    }
    return c;
}

// ---- HTTP client -----------------------------------------------------------

namespace {

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 80;
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    ParsedUrl u;
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("bad endpoint URL: " + url);
    u.scheme = url.substr(0, scheme_end);
    std::size_t host_begin = scheme_end + 3;
    std::size_t path_begin = url.find('/', host_begin);
    std::string hostport = url.substr(host_begin, path_begin == std::string::npos
                                                      ? std::string::npos
                                                      : path_begin - host_begin);
    u.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
    std::size_t colon = hostport.rfind(':');
    if (colon != std::string::npos) {
        u.host = hostport.substr(0, colon);
        u.port = std::stoi(hostport.substr(colon + 1));
    } else {
        u.host = hostport;
        u.port = u.scheme == "https" ? 443 : 80;
    }
    return u;
}

}  // namespace

struct HttpChatClient::Impl {
    ParsedUrl url;
    std::string api_key;
    std::mutex mu;
    std::condition_variable cv;
    int in_flight = 0;
};

HttpChatClient::HttpChatClient(ProviderConfig config, UsageLedger* ledger)
    : config_(std::move(config)), ledger_(ledger), impl_(std::make_unique<Impl>()) {
    impl_->url = parse_url(config_.endpoint);
    if (impl_->url.scheme != "http")
        throw ConfigError("only http:// endpoints are supported in this build: " +
                          config_.endpoint);
    if (!config_.auth_env.empty()) {
        const char* key = std::getenv(config_.auth_env.c_str());
        if (!key) throw AuthMissingError(config_.auth_env);
        impl_->api_key = key;
    }
}

HttpChatClient::~HttpChatClient() = default;

Completion HttpChatClient::complete(const std::string& prompt) {
    {
        std::unique_lock lock(impl_->mu);
        impl_->cv.wait(lock, [&] { return impl_->in_flight < config_.max_in_flight; });
        ++impl_->in_flight;
    }
    struct Release {
        Impl* impl;
        ~Release() {
            std::lock_guard lock(impl->mu);
            --impl->in_flight;
            impl->cv.notify_one();
        }
    } release{impl_.get()};

    json body;
    if (config_.api_style == ApiStyle::openai_chat) {
        body["model"] = config_.provider_id;
        body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    } else {
        body["contents"] = json::array({{{"parts", json::array({{{"text", prompt}}})}}});
    }
    const std::string payload = body.dump();

    int last_status = 0;
    std::string last_error = "connection failed";
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            auto delay = config_.backoff_base * (1LL << (attempt - 1));
            std::this_thread::sleep_for(std::min<std::chrono::milliseconds>(
                delay, std::chrono::milliseconds(30000)));
        }
        httplib::Client cli(impl_->url.host, impl_->url.port);
        cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
            config_.timeout));
        cli.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(config_.timeout));

        httplib::Headers headers;
        if (!impl_->api_key.empty()) {
            if (config_.api_style == ApiStyle::openai_chat)
                headers.emplace("Authorization", "Bearer " + impl_->api_key);
            else
                headers.emplace("x-goog-api-key", impl_->api_key);
        }

        auto t0 = std::chrono::steady_clock::now();
        auto res = cli.Post(impl_->url.path, headers, payload, "application/json");
        auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();

        if (!res) {
            last_error = httplib::to_string(res.error());
            if (ledger_)
                ledger_->append({config_.provider_id, now_ms(), 0, 0, latency, "timeout"});
            continue;
        }

        Usage usage;
        std::string text;
        bool parsed = false;
        if (res->status == 200) {
            json r = json::parse(res->body, nullptr, false);
            if (!r.is_discarded()) {
                if (config_.api_style == ApiStyle::openai_chat &&
                    r.contains("choices") && !r["choices"].empty()) {
                    text = r["choices"][0]["message"]["content"].get<std::string>();
                    if (r.contains("usage")) {
                        usage.input_tokens = r["usage"].value("prompt_tokens", 0ULL);
                        usage.output_tokens = r["usage"].value("completion_tokens", 0ULL);
                    }
                    parsed = true;
                } else if (config_.api_style == ApiStyle::gemini_generate &&
                           r.contains("candidates") && !r["candidates"].empty()) {
                    text = r["candidates"][0]["content"]["parts"][0]["text"].get<std::string>();
                    if (r.contains("usageMetadata")) {
                        usage.input_tokens = r["usageMetadata"].value("promptTokenCount", 0ULL);
                        usage.output_tokens =
                            r["usageMetadata"].value("candidatesTokenCount", 0ULL);
                    }
                    parsed = true;
                }
            }
        }

        if (ledger_) {
            ledger_->append({config_.provider_id, now_ms(), usage.input_tokens,
                             usage.output_tokens, latency,
                             res->status == 200 ? (parsed ? "ok" : "bad_body")
                                                : "http_" + std::to_string(res->status)});
        }

        if (res->status == 200 && parsed) return {std::move(text), usage};
        last_status = res->status;
        last_error = res->status == 200 ? "unexpected response body" : res->body;
        // 429 and 5xx are transient; anything else is not worth retrying.
        if (res->status != 429 && res->status < 500)
            throw ProviderError(last_error, last_status);
    }
    if (last_status != 0) throw ProviderError(last_error, last_status);
    throw TimeoutError(last_error);
}

std::unique_ptr<ChatClient> make_client(const ProviderConfig& config, UsageLedger* ledger) {
    if (config.api_style == ApiStyle::mock)
        return std::make_unique<MockChatClient>(config, ledger);
    return std::make_unique<HttpChatClient>(config, ledger);
}

// ---- Cost reporting --------------------------------------------------------

CostReport ledger_report(const std::vector<CostRow>& rows,
                         const std::vector<CostClaim>& claims) {
    CostReport report;
    report.rows = rows;
    std::map<std::string, CostReport::FamilyTotal> fam;
    for (const auto& r : rows) {
        auto& t = fam[r.family];
        t.family = r.family;
        t.total_cost += r.input_cost + r.output_cost;
        t.input_tokens += r.input_tokens;
        t.requests += r.requests;
        report.grand_total.total_cost += r.input_cost + r.output_cost;
        report.grand_total.input_tokens += r.input_tokens;
        report.grand_total.requests += r.requests;
    }
    for (auto& [name, t] : fam) report.family_totals.push_back(t);

    for (const auto& c : claims) {
        Money computed = report.grand_total.total_cost;
        if (!c.family.empty()) {
            auto it = fam.find(c.family);
            computed = it == fam.end() ? Money{} : it->second.total_cost;
        }
        if (computed != c.claimed_total)
            report.discrepancies.push_back({c.family, computed, c.claimed_total, c.note});
    }
    return report;
}

std::string CostReport::to_json() const {
    json j;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"model", r.model},
                             {"family", r.family},
                             {"input_cost", r.input_cost.str()},
                             {"output_cost", r.output_cost.str()},
                             {"input_tokens", r.input_tokens},
                             {"requests", r.requests}});
    }
    j["family_totals"] = json::array();
    for (const auto& t : family_totals) {
        j["family_totals"].push_back({{"family", t.family},
                                      {"total_cost", t.total_cost.str()},
                                      {"input_tokens", t.input_tokens},
                                      {"requests", t.requests}});
    }
    j["total"] = {{"total_cost", grand_total.total_cost.str()},
                  {"input_tokens", grand_total.input_tokens},
                  {"requests", grand_total.requests}};
    j["discrepancies"] = json::array();
    for (const auto& d : discrepancies) {
        j["discrepancies"].push_back({{"family", d.family},
                                      {"computed", d.computed.str()},
                                      {"claimed", d.claimed.str()},
                                      {"note", d.note}});
    }
    return j.dump(2);
}

std::string CostReport::to_text() const {
    std::ostringstream out;
    out << "model\tfamily\tinput_cost\toutput_cost\tinput_tokens\trequests\n";
    for (const auto& r : rows)
        out << r.model << "\t" << r.family << "\t" << r.input_cost.str() << "\t"
            << r.output_cost.str() << "\t" << r.input_tokens << "\t" << r.requests << "\n";
    for (const auto& t : family_totals)
        out << "total(" << t.family << ")\t\t" << t.total_cost.str() << "\t\t"
            << t.input_tokens << "\t" << t.requests << "\n";
    out << "total(all)\t\t" << grand_total.total_cost.str() << "\t\t"
        << grand_total.input_tokens << "\t" << grand_total.requests << "\n";
    for (const auto& d : discrepancies)
        out << "DISCREPANCY " << (d.family.empty() ? "all" : d.family) << ": computed "
            << d.computed.str() << " != claimed " << d.claimed.str()
            << (d.note.empty() ? "" : " (" + d.note + ")") << "\n";
    return out.str();
}

namespace {

Money money_field(const json& j) {
    if (j.is_string()) return Money::parse(j.get<std::string>());
    return Money::parse(j.dump());
}

}  // namespace

std::pair<std::vector<CostRow>, std::vector<CostClaim>> load_cost_rows(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open cost rows file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.contains("rows"))
        throw Error("cost file must contain a \"rows\" array: " + path);
    std::vector<CostRow> rows;
    for (const auto& r : j["rows"]) {
        CostRow row;
        row.model = r.value("model", "");
        row.family = r.value("family", "");
        row.input_cost = money_field(r.at("input_cost"));
        row.output_cost = money_field(r.at("output_cost"));
        row.input_tokens = r.value("input_tokens", 0ULL);
        row.requests = r.value("requests", 0ULL);
        rows.push_back(std::move(row));
    }
    std::vector<CostClaim> claims;
    if (j.contains("claims")) {
        for (const auto& c : j["claims"]) {
            CostClaim claim;
            claim.family = c.value("family", "");
            claim.claimed_total = money_field(c.at("claimed_total"));
            claim.note = c.value("note", "");
            claims.push_back(std::move(claim));
        }
    }
    return {std::move(rows), std::move(claims)};
}

}  // namespace scisimp
