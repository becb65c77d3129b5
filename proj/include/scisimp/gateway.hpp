#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scisimp/money.hpp"

namespace scisimp {

enum class ApiStyle { openai_chat, gemini_generate, mock };

enum class MockMode { echo, bracket_simplify, fail_every_k, garbage };

struct MockBehavior {
    MockMode mode = MockMode::echo;
    std::uint64_t k = 0;     // for fail_every_k
    std::uint64_t seed = 0;
};

struct ProviderConfig {
    std::string provider_id;           // e.g. "gpt-4.1-nano"
    ApiStyle api_style = ApiStyle::mock;
    std::string endpoint;              // base URL for HTTP providers
    std::string auth_env;              // env var holding the API key
    Money input_price_per_1m;
    Money output_price_per_1m;
    int max_retries = 3;
    std::chrono::milliseconds timeout{60000};
    std::chrono::milliseconds backoff_base{250};
    int max_in_flight = 4;
    std::optional<MockBehavior> mock;
};

struct Usage {
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
};

struct Completion {
    std::string text;
    Usage usage;
};

struct LedgerEntry {
    std::string provider_id;
    std::int64_t timestamp_ms = 0;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    std::int64_t latency_ms = 0;
    std::string outcome;  // "ok", "http_<status>", "timeout"
};

struct ProviderTotals {
    std::string provider_id;
    std::uint64_t requests = 0;
    std::uint64_t input_tokens = 0;
    std::uint64_t output_tokens = 0;
    Money input_cost;
    Money output_cost;
};

// Append-only, thread-safe request ledger. One entry per attempt that reached
// a provider. Reports run on a snapshot under the lock.
class UsageLedger {
public:
    void append(LedgerEntry e);
    std::vector<LedgerEntry> snapshot() const;
    // Aggregates per provider; prices looked up from the given configs.
    std::vector<ProviderTotals> totals(const std::vector<ProviderConfig>& configs) const;
    void save_jsonl(const std::string& path) const;

private:
    mutable std::mutex mu_;
    std::vector<LedgerEntry> entries_;
};

// Uniform chat-completion interface. Implementations throw ProviderError /
// TimeoutError / AuthMissingError on infrastructure failure after the retry
// policy is exhausted.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual Completion complete(const std::string& prompt) = 0;
    virtual const ProviderConfig& config() const = 0;
};

// Deterministic test double. Behavior keys on a per-call sequence number
// assigned at submission order, so results are stable under concurrency.
class MockChatClient : public ChatClient {
public:
    MockChatClient(ProviderConfig config, UsageLedger* ledger);
    Completion complete(const std::string& prompt) override;
    const ProviderConfig& config() const override { return config_; }

private:
    ProviderConfig config_;
    UsageLedger* ledger_;
    std::atomic<std::uint64_t> calls_{0};
};

// HTTP client over OpenAI-style chat completions or Gemini generateContent,
// with exponential backoff on 429/5xx/timeouts and a per-provider in-flight
// bound.
class HttpChatClient : public ChatClient {
public:
    HttpChatClient(ProviderConfig config, UsageLedger* ledger);
    ~HttpChatClient() override;
    Completion complete(const std::string& prompt) override;
    const ProviderConfig& config() const override { return config_; }

private:
    struct Impl;
    ProviderConfig config_;
    UsageLedger* ledger_;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<ChatClient> make_client(const ProviderConfig& config, UsageLedger* ledger);

// ---- Cost reporting --------------------------------------------------------

// One row of an externally supplied cost table (totals already in currency),
// e.g. for reproducing a published cost overview.
struct CostRow {
    std::string model;
    std::string family;  // grouping key, e.g. "openai" / "gemini"
    Money input_cost;
    Money output_cost;
    std::uint64_t input_tokens = 0;
    std::uint64_t requests = 0;
};

struct CostClaim {
    std::string family;  // "" means all families
    Money claimed_total;
    std::string note;
};

struct CostDiscrepancy {
    std::string family;
    Money computed;
    Money claimed;
    std::string note;
};

struct CostReport {
    std::vector<CostRow> rows;
    // per-family sums, then the grand total under family "".
    struct FamilyTotal {
        std::string family;
        Money total_cost;
        std::uint64_t input_tokens = 0;
        std::uint64_t requests = 0;
    };
    std::vector<FamilyTotal> family_totals;
    FamilyTotal grand_total;
    std::vector<CostDiscrepancy> discrepancies;

    std::string to_json() const;
    std::string to_text() const;
};

// Exact decimal sums of the rows; any claim whose total differs from the
// computed family sum is flagged as a discrepancy.
CostReport ledger_report(const std::vector<CostRow>& rows,
                         const std::vector<CostClaim>& claims = {});

// Loads rows + claims from a JSON file {"rows":[...], "claims":[...]}.
std::pair<std::vector<CostRow>, std::vector<CostClaim>> load_cost_rows(const std::string& path);

}  // namespace scisimp
