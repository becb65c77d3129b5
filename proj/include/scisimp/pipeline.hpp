#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scisimp/corpus.hpp"
#include "scisimp/gateway.hpp"
#include "scisimp/idf.hpp"
#include "scisimp/marker.hpp"
#include "scisimp/prompts.hpp"

namespace scisimp {

struct RunConfig {
    std::string run_id;  // convention "<team>_task11_<prompt-tags>-<model>"
    std::optional<PromptId> pre_step;        // C or R
    std::string pre_step_provider;
    bool marking = false;
    MarkOptions mark_options;
    std::string science_index_path;
    std::string lifestyle_index_path;
    std::optional<PromptId> simplify_prompt;  // P1/P2/PNI1/PN1/PI2
    std::string simplify_provider;
    std::size_t batch_size = 10;
    std::uint64_t shuffle_seed = 0;
    bool skip_unmarked = false;
    std::vector<ProviderConfig> providers;
    std::string prompts_dir;

    bool is_baseline() const { return !pre_step && !marking && !simplify_prompt; }
    // Throws ConfigError on inconsistent combinations.
    void validate() const;

    static RunConfig load(const std::string& path);
    std::string to_json() const;
};

enum class OutcomePath { baseline_copy, batch_ok, single_ok, fallback_original, passthrough_unmarked };
const char* to_string(OutcomePath p);

struct TextOutcome {
    std::size_t record_index = 0;
    std::string input_text;   // post pre-step, post marking
    std::string output_text;
    OutcomePath path = OutcomePath::baseline_copy;
    std::optional<std::uint64_t> batch_id;
};

struct StageCounters {
    std::string stage;  // "pre_step" / "simplify"
    std::uint64_t failed_batches = 0;   // f10 contribution
    std::uint64_t single_retries = 0;
    std::uint64_t failed_singles = 0;   // f1 contribution
};

struct RunManifest {
    std::string run_id;
    std::string config_json;
    bool incomplete = false;
    std::string abort_reason;
    std::uint64_t f10 = 0;  // failed batch prompts, summed over LLM stages
    std::uint64_t f1 = 0;   // failed single retries, summed over LLM stages
    std::vector<StageCounters> stages;
    std::vector<TextOutcome> outcomes;        // one per record, dataset order
    std::vector<ProviderTotals> ledger_totals;

    std::string to_json(const std::vector<TextRecord>& records) const;
};

// Checkpoint sink invoked after every completed batch / single retry block;
// receives one JSON line. Null disables checkpointing.
using CheckpointSink = std::function<void(const std::string& jsonl_line)>;

struct RunEnvironment {
    const PromptLibrary* prompts = nullptr;
    const IdfIndex* science = nullptr;    // required when config.marking
    const IdfIndex* lifestyle = nullptr;
    UsageLedger* ledger = nullptr;
    // Client factory keyed by provider_id; defaults to make_client over
    // config.providers.
    std::function<ChatClient*(const std::string& provider_id)> client_for;
    CheckpointSink checkpoint;
    // Previously checkpointed per-stage outputs for resumption:
    // stage -> (record_index -> {output, path}).
    std::map<std::string, std::map<std::size_t, std::pair<std::string, OutcomePath>>>* replay = nullptr;
};

// Executes the three-step method over the records. Provider infrastructure
// failure aborts with a partial manifest (incomplete = true) rather than
// counting as a modification failure.
RunManifest run_pipeline(const RunConfig& config, const std::vector<TextRecord>& records,
                         RunEnvironment& env);

// Writes the submission TSV (pair_id, para_id, sent_id, simplified_text);
// tabs/newlines inside texts are replaced by single spaces. Throws
// IncompleteManifestError when the manifest is flagged incomplete.
void emit_submission(const RunManifest& manifest, const std::vector<TextRecord>& records,
                     const std::string& path);

std::string sanitize_field(std::string_view text);

}  // namespace scisimp
