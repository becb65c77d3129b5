#include "scisimp/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scisimp/errors.hpp"

using nlohmann::json;

namespace scisimp {

const char* to_string(OutcomePath p) {
    switch (p) {
        case OutcomePath::baseline_copy: return "baseline_copy";
        case OutcomePath::batch_ok: return "batch_ok";
        case OutcomePath::single_ok: return "single_ok";
        case OutcomePath::fallback_original: return "fallback_original";
        case OutcomePath::passthrough_unmarked: return "passthrough_unmarked";
    }
    return "?";
}

namespace {

std::optional<OutcomePath> path_from_string(std::string_view s) {
    for (OutcomePath p : {OutcomePath::baseline_copy, OutcomePath::batch_ok,
                          OutcomePath::single_ok, OutcomePath::fallback_original,
                          OutcomePath::passthrough_unmarked})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

}  // namespace

// ---- Config ----------------------------------------------------------------

void RunConfig::validate() const {
    if (run_id.empty()) throw ConfigError("run_id is required");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (pre_step && is_simplify_prompt(*pre_step))
        throw ConfigError("pre_step prompt must be C or R");
    if (simplify_prompt && !is_simplify_prompt(*simplify_prompt))
        throw ConfigError("simplify prompt must be one of P1/P2/PNI1/PN1/PI2");
    if (simplify_prompt && !marking)
        throw ConfigError("P-prompts require marking (the prompts reference bracketed terms)");
    if (marking && !simplify_prompt)
        throw ConfigError("marking without a simplify prompt is not a run; use the mark subcommand");
    if (skip_unmarked && !marking)
        throw ConfigError("skip_unmarked requires marking");
    auto has_provider = [&](const std::string& id) {
        for (const auto& p : providers)
            if (p.provider_id == id) return true;
        return false;
    };
    if (pre_step && !has_provider(pre_step_provider))
        throw ConfigError("pre_step provider not configured: " + pre_step_provider);
    if (simplify_prompt && !has_provider(simplify_provider))
        throw ConfigError("simplify provider not configured: " + simplify_provider);
}

namespace {

ApiStyle api_style_from_string(const std::string& s) {
    if (s == "openai_chat" || s == "openai") return ApiStyle::openai_chat;
    if (s == "gemini_generate" || s == "gemini") return ApiStyle::gemini_generate;
    if (s == "mock") return ApiStyle::mock;
    throw ConfigError("unknown api_style: " + s);
}

const char* to_string(ApiStyle s) {
    switch (s) {
        case ApiStyle::openai_chat: return "openai_chat";
        case ApiStyle::gemini_generate: return "gemini_generate";
        case ApiStyle::mock: return "mock";
    }
    return "?";
}

MockMode mock_mode_from_string(const std::string& s) {
    if (s == "echo") return MockMode::echo;
    if (s == "bracket_simplify") return MockMode::bracket_simplify;
    if (s == "fail_every_k") return MockMode::fail_every_k;
    if (s == "garbage") return MockMode::garbage;
    throw ConfigError("unknown mock mode: " + s);
}

const char* to_string(MockMode m) {
    switch (m) {
        case MockMode::echo: return "echo";
        case MockMode::bracket_simplify: return "bracket_simplify";
        case MockMode::fail_every_k: return "fail_every_k";
        case MockMode::garbage: return "garbage";
    }
    return "?";
}

Money money_from(const json& j, const char* field) {
    if (!j.contains(field)) return {};
    const json& v = j[field];
    return Money::parse(v.is_string() ? v.get<std::string>() : v.dump());
}

PromptId require_prompt(const json& j, const char* field) {
    auto id = prompt_id_from_string(j.at(field).get<std::string>());
    if (!id) throw ConfigError(std::string("unknown prompt id in ") + field);
    return *id;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
    if (j.value("version", 1) != 1) throw ConfigError("unsupported config version");

    RunConfig c;
    c.run_id = j.value("run_id", "");
    if (j.contains("pre_step") && !j["pre_step"].is_null()) {
        c.pre_step = require_prompt(j["pre_step"], "prompt");
        c.pre_step_provider = j["pre_step"].value("provider", "");
    }
    if (j.contains("marking") && !j["marking"].is_null() && j["marking"].is_object()) {
        c.marking = true;
        const json& m = j["marking"];
        c.mark_options.threshold = m.value("threshold", 0.1);
        std::string dir = m.value("contrast_direction", "science_minus_lifestyle");
        if (dir == "science_minus_lifestyle")
            c.mark_options.direction = ContrastDirection::science_minus_lifestyle;
        else if (dir == "lifestyle_minus_science")
            c.mark_options.direction = ContrastDirection::lifestyle_minus_science;
        else
            throw ConfigError("unknown contrast_direction: " + dir);
        c.science_index_path = m.value("science_index", "");
        c.lifestyle_index_path = m.value("lifestyle_index", "");
    }
    if (j.contains("simplify") && !j["simplify"].is_null()) {
        c.simplify_prompt = require_prompt(j["simplify"], "prompt");
        c.simplify_provider = j["simplify"].value("provider", "");
    }
    c.batch_size = j.value("batch_size", 10);
    c.shuffle_seed = j.value("seed", 0ULL);
    c.skip_unmarked = j.value("skip_unmarked", false);
    c.prompts_dir = j.value("prompts_dir", "prompts");
    if (j.contains("providers")) {
        for (const auto& p : j["providers"]) {
            ProviderConfig pc;
            pc.provider_id = p.at("provider_id").get<std::string>();
            pc.api_style = api_style_from_string(p.value("api_style", "mock"));
            pc.endpoint = p.value("endpoint", "");
            pc.auth_env = p.value("auth_env", "");
            pc.input_price_per_1m = money_from(p, "input_price_per_1m");
            pc.output_price_per_1m = money_from(p, "output_price_per_1m");
            pc.max_retries = p.value("max_retries", 3);
            pc.timeout = std::chrono::milliseconds(p.value("timeout_ms", 60000));
            pc.backoff_base = std::chrono::milliseconds(p.value("backoff_ms", 250));
            pc.max_in_flight = p.value("max_in_flight", 4);
            if (p.contains("mock")) {
                MockBehavior mb;
                mb.mode = mock_mode_from_string(p["mock"].value("mode", "echo"));
                mb.k = p["mock"].value("k", 0ULL);
                mb.seed = p["mock"].value("seed", 0ULL);
                pc.mock = mb;
            }
            c.providers.push_back(std::move(pc));
        }
    }
    return c;
}

std::string RunConfig::to_json() const {
    json j;
    j["version"] = 1;
    j["run_id"] = run_id;
    if (pre_step)
        j["pre_step"] = {{"prompt", scisimp::to_string(*pre_step)},
                         {"provider", pre_step_provider}};
    if (marking) {
        j["marking"] = {{"threshold", mark_options.threshold},
                        {"contrast_direction",
                         mark_options.direction == ContrastDirection::science_minus_lifestyle
                             ? "science_minus_lifestyle"
                             : "lifestyle_minus_science"},
                        {"science_index", science_index_path},
                        {"lifestyle_index", lifestyle_index_path}};
    }
    if (simplify_prompt)
        j["simplify"] = {{"prompt", scisimp::to_string(*simplify_prompt)},
                         {"provider", simplify_provider}};
    j["batch_size"] = batch_size;
    j["seed"] = shuffle_seed;
    j["skip_unmarked"] = skip_unmarked;
    j["prompts_dir"] = prompts_dir;
    j["providers"] = json::array();
    for (const auto& p : providers) {
        json pj;
        pj["provider_id"] = p.provider_id;
        pj["api_style"] = to_string(p.api_style);
        pj["endpoint"] = p.endpoint;
        pj["auth_env"] = p.auth_env;
        pj["input_price_per_1m"] = p.input_price_per_1m.str();
        pj["output_price_per_1m"] = p.output_price_per_1m.str();
        pj["max_retries"] = p.max_retries;
        pj["timeout_ms"] = p.timeout.count();
        pj["backoff_ms"] = p.backoff_base.count();
        pj["max_in_flight"] = p.max_in_flight;
        if (p.mock)
            pj["mock"] = {{"mode", to_string(p.mock->mode)}, {"k", p.mock->k},
                          {"seed", p.mock->seed}};
        j["providers"].push_back(std::move(pj));
    }
    return j.dump(2);
}

// ---- Stage execution -------------------------------------------------------

namespace {

struct StageSlot {
    bool done = false;
    std::string output;
    OutcomePath path = OutcomePath::batch_ok;
    std::optional<std::uint64_t> batch_id;
};

struct StageResult {
    std::vector<StageSlot> slots;  // indexed like the stage's input list
    StageCounters counters;
    bool aborted = false;
    std::string abort_reason;
};

// Runs one LLM stage (batch -> failed batches to single retries -> fallback)
// over `inputs`. Indices in checkpoints refer to positions in `inputs`.
StageResult run_llm_stage(const std::string& stage_name, const std::vector<std::string>& inputs,
                          const PromptTemplate& tpl, ChatClient& client,
                          std::size_t batch_size, std::uint64_t seed, RunEnvironment& env) {
    StageResult result;
    result.counters.stage = stage_name;
    result.slots.resize(inputs.size());

    // Restore previously checkpointed results.
    if (env.replay) {
        auto it = env.replay->find(stage_name);
        if (it != env.replay->end()) {
            for (const auto& [idx, rec] : it->second) {
                if (idx >= inputs.size()) continue;
                result.slots[idx].done = true;
                result.slots[idx].output = rec.first;
                result.slots[idx].path = rec.second;
            }
        }
    }

    std::vector<std::string> pending_texts;
    std::vector<std::size_t> pending_idx;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!result.slots[i].done) {
            pending_texts.push_back(inputs[i]);
            pending_idx.push_back(i);
        }
    }

    auto checkpoint = [&](const json& j) {
        if (env.checkpoint) env.checkpoint(j.dump());
    };

    std::vector<std::size_t> retry_queue;
    for (const Batch& batch : shuffle_and_batch(pending_texts, batch_size, seed)) {
        std::string prompt = render_prompt(tpl, batch);
        Completion completion;
        try {
            completion = client.complete(prompt);
        } catch (const ProviderError& e) {
            result.aborted = true;
            result.abort_reason = e.what();
            return result;
        }
        ParsedResponse parsed =
            parse_response(completion.text, batch.items.size(), tpl.expected_format);
        json ck{{"stage", stage_name}, {"type", "batch"}, {"ok", parsed.ok}};
        if (parsed.ok) {
            json outs = json::array();
            for (std::size_t k = 0; k < batch.items.size(); ++k) {
                std::size_t idx = pending_idx[batch.items[k].record_index];
                auto& slot = result.slots[idx];
                slot.done = true;
                slot.output = parsed.items[k];
                slot.path = OutcomePath::batch_ok;
                slot.batch_id = batch.batch_id;
                outs.push_back({{"i", idx}, {"text", slot.output},
                                {"path", to_string(slot.path)}});
            }
            ck["outcomes"] = std::move(outs);
        } else {
            ++result.counters.failed_batches;
            ck["failure"] = to_string(parsed.failure);
            for (const auto& item : batch.items)
                retry_queue.push_back(pending_idx[item.record_index]);
        }
        checkpoint(ck);
    }

    for (std::size_t idx : retry_queue) {
        ++result.counters.single_retries;
        Batch single;
        single.items.push_back({0, inputs[idx]});
        std::string prompt = render_prompt(tpl, single);
        Completion completion;
        try {
            completion = client.complete(prompt);
        } catch (const ProviderError& e) {
            result.aborted = true;
            result.abort_reason = e.what();
            return result;
        }
        ParsedResponse parsed = parse_response(completion.text, 1, tpl.expected_format);
        auto& slot = result.slots[idx];
        slot.done = true;
        if (parsed.ok) {
            slot.output = parsed.items[0];
            slot.path = OutcomePath::single_ok;
        } else {
            ++result.counters.failed_singles;
            slot.output = strip_brackets(inputs[idx]);
            slot.path = OutcomePath::fallback_original;
        }
        checkpoint(json{{"stage", stage_name}, {"type", "single"}, {"i", idx},
                        {"ok", parsed.ok}, {"text", slot.output},
                        {"path", to_string(slot.path)}});
    }
    return result;
}

}  // namespace

RunManifest run_pipeline(const RunConfig& config, const std::vector<TextRecord>& records,
                         RunEnvironment& env) {
    config.validate();

    RunManifest manifest;
    manifest.run_id = config.run_id;
    manifest.config_json = config.to_json();

    std::function<ChatClient*(const std::string&)> client_for = env.client_for;
    std::vector<std::unique_ptr<ChatClient>> owned_clients;
    if (!client_for) {
        for (const auto& pc : config.providers)
            owned_clients.push_back(make_client(pc, env.ledger));
        client_for = [&](const std::string& id) -> ChatClient* {
            for (auto& c : owned_clients)
                if (c->config().provider_id == id) return c.get();
            throw ConfigError("provider not configured: " + id);
        };
    }

    std::vector<std::string> texts;
    texts.reserve(records.size());
    for (const auto& r : records) texts.push_back(r.text);

    auto finish_ledger = [&] {
        if (env.ledger) manifest.ledger_totals = env.ledger->totals(config.providers);
    };

    if (config.is_baseline()) {
        for (std::size_t i = 0; i < records.size(); ++i) {
            manifest.outcomes.push_back(
                {i, texts[i], texts[i], OutcomePath::baseline_copy, std::nullopt});
        }
        finish_ledger();
        return manifest;
    }

    // Step 1: optional rephrase/complexify.
    if (config.pre_step) {
        const PromptTemplate& tpl = env.prompts->get(*config.pre_step);
        StageResult pre = run_llm_stage("pre_step", texts, tpl,
                                        *client_for(config.pre_step_provider),
                                        config.batch_size, config.shuffle_seed, env);
        manifest.stages.push_back(pre.counters);
        manifest.f10 += pre.counters.failed_batches;
        manifest.f1 += pre.counters.failed_singles;
        if (pre.aborted) {
            manifest.incomplete = true;
            manifest.abort_reason = pre.abort_reason;
            finish_ledger();
            return manifest;
        }
        for (std::size_t i = 0; i < texts.size(); ++i) texts[i] = pre.slots[i].output;

        if (!config.simplify_prompt) {
            // Pre-step-only run: the pre-step disposition is the outcome.
            for (std::size_t i = 0; i < records.size(); ++i) {
                manifest.outcomes.push_back({i, records[i].text, texts[i],
                                             pre.slots[i].path, pre.slots[i].batch_id});
            }
            finish_ledger();
            return manifest;
        }
    }

    // Step 2: optional complex-term marking.
    std::vector<std::size_t> span_counts(texts.size(), 0);
    if (config.marking) {
        if (!env.science || !env.lifestyle)
            throw ConfigError("marking requires loaded science and lifestyle indexes");
        for (std::size_t i = 0; i < texts.size(); ++i) {
            MarkedText m = mark(texts[i], *env.science, *env.lifestyle, config.mark_options);
            span_counts[i] = m.spans.size();
            texts[i] = render_brackets(m);
        }
    }

    // Step 3: simplification with batch/single/fallback handling.
    std::vector<std::string> simplify_inputs;
    std::vector<std::size_t> simplify_idx;
    std::vector<TextOutcome> outcomes(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        outcomes[i].record_index = i;
        outcomes[i].input_text = texts[i];
        if (config.skip_unmarked && span_counts[i] == 0) {
            outcomes[i].output_text = strip_brackets(texts[i]);
            outcomes[i].path = OutcomePath::passthrough_unmarked;
        } else {
            simplify_idx.push_back(i);
            simplify_inputs.push_back(texts[i]);
        }
    }

    const PromptTemplate& tpl = env.prompts->get(*config.simplify_prompt);
    StageResult simp = run_llm_stage("simplify", simplify_inputs, tpl,
                                     *client_for(config.simplify_provider),
                                     config.batch_size, config.shuffle_seed, env);
    manifest.stages.push_back(simp.counters);
    manifest.f10 += simp.counters.failed_batches;
    manifest.f1 += simp.counters.failed_singles;
    if (simp.aborted) {
        manifest.incomplete = true;
        manifest.abort_reason = simp.abort_reason;
        finish_ledger();
        return manifest;
    }
    for (std::size_t k = 0; k < simplify_idx.size(); ++k) {
        auto& o = outcomes[simplify_idx[k]];
        o.output_text = simp.slots[k].output;
        o.path = simp.slots[k].path;
        o.batch_id = simp.slots[k].batch_id;
    }
    manifest.outcomes = std::move(outcomes);
    finish_ledger();
    return manifest;
}

// ---- Manifest / submission -------------------------------------------------

std::string RunManifest::to_json(const std::vector<TextRecord>& records) const {
    json j;
    j["run_id"] = run_id;
    j["config"] = json::parse(config_json);
    j["incomplete"] = incomplete;
    if (incomplete) j["abort_reason"] = abort_reason;
    j["f10"] = f10;
    j["f1"] = f1;
    j["stages"] = json::array();
    for (const auto& s : stages)
        j["stages"].push_back({{"stage", s.stage},
                               {"failed_batches", s.failed_batches},
                               {"single_retries", s.single_retries},
                               {"failed_singles", s.failed_singles}});
    j["outcomes"] = json::array();
    for (const auto& o : outcomes) {
        const TextRecord& r = records.at(o.record_index);
        json oj{{"pair_id", r.pair_id}, {"para_id", r.para_id}, {"sent_id", r.sent_id},
                {"input_text", o.input_text}, {"output_text", o.output_text},
                {"path", to_string(o.path)}};
        if (o.batch_id) oj["batch_id"] = *o.batch_id;
        j["outcomes"].push_back(std::move(oj));
    }
    j["ledger"] = json::array();
    for (const auto& t : ledger_totals)
        j["ledger"].push_back({{"provider", t.provider_id}, {"requests", t.requests},
                               {"input_tokens", t.input_tokens},
                               {"output_tokens", t.output_tokens},
                               {"input_cost", t.input_cost.str()},
                               {"output_cost", t.output_cost.str()}});
    return j.dump(2);
}

std::string sanitize_field(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text)
        out.push_back(c == '\t' || c == '\n' || c == '\r' ? ' ' : c);
    return out;
}

void emit_submission(const RunManifest& manifest, const std::vector<TextRecord>& records,
                     const std::string& path) {
    if (manifest.incomplete)
        throw IncompleteManifestError(manifest.run_id + ": " + manifest.abort_reason);
    if (manifest.outcomes.size() != records.size())
        throw IncompleteManifestError(manifest.run_id + ": outcome count mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write submission file: " + path);
    out << "pair_id\tpara_id\tsent_id\tsimplified_text\n";
    for (const auto& o : manifest.outcomes) {
        const TextRecord& r = records.at(o.record_index);
        out << r.pair_id << "\t" << r.para_id << "\t" << r.sent_id << "\t"
            << sanitize_field(o.output_text) << "\n";
    }
}

}  // namespace scisimp
