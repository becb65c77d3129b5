#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scisimp/errors.hpp"
#include "scisimp/idf.hpp"
#include "scisimp/pipeline.hpp"

using namespace scisimp;
using nlohmann::json;

namespace {

const char* kPromptDir = SCISIMP_SOURCE_DIR "/prompts";

std::vector<TextRecord> make_records(std::size_t n, const std::string& stem = "text") {
    std::vector<TextRecord> records;
    for (std::size_t i = 0; i < n; ++i)
        records.push_back({"CD" + std::to_string(i / 10), std::to_string(i % 10),
                           std::to_string(i), stem + " number " + std::to_string(i)});
    return records;
}

ProviderConfig mock_provider(const std::string& id, MockMode mode = MockMode::echo) {
    ProviderConfig c;
    c.provider_id = id;
    c.api_style = ApiStyle::mock;
    c.mock = MockBehavior{mode, 0, 0};
    return c;
}

// Deterministic fault injector: calls listed in `garbage_calls` (1-based
// submission order) return unparseable text; reaching `throw_at` raises a
// provider infrastructure error.
class FaultClient : public ChatClient {
public:
    FaultClient(std::set<std::uint64_t> garbage_calls, std::uint64_t throw_at = 0)
        : garbage_calls_(std::move(garbage_calls)), throw_at_(throw_at) {
        config_ = mock_provider("fault");
    }

    Completion complete(const std::string& prompt) override {
        std::uint64_t seq = ++calls_;
        if (throw_at_ && seq >= throw_at_) throw ProviderError("injected outage", 503);
        Completion c;
        if (garbage_calls_.contains(seq)) {
            c.text = "no list here";
        } else {
            std::ostringstream out;
            auto items = extract_numbered_items(prompt);
            for (std::size_t i = 0; i < items.size(); ++i)
                out << (i + 1) << ". " << items[i] << " rephrased\n";
            c.text = out.str();
        }
        c.usage = {1, 1};
        return c;
    }

    const ProviderConfig& config() const override { return config_; }
    std::uint64_t calls() const { return calls_; }

private:
    ProviderConfig config_;
    std::set<std::uint64_t> garbage_calls_;
    std::uint64_t throw_at_;
    std::uint64_t calls_ = 0;
};

RunConfig pre_step_config(std::size_t batch_size = 5, std::uint64_t seed = 42) {
    RunConfig c;
    c.run_id = "team_task11_r--fault";
    c.pre_step = PromptId::R;
    c.pre_step_provider = "fault";
    c.batch_size = batch_size;
    c.shuffle_seed = seed;
    c.providers = {mock_provider("fault")};
    c.prompts_dir = kPromptDir;
    return c;
}

struct Fixture {
    PromptLibrary prompts = PromptLibrary::load(kPromptDir);
    UsageLedger ledger;
    RunEnvironment env;

    explicit Fixture(ChatClient* client = nullptr) {
        env.prompts = &prompts;
        env.ledger = &ledger;
        if (client) env.client_for = [client](const std::string&) { return client; };
    }
};

std::vector<Document> docs_from(const std::vector<std::string>& texts) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < texts.size(); ++i)
        docs.push_back({"d" + std::to_string(i), texts[i]});
    return docs;
}

}  // namespace

TEST_CASE("config validation rejects inconsistent combinations") {
    RunConfig c;
    c.run_id = "r";
    CHECK_NOTHROW(c.validate());  // baseline

    RunConfig marking_only = c;
    marking_only.marking = true;
    CHECK_THROWS_AS(marking_only.validate(), ConfigError);

    RunConfig simplify_unmarked = c;
    simplify_unmarked.simplify_prompt = PromptId::P2;
    simplify_unmarked.simplify_provider = "m";
    simplify_unmarked.providers = {mock_provider("m")};
    CHECK_THROWS_AS(simplify_unmarked.validate(), ConfigError);

    RunConfig bad_pre = c;
    bad_pre.pre_step = PromptId::P1;
    bad_pre.pre_step_provider = "m";
    bad_pre.providers = {mock_provider("m")};
    CHECK_THROWS_AS(bad_pre.validate(), ConfigError);

    RunConfig no_provider = c;
    no_provider.pre_step = PromptId::R;
    no_provider.pre_step_provider = "missing";
    CHECK_THROWS_AS(no_provider.validate(), ConfigError);

    RunConfig skip = c;
    skip.skip_unmarked = true;
    CHECK_THROWS_AS(skip.validate(), ConfigError);
}

TEST_CASE("config JSON round-trips") {
    RunConfig c = pre_step_config();
    auto path = (std::filesystem::temp_directory_path() / "cfg_rt.json").string();
    std::ofstream(path) << c.to_json();
    RunConfig loaded = RunConfig::load(path);
    CHECK(loaded.to_json() == c.to_json());
    CHECK(loaded.pre_step == PromptId::R);
    CHECK(loaded.batch_size == 5);
    CHECK(loaded.shuffle_seed == 42);
}

TEST_CASE("baseline run copies every text") {
    auto records = make_records(7);
    RunConfig c;
    c.run_id = "team_task11_baseline";
    Fixture fx;
    auto manifest = run_pipeline(c, records, fx.env);
    REQUIRE(manifest.outcomes.size() == 7);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(manifest.outcomes[i].output_text == records[i].text);
        CHECK(manifest.outcomes[i].path == OutcomePath::baseline_copy);
    }
    CHECK(manifest.f10 == 0);
    CHECK(manifest.f1 == 0);
}

TEST_CASE("failed batches retry singly; failed singles fall back") {
    // 25 texts in 5 batches. Batch calls 2 and 4 return garbage (f10 = 2),
    // sending 10 texts to single retries (calls 6..15). Single call 7 also
    // returns garbage (f1 = 1), so exactly one record falls back verbatim.
    auto records = make_records(25);
    FaultClient client({2, 4, 7});
    Fixture fx(&client);
    auto manifest = run_pipeline(pre_step_config(), records, fx.env);

    CHECK(manifest.f10 == 2);
    CHECK(manifest.f1 == 1);
    REQUIRE(manifest.stages.size() == 1);
    CHECK(manifest.stages[0].stage == "pre_step");
    CHECK(manifest.stages[0].single_retries == 10);
    CHECK(client.calls() == 15);

    std::map<OutcomePath, int> by_path;
    REQUIRE(manifest.outcomes.size() == 25);
    for (const auto& o : manifest.outcomes) {
        ++by_path[o.path];
        if (o.path == OutcomePath::fallback_original)
            CHECK(o.output_text == o.input_text);  // no brackets to strip here
        else
            CHECK(o.output_text == o.input_text + " rephrased");
    }
    CHECK(by_path[OutcomePath::batch_ok] == 15);
    CHECK(by_path[OutcomePath::single_ok] == 9);
    CHECK(by_path[OutcomePath::fallback_original] == 1);
    CHECK(!manifest.incomplete);
}

TEST_CASE("shuffled batches still map outputs back to their records") {
    auto records = make_records(23);
    FaultClient client({});
    Fixture fx(&client);
    auto manifest = run_pipeline(pre_step_config(10, 1234), records, fx.env);
    REQUIRE(manifest.outcomes.size() == 23);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(manifest.outcomes[i].record_index == i);
        CHECK(manifest.outcomes[i].output_text == records[i].text + " rephrased");
    }
}

TEST_CASE("same seed gives a byte-identical manifest") {
    auto records = make_records(30);
    std::string a, b;
    {
        FaultClient client({3});
        Fixture fx(&client);
        a = run_pipeline(pre_step_config(5, 99), records, fx.env).to_json(records);
    }
    {
        FaultClient client({3});
        Fixture fx(&client);
        b = run_pipeline(pre_step_config(5, 99), records, fx.env).to_json(records);
    }
    CHECK(a == b);
}

TEST_CASE("provider outage aborts with a partial manifest") {
    auto records = make_records(25);
    FaultClient client({}, 3);  // hard failure on the third call
    Fixture fx(&client);
    auto manifest = run_pipeline(pre_step_config(), records, fx.env);
    CHECK(manifest.incomplete);
    CHECK(manifest.abort_reason.find("injected outage") != std::string::npos);
    CHECK(manifest.f10 == 0);  // infrastructure failure is not an f10
    CHECK(manifest.f1 == 0);

    auto path = (std::filesystem::temp_directory_path() / "aborted.tsv").string();
    CHECK_THROWS_AS(emit_submission(manifest, records, path), IncompleteManifestError);
}

TEST_CASE("marking plus simplify with unmarked passthrough") {
    auto science = build_idf_index(docs_from({
        "telephone interventions reduced relapse",
        "patients received usual care",
        "patients enrolled",
        "outcomes improved",
    }), "science");
    auto lifestyle = build_idf_index(docs_from({
        "telephone interventions help you quit",
        "telephone interventions for sleep",
        "telephone interventions at home",
        "walk daily and eat well",
    }), "lifestyle");

    std::vector<TextRecord> records = {
        {"CD1", "0", "0", "patients got telephone interventions"},
        {"CD1", "0", "1", "patients received usual care"},
        {"CD1", "0", "2", "telephone interventions reduce relapse"},
    };

    RunConfig c;
    c.run_id = "team_task11_-mp2-mock";
    c.marking = true;
    c.simplify_prompt = PromptId::P2;
    c.simplify_provider = "mock";
    c.skip_unmarked = true;
    c.batch_size = 10;
    c.providers = {mock_provider("mock", MockMode::bracket_simplify)};
    c.prompts_dir = kPromptDir;

    PromptLibrary prompts = PromptLibrary::load(kPromptDir);
    UsageLedger ledger;
    RunEnvironment env;
    env.prompts = &prompts;
    env.science = &science;
    env.lifestyle = &lifestyle;
    env.ledger = &ledger;

    auto manifest = run_pipeline(c, records, env);
    REQUIRE(manifest.outcomes.size() == 3);
    CHECK(manifest.outcomes[0].path == OutcomePath::batch_ok);
    CHECK(manifest.outcomes[0].input_text.find('[') != std::string::npos);
    CHECK(manifest.outcomes[0].output_text.find("(explained simply)") != std::string::npos);
    CHECK(manifest.outcomes[1].path == OutcomePath::passthrough_unmarked);
    CHECK(manifest.outcomes[1].output_text == records[1].text);
    CHECK(manifest.outcomes[2].path == OutcomePath::batch_ok);

    // The ledger saw exactly one batch request for the two marked texts.
    auto totals = ledger.totals(c.providers);
    REQUIRE(totals.size() == 1);
    CHECK(totals[0].requests == 1);
}

TEST_CASE("submission TSV round-trips through the dataset loader") {
    auto records = make_records(12);
    RunConfig c;
    c.run_id = "team_task11_baseline";
    Fixture fx;
    auto manifest = run_pipeline(c, records, fx.env);
    auto path = (std::filesystem::temp_directory_path() / "submission.tsv").string();
    emit_submission(manifest, records, path);
    auto reloaded = load_dataset(path);
    REQUIRE(reloaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(reloaded[i].key() == records[i].key());
        CHECK(reloaded[i].text == records[i].text);
    }
}

TEST_CASE("sanitize_field flattens control separators") {
    CHECK(sanitize_field("a\tb\nc\rd") == "a b c d");
    CHECK(sanitize_field("plain") == "plain");
}

TEST_CASE("checkpoints replay so a resumed run makes no duplicate calls") {
    auto records = make_records(20);
    std::vector<std::string> lines;
    std::string first_json;
    {
        FaultClient client({2});  // one failed batch -> 5 singles
        Fixture fx(&client);
        fx.env.checkpoint = [&](const std::string& line) { lines.push_back(line); };
        auto manifest = run_pipeline(pre_step_config(5, 7), records, fx.env);
        first_json = manifest.to_json(records);
        CHECK(client.calls() == 9);  // 4 batches + 5 singles
    }
    REQUIRE(!lines.empty());

    // Rebuild the replay map the way the resume command does.
    std::map<std::string, std::map<std::size_t, std::pair<std::string, OutcomePath>>> replay;
    auto path_of = [](const std::string& s) {
        if (s == "batch_ok") return OutcomePath::batch_ok;
        if (s == "single_ok") return OutcomePath::single_ok;
        return OutcomePath::fallback_original;
    };
    for (const auto& line : lines) {
        json j = json::parse(line);
        const std::string stage = j["stage"];
        if (j["type"] == "batch" && j["ok"].get<bool>()) {
            for (const auto& o : j["outcomes"])
                replay[stage][o["i"].get<std::size_t>()] = {o["text"], path_of(o["path"])};
        } else if (j["type"] == "single") {
            replay[stage][j["i"].get<std::size_t>()] = {j["text"], path_of(j["path"])};
        }
    }
    REQUIRE(replay["pre_step"].size() == 20);

    FaultClient idle({});
    Fixture fx(&idle);
    fx.env.replay = &replay;
    auto resumed = run_pipeline(pre_step_config(5, 7), records, fx.env);
    CHECK(idle.calls() == 0);
    for (std::size_t i = 0; i < records.size(); ++i)
        CHECK(resumed.outcomes[i].output_text == records[i].text + " rephrased");
}

TEST_CASE("partial replay only reprocesses missing records") {
    auto records = make_records(20);
    std::map<std::string, std::map<std::size_t, std::pair<std::string, OutcomePath>>> replay;
    for (std::size_t i = 0; i < 15; ++i)
        replay["pre_step"][i] = {records[i].text + " rephrased", OutcomePath::batch_ok};

    FaultClient client({});
    Fixture fx(&client);
    fx.env.replay = &replay;
    auto manifest = run_pipeline(pre_step_config(5, 7), records, fx.env);
    CHECK(client.calls() == 1);  // the 5 missing records fit one batch
    for (std::size_t i = 0; i < records.size(); ++i)
        CHECK(manifest.outcomes[i].output_text == records[i].text + " rephrased");
}
