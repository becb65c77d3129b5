#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scisimp/corpus.hpp"
#include "scisimp/diff.hpp"
#include "scisimp/errors.hpp"
#include "scisimp/gateway.hpp"
#include "scisimp/idf.hpp"
#include "scisimp/marker.hpp"
#include "scisimp/pipeline.hpp"
#include "scisimp/prompts.hpp"
#include "scisimp/sari.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scisimp;

namespace {

constexpr const char* kVersion = "0.1.0";

// exit codes: 0 success, 1 user error, 2 partial/incomplete run, 3 provider failure
constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kPartial = 2;
constexpr int kProviderFailure = 3;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

int cmd_index(const std::string& docs, const std::string& label, const std::string& out,
              std::size_t max_ngram) {
    auto corpus = load_corpus(docs);
    IdfIndex index = build_idf_index(corpus, label, max_ngram);
    index.save(out);
    std::cerr << "indexed " << index.doc_count() << " documents, " << index.term_count()
              << " terms -> " << out << "\n";
    return kOk;
}

int cmd_stats(const std::string& dataset, bool as_json, const std::string& hist_csv) {
    auto records = load_dataset(dataset);
    DatasetStats stats = compute_stats(records);
    if (!hist_csv.empty()) write_file(hist_csv, stats.histogram_csv());
    if (as_json) {
        std::cout << stats.to_json() << "\n";
    } else {
        std::cout << "total_texts\t" << stats.total_texts << "\n"
                  << "unique_texts\t" << stats.unique_texts << "\n"
                  << "mean_length_chars\t" << stats.mean_length_chars << "\n";
    }
    return kOk;
}

int cmd_mark(const std::string& dataset, const std::string& science_path,
             const std::string& lifestyle_path, double threshold,
             const std::string& direction, const std::string& out_path) {
    auto records = load_dataset(dataset);
    IdfIndex science = IdfIndex::load(science_path);
    IdfIndex lifestyle = IdfIndex::load(lifestyle_path);
    MarkOptions opts;
    opts.threshold = threshold;
    opts.direction = direction == "lifestyle_minus_science"
                         ? ContrastDirection::lifestyle_minus_science
                         : ContrastDirection::science_minus_lifestyle;

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw Error("cannot write output file: " + out_path);
        out = &file;
    }
    std::uint64_t unmarked = 0;
    for (const auto& r : records) {
        MarkedText m = mark(r.text, science, lifestyle, opts);
        if (m.spans.empty()) ++unmarked;
        json j{{"pair_id", r.pair_id}, {"para_id", r.para_id}, {"sent_id", r.sent_id},
               {"marked_text", render_brackets(m)}, {"span_count", m.spans.size()}};
        *out << j.dump() << "\n";
    }
    json summary{{"summary", true}, {"total_texts", records.size()}, {"unmarked", unmarked}};
    *out << summary.dump() << "\n";
    std::cerr << unmarked << " of " << records.size() << " texts received no markings\n";
    return kOk;
}

// Replays a checkpoint file; returns the meta line (config json, dataset, out dir).
json load_checkpoint(const std::string& path,
                     std::map<std::string, std::map<std::size_t,
                                                    std::pair<std::string, OutcomePath>>>& replay) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open checkpoint file: " + path);
    std::string line;
    json meta;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        if (j.value("type", "") == "meta") {
            meta = j;
            continue;
        }
        std::string stage = j.value("stage", "");
        if (stage.empty() || !j.value("ok", false)) continue;
        auto record = [&](const json& o) {
            auto path_str = o.value("path", "batch_ok");
            auto p = [&] {
                if (path_str == "single_ok") return OutcomePath::single_ok;
                if (path_str == "fallback_original") return OutcomePath::fallback_original;
                return OutcomePath::batch_ok;
            }();
            replay[stage][o.at("i").get<std::size_t>()] = {o.at("text").get<std::string>(), p};
        };
        if (j.value("type", "") == "batch") {
            for (const auto& o : j.value("outcomes", json::array())) record(o);
        } else if (j.value("type", "") == "single") {
            record(j);
        }
    }
    // Failed singles were also checkpointed (ok=false) with fallback text.
    in.clear();
    in.seekg(0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || j.value("type", "") != "single" || j.value("ok", true))
            continue;
        replay[j.value("stage", "")][j.at("i").get<std::size_t>()] = {
            j.at("text").get<std::string>(), OutcomePath::fallback_original};
    }
    return meta;
}

int execute_run(const RunConfig& config, const std::string& dataset_path,
                const std::string& out_dir, bool dry_run,
                std::map<std::string, std::map<std::size_t,
                                               std::pair<std::string, OutcomePath>>>* replay) {
    auto records = load_dataset(dataset_path);
    config.validate();
    std::cerr << "resolved config:\n" << config.to_json() << "\n";

    PromptLibrary prompts = PromptLibrary::load(config.prompts_dir);

    if (dry_run) {
        std::uint64_t requests = 0;
        std::vector<std::string> texts;
        for (const auto& r : records) texts.push_back(r.text);
        auto count_stage = [&](PromptId id) {
            const PromptTemplate& tpl = prompts.get(id);
            for (const Batch& b : shuffle_and_batch(texts, config.batch_size,
                                                    config.shuffle_seed)) {
                render_prompt(tpl, b);
                ++requests;
            }
        };
        if (config.pre_step) count_stage(*config.pre_step);
        if (config.simplify_prompt) count_stage(*config.simplify_prompt);
        json j{{"dry_run", true}, {"records", records.size()},
               {"estimated_requests", requests}};
        std::cout << j.dump(2) << "\n";
        return kOk;
    }

    fs::create_directories(out_dir);
    std::ofstream checkpoint_file(fs::path(out_dir) / "checkpoint.jsonl",
                                  replay ? std::ios::app : std::ios::trunc);
    if (!replay) {
        json meta{{"type", "meta"}, {"config", json::parse(config.to_json())},
                  {"dataset", dataset_path}, {"out", out_dir}};
        checkpoint_file << meta.dump() << "\n";
        checkpoint_file.flush();
    }

    std::optional<IdfIndex> science, lifestyle;
    if (config.marking) {
        science = IdfIndex::load(config.science_index_path);
        lifestyle = IdfIndex::load(config.lifestyle_index_path);
    }

    UsageLedger ledger;
    RunEnvironment env;
    env.prompts = &prompts;
    env.science = science ? &*science : nullptr;
    env.lifestyle = lifestyle ? &*lifestyle : nullptr;
    env.ledger = &ledger;
    env.replay = replay;
    env.checkpoint = [&](const std::string& line) {
        checkpoint_file << line << "\n";
        checkpoint_file.flush();
    };

    RunManifest manifest;
    try {
        manifest = run_pipeline(config, records, env);
    } catch (const ProviderError& e) {
        std::cerr << "provider failure: " << e.what() << "\n";
        return kProviderFailure;
    }

    write_file((fs::path(out_dir) / "manifest.json").string(), manifest.to_json(records));
    ledger.save_jsonl((fs::path(out_dir) / "ledger.jsonl").string());
    if (manifest.incomplete) {
        std::cerr << "run incomplete: " << manifest.abort_reason
                  << " (partial manifest written; use `resume`)\n";
        return kProviderFailure;
    }
    emit_submission(manifest, records, (fs::path(out_dir) / "submission.tsv").string());
    std::cerr << "run " << manifest.run_id << " complete: f10=" << manifest.f10
              << " f1=" << manifest.f1 << "\n";
    return kOk;
}

int cmd_eval(const std::string& submission, const std::string& sources,
             const std::string& refs, const std::string& out_dir, bool as_json) {
    EvalReport report = evaluate_run(submission, sources, refs);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file((fs::path(out_dir) / "per_instance.csv").string(),
                   report.per_instance_csv());
        write_file((fs::path(out_dir) / "summary.json").string(), report.to_json());
        auto outs = load_dataset(submission);
        auto srcs = load_dataset(sources);
        std::map<std::string, std::string> src_by_key;
        for (const auto& s : srcs) src_by_key[s.key()] = s.text;
        std::vector<std::array<std::string, 3>> ids;
        std::vector<std::string> source_texts, output_texts;
        for (const auto& o : outs) {
            ids.push_back({o.pair_id, o.para_id, o.sent_id});
            source_texts.push_back(src_by_key[o.key()]);
            output_texts.push_back(o.text);
        }
        write_file((fs::path(out_dir) / "diff_report.html").string(),
                   diff_html(ids, source_texts, output_texts));
    }
    if (as_json) {
        std::cout << report.to_json() << "\n";
    } else {
        std::cout << "instances\t" << report.instance_count << "\n"
                  << "mean_sari\t" << report.mean_sari << "\n"
                  << "identity_baseline\t" << report.identity_baseline << "\n";
    }
    return kOk;
}

int cmd_report(const std::string& submission, const std::string& sources,
               const std::string& out) {
    auto outs = load_dataset(submission);
    auto srcs = load_dataset(sources);
    std::map<std::string, std::string> src_by_key;
    for (const auto& s : srcs) src_by_key[s.key()] = s.text;
    std::vector<std::array<std::string, 3>> ids;
    std::vector<std::string> source_texts, output_texts;
    for (const auto& o : outs) {
        auto it = src_by_key.find(o.key());
        if (it == src_by_key.end()) throw AlignmentError(o.key());
        ids.push_back({o.pair_id, o.para_id, o.sent_id});
        source_texts.push_back(it->second);
        output_texts.push_back(o.text);
    }
    write_file(out, diff_html(ids, source_texts, output_texts));
    std::cerr << "wrote " << out << "\n";
    return kOk;
}

int cmd_costs(const std::string& rows_path, bool as_json) {
    auto [rows, claims] = load_cost_rows(rows_path);
    CostReport report = ledger_report(rows, claims);
    std::cout << (as_json ? report.to_json() + "\n" : report.to_text());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scientific text simplification pipeline"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // index
    auto* index_cmd = app.add_subcommand("index", "Build an IDF index from a corpus");
    std::string index_docs, index_label = "corpus", index_out;
    std::size_t index_max_ngram = 4;
    index_cmd->add_option("--docs", index_docs, "Corpus directory or JSON-lines file")
        ->required();
    index_cmd->add_option("--label", index_label, "Corpus label (science/lifestyle/...)");
    index_cmd->add_option("--out", index_out, "Output index file")->required();
    index_cmd->add_option("--max-ngram", index_max_ngram, "Longest indexed phrase");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics");
    std::string stats_dataset, stats_hist_csv;
    bool stats_json = false;
    stats_cmd->add_option("--dataset", stats_dataset, "Dataset TSV/JSON-lines")->required();
    stats_cmd->add_flag("--json", stats_json, "Machine-readable output");
    stats_cmd->add_option("--hist-csv", stats_hist_csv, "Write length histogram CSV here");

    // mark
    auto* mark_cmd = app.add_subcommand("mark", "Mark complex terms with brackets");
    std::string mark_dataset, mark_science, mark_lifestyle, mark_out, mark_direction =
        "science_minus_lifestyle";
    double mark_threshold = 0.1;
    mark_cmd->add_option("--dataset", mark_dataset)->required();
    mark_cmd->add_option("--science", mark_science, "Science IDF index")->required();
    mark_cmd->add_option("--lifestyle", mark_lifestyle, "Lifestyle IDF index")->required();
    mark_cmd->add_option("--threshold", mark_threshold, "Complexity threshold");
    mark_cmd->add_option("--contrast-direction", mark_direction,
                         "science_minus_lifestyle | lifestyle_minus_science");
    mark_cmd->add_option("--out", mark_out, "Output JSON-lines (default stdout)");

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute a pipeline run");
    std::string run_config, run_dataset, run_out = "out";
    std::optional<std::uint64_t> run_seed;
    bool run_dry = false;
    run_cmd->add_option("--config", run_config, "Run config JSON")->required();
    run_cmd->add_option("--dataset", run_dataset)->required();
    run_cmd->add_option("--out", run_out, "Output directory");
    run_cmd->add_option("--seed", run_seed, "Override shuffle/mock seed");
    run_cmd->add_flag("--dry-run", run_dry, "Render prompts and estimate requests only");

    // resume
    auto* resume_cmd = app.add_subcommand("resume", "Resume an interrupted run");
    std::string resume_manifest;
    resume_cmd->add_option("--manifest", resume_manifest, "checkpoint.jsonl of the run")
        ->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "SARI evaluation of a submission");
    std::string eval_submission, eval_sources, eval_refs, eval_out;
    bool eval_json = false;
    eval_cmd->add_option("--submission", eval_submission)->required();
    eval_cmd->add_option("--sources", eval_sources)->required();
    eval_cmd->add_option("--refs", eval_refs)->required();
    eval_cmd->add_option("--out", eval_out, "Directory for CSV/JSON/HTML reports");
    eval_cmd->add_flag("--json", eval_json);

    // report
    auto* report_cmd = app.add_subcommand("report", "HTML diff report");
    std::string report_submission, report_sources, report_out = "diff_report.html";
    report_cmd->add_option("--submission", report_submission)->required();
    report_cmd->add_option("--sources", report_sources)->required();
    report_cmd->add_option("--out", report_out);

    // costs
    auto* costs_cmd = app.add_subcommand("costs", "Cost-ledger report");
    std::string costs_rows;
    bool costs_json = false;
    costs_cmd->add_option("--rows", costs_rows, "JSON file with cost rows and claims")
        ->required();
    costs_cmd->add_flag("--json", costs_json);

    for (auto* sub : app.get_subcommands({}))
        sub->set_version_flag("--version", kVersion);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUserError;
    }

    try {
        if (*index_cmd) return cmd_index(index_docs, index_label, index_out, index_max_ngram);
        if (*stats_cmd) return cmd_stats(stats_dataset, stats_json, stats_hist_csv);
        if (*mark_cmd)
            return cmd_mark(mark_dataset, mark_science, mark_lifestyle, mark_threshold,
                            mark_direction, mark_out);
        if (*run_cmd) {
            RunConfig config = RunConfig::load(run_config);
            if (run_seed) config.shuffle_seed = *run_seed;
            return execute_run(config, run_dataset, run_out, run_dry, nullptr);
        }
        if (*resume_cmd) {
            std::map<std::string, std::map<std::size_t, std::pair<std::string, OutcomePath>>>
                replay;
            json meta = load_checkpoint(resume_manifest, replay);
            if (!meta.contains("config"))
                throw Error("checkpoint has no meta line; cannot resume");
            std::string tmp = (fs::temp_directory_path() / "scisimp_resume_config.json").string();
            write_file(tmp, meta["config"].dump());
            RunConfig config = RunConfig::load(tmp);
            return execute_run(config, meta.at("dataset").get<std::string>(),
                               meta.at("out").get<std::string>(), false, &replay);
        }
        if (*eval_cmd)
            return cmd_eval(eval_submission, eval_sources, eval_refs, eval_out, eval_json);
        if (*report_cmd) return cmd_report(report_submission, report_sources, report_out);
        if (*costs_cmd) return cmd_costs(costs_rows, costs_json);
    } catch (const AuthMissingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kProviderFailure;
    } catch (const ProviderError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kProviderFailure;
    } catch (const IncompleteManifestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPartial;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUserError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUserError;
    }
    return kUserError;
}
