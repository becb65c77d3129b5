#pragma once

#include <array>
#include <string>
#include <vector>

namespace scisimp {

struct EvalInstance {
    std::string source;
    std::string output;
    std::vector<std::string> references;  // non-empty
};

// Per-n components on [0,1]; final on [0,100].
struct SariBreakdown {
    static constexpr int kMaxN = 4;
    std::array<double, kMaxN> f_add{};   // index n-1
    std::array<double, kMaxN> f_keep{};
    std::array<double, kMaxN> p_del{};
    double final_score = 0.0;
};

// SARI over n = 1..4 with averaged (fractional) reference counts and the
// 0/0 := 0 convention. Throws EmptyReferenceSetError.
SariBreakdown sari(const EvalInstance& instance);

struct InstanceScore {
    std::string key;  // pair_id \t para_id \t sent_id
    double score = 0.0;
};

struct EvalReport {
    std::size_t instance_count = 0;
    double mean_sari = 0.0;
    double identity_baseline = 0.0;  // output := source, same references
    std::vector<InstanceScore> per_instance;

    std::string to_json() const;
    std::string per_instance_csv() const;
};

// Scores a submission TSV against sources and a references file, aligned on
// (pair_id, para_id, sent_id). Throws AlignmentError listing mismatched ids.
EvalReport evaluate_run(const std::string& submission_path,
                        const std::string& sources_path,
                        const std::string& references_path);

}  // namespace scisimp
