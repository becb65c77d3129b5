#include "scisimp/sari.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "scisimp/corpus.hpp"
#include "scisimp/errors.hpp"
#include "scisimp/text.hpp"

using nlohmann::json;

namespace scisimp {
namespace {

using Counts = std::map<std::string, double>;

// n-gram multiset, keys are tokens joined with '\x1f'.
Counts ngram_counts(const std::vector<std::string>& tokens, int n) {
    Counts c;
    if (static_cast<int>(tokens.size()) < n) return c;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < n; ++k) {
            key += '\x1f';
            key += tokens[i + k];
        }
        c[key] += 1.0;
    }
    return c;
}

double get(const Counts& c, const std::string& key) {
    auto it = c.find(key);
    return it == c.end() ? 0.0 : it->second;
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

struct Components {
    double f_add = 0.0, f_keep = 0.0, p_del = 0.0;
};

Components sari_n(const std::vector<std::string>& src, const std::vector<std::string>& out,
                  const std::vector<std::vector<std::string>>& refs, int n) {
    Counts S = ngram_counts(src, n);
    Counts O = ngram_counts(out, n);
    Counts Rsum;  // summed, later divided by m for fractional averaged counts
    Counts Rany;  // binary presence in any reference
    for (const auto& ref : refs) {
        for (const auto& [g, c] : ngram_counts(ref, n)) {
            Rsum[g] += c;
            Rany[g] = 1.0;
        }
    }
    const double m = static_cast<double>(refs.size());

    // union of all n-gram keys
    std::map<std::string, char> keys;
    for (const auto& [g, _] : S) keys[g] = 0;
    for (const auto& [g, _] : O) keys[g] = 0;
    for (const auto& [g, _] : Rsum) keys[g] = 0;

    double add_total = 0, add_correct = 0, add_target = 0;
    double keep_total = 0, keep_correct = 0, keep_target = 0;
    double del_total = 0, del_correct = 0;
    for (const auto& [g, _] : keys) {
        double s = get(S, g), o = get(O, g);
        double r = get(Rsum, g) / m;  // fractional averaged reference count
        double in_any_ref = get(Rany, g);

        // Addition is scored over distinct n-grams (reference presence is
        // binary), matching the metric's standard behavior; keep/del use
        // multiset counts.
        double a = std::max(0.0, o - s) > 0.0 ? 1.0 : 0.0;
        add_total += a;
        add_correct += std::min(a, in_any_ref);
        add_target += (in_any_ref > 0 && s == 0.0) ? 1.0 : 0.0;

        double k = std::min(o, s);                 // kept n-grams
        double k_target = std::min(s, r);
        keep_total += k;
        keep_correct += std::min(k, k_target);
        keep_target += k_target;

        double d = std::max(0.0, s - o);           // deleted n-grams
        double d_target = std::max(0.0, s - r);
        del_total += d;
        del_correct += std::min(d, d_target);
    }

    Components comp;
    comp.f_add = harmonic(ratio(add_correct, add_total), ratio(add_correct, add_target));
    comp.f_keep = harmonic(ratio(keep_correct, keep_total), ratio(keep_correct, keep_target));
    comp.p_del = ratio(del_correct, del_total);
    return comp;
}

}  // namespace

SariBreakdown sari(const EvalInstance& instance) {
    if (instance.references.empty()) throw EmptyReferenceSetError();

    std::vector<std::string> src = tokenize_for_eval(instance.source);
    std::vector<std::string> out = tokenize_for_eval(instance.output);
    std::vector<std::vector<std::string>> refs;
    for (const auto& r : instance.references) refs.push_back(tokenize_for_eval(r));

    SariBreakdown b;
    double sum = 0.0;
    for (int n = 1; n <= SariBreakdown::kMaxN; ++n) {
        Components c = sari_n(src, out, refs, n);
        b.f_add[n - 1] = c.f_add;
        b.f_keep[n - 1] = c.f_keep;
        b.p_del[n - 1] = c.p_del;
        sum += (c.f_add + c.f_keep + c.p_del) / 3.0;
    }
    b.final_score = 100.0 * sum / SariBreakdown::kMaxN;
    return b;
}

// ---- File-level evaluation --------------------------------------------------

namespace {

// References file: TSV with header pair_id, para_id, sent_id, then one or more
// reference columns; or JSON-lines with a "references" array.
std::map<std::string, std::vector<std::string>> load_references(const std::string& path) {
    std::map<std::string, std::vector<std::string>> refs;
    std::ifstream in(path);
    if (!in) throw Error("cannot open references file: " + path);
    std::string line;
    std::size_t lineno = 0;
    bool tsv = false;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            tsv = line.rfind("pair_id\t", 0) == 0;
            if (tsv) continue;
        }
        if (tsv) {
            std::vector<std::string> fields;
            std::stringstream ss(line);
            std::string f;
            std::size_t start = 0;
            while (true) {
                std::size_t pos = line.find('\t', start);
                fields.push_back(line.substr(start, pos == std::string::npos
                                                        ? std::string::npos
                                                        : pos - start));
                if (pos == std::string::npos) break;
                start = pos + 1;
            }
            if (fields.size() < 4) throw ParseError("expected id columns + references", lineno);
            std::string key = fields[0] + "\t" + fields[1] + "\t" + fields[2];
            std::vector<std::string> r(fields.begin() + 3, fields.end());
            r.erase(std::remove(r.begin(), r.end(), std::string{}), r.end());
            refs[key] = std::move(r);
        } else {
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.contains("references"))
                throw ParseError("expected JSON object with \"references\"", lineno);
            std::string key = j["pair_id"].get<std::string>() + "\t" +
                              j["para_id"].get<std::string>() + "\t" +
                              j["sent_id"].get<std::string>();
            refs[key] = j["references"].get<std::vector<std::string>>();
        }
    }
    return refs;
}

}  // namespace

EvalReport evaluate_run(const std::string& submission_path, const std::string& sources_path,
                        const std::string& references_path) {
    std::vector<TextRecord> outputs = load_dataset(submission_path);
    std::vector<TextRecord> sources = load_dataset(sources_path);
    auto refs = load_references(references_path);

    std::map<std::string, const std::string*> source_by_key;
    for (const auto& s : sources) source_by_key[s.key()] = &s.text;

    std::string misaligned;
    for (const auto& o : outputs)
        if (!source_by_key.contains(o.key()))
            misaligned += (misaligned.empty() ? "" : ", ") + o.key();
    if (outputs.size() != sources.size())
        misaligned += (misaligned.empty() ? "" : "; ") + std::string("count mismatch: ") +
                      std::to_string(outputs.size()) + " vs " + std::to_string(sources.size());
    if (!misaligned.empty()) throw AlignmentError(misaligned);

    EvalReport report;
    double sum = 0.0, baseline_sum = 0.0;
    for (const auto& o : outputs) {
        auto rit = refs.find(o.key());
        if (rit == refs.end() || rit->second.empty())
            throw AlignmentError("no references for " + o.key());
        const std::string& src = *source_by_key[o.key()];
        EvalInstance inst{src, o.text, rit->second};
        double score = sari(inst).final_score;
        baseline_sum += sari({src, src, rit->second}).final_score;
        sum += score;
        report.per_instance.push_back({o.key(), score});
    }
    report.instance_count = outputs.size();
    if (report.instance_count > 0) {
        report.mean_sari = sum / report.instance_count;
        report.identity_baseline = baseline_sum / report.instance_count;
    }
    return report;
}

std::string EvalReport::to_json() const {
    json j;
    j["instances"] = instance_count;
    j["mean_sari"] = mean_sari;
    j["identity_baseline"] = identity_baseline;
    return j.dump(2);
}

std::string EvalReport::per_instance_csv() const {
    std::ostringstream out;
    out << "pair_id,para_id,sent_id,sari\n";
    for (const auto& s : per_instance) {
        std::string key = s.key;
        std::replace(key.begin(), key.end(), '\t', ',');
        out << key << "," << s.score << "\n";
    }
    return out.str();
}

}  // namespace scisimp
