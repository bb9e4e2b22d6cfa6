#include "ttt/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ttt/error.hpp"

namespace ttt {

namespace {

std::string universal_part(const std::string& deprel) {
    auto colon = deprel.find(':');
    return colon == std::string::npos ? deprel : deprel.substr(0, colon);
}

void check_alignment(const Corpus& gold, const Corpus& pred) {
    if (gold.sentences.size() != pred.sentences.size())
        throw AlignmentError("corpora differ in sentence count (" +
                             std::to_string(gold.sentences.size()) + " vs " +
                             std::to_string(pred.sentences.size()) + ")");
    for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
        const Sentence& g = gold.sentences[i];
        const Sentence& p = pred.sentences[i];
        if (g.token_count() != p.token_count())
            throw AlignmentError("sentence " + std::to_string(i + 1) + ": token counts differ (" +
                                 std::to_string(g.token_count()) + " vs " +
                                 std::to_string(p.token_count()) + ")");
        for (int t = 0; t < g.token_count(); ++t)
            if (g.tokens[t].form != p.tokens[t].form)
                throw AlignmentError("sentence " + std::to_string(i + 1) + ", token " +
                                     std::to_string(t + 1) + ": forms differ ('" +
                                     g.tokens[t].form + "' vs '" + p.tokens[t].form + "')");
    }
}

bool label_match(const Token& g, const Token& p, const EvalOptions& opts) {
    if (opts.universal_deprel) return universal_part(g.deprel) == universal_part(p.deprel);
    return g.deprel == p.deprel;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

EvalReport evaluate(const Corpus& gold, const Corpus& pred, const EvalOptions& opts) {
    check_alignment(gold, pred);
    EvalReport r;
    long long head_ok = 0, both_ok = 0;
    for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
        const Sentence& g = gold.sentences[i];
        const Sentence& p = pred.sentences[i];
        for (int t = 0; t < g.token_count(); ++t) {
            const bool h = g.tokens[t].head == p.tokens[t].head;
            const bool hl = h && label_match(g.tokens[t], p.tokens[t], opts);
            head_ok += h;
            both_ok += hl;
            r.correct_flags.push_back(hl ? 1 : 0);
        }
    }
    r.total_tokens = static_cast<long long>(r.correct_flags.size());
    if (r.total_tokens > 0) {
        r.uas = 100.0 * head_ok / r.total_tokens;
        r.las = 100.0 * both_ok / r.total_tokens;
    }
    return r;
}

std::unordered_set<std::string> training_vocabulary(const Corpus& train) {
    std::unordered_set<std::string> vocab;
    for (const Sentence& s : train.sentences)
        for (const Token& t : s.tokens) vocab.insert(t.form);
    return vocab;
}

BreakdownReport breakdown(const Corpus& gold, const Corpus& pred,
                          const std::unordered_set<std::string>& train_vocab,
                          const EvalOptions& opts) {
    check_alignment(gold, pred);
    BreakdownReport r;
    for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
        const Sentence& g = gold.sentences[i];
        const Sentence& p = pred.sentences[i];
        const int n = g.token_count();
        const int bin = n <= 9 ? 0 : n <= 19 ? 1 : n <= 39 ? 2 : 3;
        for (int t = 0; t < n; ++t) {
            const bool hl =
                g.tokens[t].head == p.tokens[t].head && label_match(g.tokens[t], p.tokens[t], opts);
            BreakdownCell& cls = train_vocab.count(g.tokens[t].form) ? r.iv : r.oov;
            cls.tokens++;
            cls.correct += hl;
            r.by_length[bin].tokens++;
            r.by_length[bin].correct += hl;
            DeprelCell& dep = r.by_deprel[opts.universal_deprel
                                              ? universal_part(g.tokens[t].deprel)
                                              : g.tokens[t].deprel];
            dep.tokens++;
            dep.correct += hl;
            r.total_tokens++;
        }
    }
    for (auto& [label, cell] : r.by_deprel) cell.below_threshold = cell.tokens < 20;
    return r;
}

SignificanceResult mcnemar(const std::vector<std::uint8_t>& flags1,
                           const std::vector<std::uint8_t>& flags2, McnemarMode mode) {
    if (flags1.size() != flags2.size())
        throw AlignmentError("flag vectors differ in length (" + std::to_string(flags1.size()) +
                             " vs " + std::to_string(flags2.size()) + ")");
    SignificanceResult r;
    for (std::size_t i = 0; i < flags1.size(); ++i) {
        if (flags1[i] && !flags2[i]) ++r.b;
        if (!flags1[i] && flags2[i]) ++r.c;
    }
    const long long n = r.b + r.c;
    if (n == 0) {
        r.p_value = 1.0;
        r.stars = 0;
        r.degenerate = true;
        return r;
    }
    const long long m = std::min(r.b, r.c);
    if (mode == McnemarMode::exact) {
        double tail;
        if (n <= 62) {
            // Exact in 64-bit integers: C(62,31) < 2^63.
            unsigned long long sum = 0, coef = 1;
            for (long long k = 0; k <= m; ++k) {
                sum += coef;
                coef = coef * static_cast<unsigned long long>(n - k) /
                       static_cast<unsigned long long>(k + 1);
            }
            tail = static_cast<double>(sum) * std::pow(0.5, static_cast<double>(n));
        } else {
            tail = 0.0;
            const double log_half = -std::log(2.0) * static_cast<double>(n);
            for (long long k = 0; k <= m; ++k) {
                double lc = std::lgamma(static_cast<double>(n) + 1.0) -
                            std::lgamma(static_cast<double>(k) + 1.0) -
                            std::lgamma(static_cast<double>(n - k) + 1.0);
                tail += std::exp(lc + log_half);
            }
        }
        r.p_value = std::min(1.0, 2.0 * tail);
    } else {
        const double diff = std::abs(static_cast<double>(r.b - r.c)) - 1.0;
        const double stat = diff <= 0 ? 0.0 : diff * diff / static_cast<double>(n);
        r.p_value = std::erfc(std::sqrt(stat / 2.0));  // chi-square survival, 1 dof
    }
    r.stars = stars_for_p(r.p_value);
    return r;
}

int stars_for_p(double p) {
    static constexpr double thresholds[5] = {0.05, 0.01, 0.001, 0.0001, 0.00001};
    int stars = 0;
    for (double th : thresholds)
        if (p <= th) ++stars;
    return stars;
}

std::string star_string(int stars) { return std::string(static_cast<std::size_t>(stars), '*'); }

std::vector<std::uint8_t> sentence_flags(const Corpus& gold,
                                         const std::vector<std::uint8_t>& token_flags) {
    if (static_cast<long long>(token_flags.size()) != gold.token_total())
        throw AlignmentError("token flag vector does not match corpus token total");
    std::vector<std::uint8_t> out;
    out.reserve(gold.sentences.size());
    std::size_t pos = 0;
    for (const Sentence& s : gold.sentences) {
        std::uint8_t all = 1;
        for (int t = 0; t < s.token_count(); ++t) all &= token_flags[pos++];
        out.push_back(all);
    }
    return out;
}

std::map<std::string, double> column_accuracy(const Corpus& gold, const Corpus& pred) {
    check_alignment(gold, pred);
    struct Counter {
        long long ok = 0, total = 0;
    };
    std::map<std::string, Counter> counts;
    for (std::size_t i = 0; i < gold.sentences.size(); ++i)
        for (int t = 0; t < gold.sentences[i].token_count(); ++t) {
            const Token& g = gold.sentences[i].tokens[t];
            const Token& p = pred.sentences[i].tokens[t];
            auto tally = [&](const char* name, const std::string& a, const std::string& b) {
                counts[name].total++;
                counts[name].ok += a == b;
            };
            tally("lemma", g.lemma, p.lemma);
            tally("upos", g.upos, p.upos);
            tally("xpos", g.xpos, p.xpos);
            tally("feats", g.feats, p.feats);
        }
    std::map<std::string, double> out;
    for (auto& [name, c] : counts) out[name] = c.total ? 100.0 * c.ok / c.total : 0.0;
    return out;
}

std::string render_eval(const EvalReport& r) {
    std::ostringstream out;
    out << "LAS " << fmt2(r.las) << "\n"
        << "UAS " << fmt2(r.uas) << "\n"
        << "tokens " << r.total_tokens << "\n";
    return out.str();
}

std::string render_breakdown_tsv(const BreakdownReport& r) {
    std::ostringstream out;
    out << "group\tclass\ttokens\tlas\tnote\n";
    out << "vocab\tOOV\t" << r.oov.tokens << "\t" << fmt2(r.oov.las()) << "\t\n";
    out << "vocab\tIV\t" << r.iv.tokens << "\t" << fmt2(r.iv.las()) << "\t\n";
    for (std::size_t i = 0; i < r.by_length.size(); ++i)
        out << "length\t" << kLengthBinLabels[i] << "\t" << r.by_length[i].tokens << "\t"
            << fmt2(r.by_length[i].las()) << "\t\n";
    for (const auto& [label, cell] : r.by_deprel)
        out << "deprel\t" << label << "\t" << cell.tokens << "\t" << fmt2(cell.las()) << "\t"
            << (cell.below_threshold ? "below-threshold" : "") << "\n";
    return out.str();
}

std::string render_significance(const SignificanceResult& r) {
    std::ostringstream out;
    out << "b " << r.b << "\n"
        << "c " << r.c << "\n"
        << "p " << fmt6(r.p_value) << "\n"
        << "stars " << star_string(r.stars) << "\n";
    if (r.degenerate) out << "note degenerate (no discordant pairs)\n";
    return out.str();
}

std::string report_json(const EvalReport& eval, const BreakdownReport* bd,
                        const SignificanceResult* sig) {
    nlohmann::json j;
    j["las"] = eval.las;
    j["uas"] = eval.uas;
    j["tokens"] = eval.total_tokens;
    if (bd != nullptr) {
        nlohmann::json b;
        b["oov"] = {{"tokens", bd->oov.tokens}, {"las", bd->oov.las()}};
        b["iv"] = {{"tokens", bd->iv.tokens}, {"las", bd->iv.las()}};
        nlohmann::json lens = nlohmann::json::object();
        for (std::size_t i = 0; i < bd->by_length.size(); ++i)
            lens[kLengthBinLabels[i]] = {{"tokens", bd->by_length[i].tokens},
                                         {"las", bd->by_length[i].las()}};
        b["length"] = lens;
        nlohmann::json deps = nlohmann::json::object();
        for (const auto& [label, cell] : bd->by_deprel)
            deps[label] = {{"tokens", cell.tokens},
                           {"las", cell.las()},
                           {"below_threshold", cell.below_threshold}};
        b["deprel"] = deps;
        j["breakdown"] = b;
    }
    if (sig != nullptr) {
        j["mcnemar"] = {{"b", sig->b},
                        {"c", sig->c},
                        {"p", sig->p_value},
                        {"stars", sig->stars},
                        {"degenerate", sig->degenerate}};
    }
    return j.dump(2) + "\n";
}

}  // namespace ttt
