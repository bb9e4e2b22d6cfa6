#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "ttt/conllu.hpp"

namespace ttt {

struct EvalOptions {
    // Compare the full dependency label by default; true compares only the
    // universal part before ":".
    bool universal_deprel = false;
};

struct EvalReport {
    double las = 0.0;
    double uas = 0.0;
    long long total_tokens = 0;
    // head AND deprel correct, in gold token order. Used for McNemar.
    std::vector<std::uint8_t> correct_flags;
};

// Token-aligned LAS/UAS. Gold and pred must have identical sentence count,
// lengths and forms; mismatch raises AlignmentError naming the first
// offending sentence index (1-based).
EvalReport evaluate(const Corpus& gold, const Corpus& pred, const EvalOptions& opts = {});

struct BreakdownCell {
    long long tokens = 0;
    long long correct = 0;
    double las() const { return tokens == 0 ? 0.0 : 100.0 * correct / tokens; }
};

struct DeprelCell {
    long long tokens = 0;
    long long correct = 0;
    bool below_threshold = false;  // fewer than 20 gold occurrences
    double las() const { return tokens == 0 ? 0.0 : 100.0 * correct / tokens; }
};

inline constexpr std::array<const char*, 4> kLengthBinLabels = {"<=9", "10-19", "20-39", ">=40"};

struct BreakdownReport {
    BreakdownCell oov, iv;
    std::array<BreakdownCell, 4> by_length;   // sentence length bins <=9 / 10-19 / 20-39 / >=40
    std::map<std::string, DeprelCell> by_deprel;  // grouped by gold label
    long long total_tokens = 0;
};

std::unordered_set<std::string> training_vocabulary(const Corpus& train);

// OOV status is exact string match of the form against the labelled
// training vocabulary; each token falls in exactly one OOV/IV class and
// one length bin (by its sentence's length).
BreakdownReport breakdown(const Corpus& gold, const Corpus& pred,
                          const std::unordered_set<std::string>& train_vocab,
                          const EvalOptions& opts = {});

enum class McnemarMode { exact, chisquare };

struct SignificanceResult {
    long long b = 0;  // system1 correct, system2 wrong
    long long c = 0;  // system1 wrong, system2 correct
    double p_value = 1.0;
    int stars = 0;
    bool degenerate = false;  // b == c == 0
};

// Two-sided McNemar test over paired correctness flags. The exact mode
// computes p = min(1, 2 * sum_{k=0..min(b,c)} C(b+c,k) / 2^(b+c)); the
// chisquare mode uses the continuity-corrected statistic (|b-c|-1)^2/(b+c).
SignificanceResult mcnemar(const std::vector<std::uint8_t>& flags1,
                           const std::vector<std::uint8_t>& flags2,
                           McnemarMode mode = McnemarMode::exact);

// 1..5 stars at p <= 0.05, 0.01, 0.001, 0.0001, 0.00001.
int stars_for_p(double p);
std::string star_string(int stars);

// Collapses token flags to one flag per sentence (all tokens correct).
std::vector<std::uint8_t> sentence_flags(const Corpus& gold,
                                         const std::vector<std::uint8_t>& token_flags);

// Per-column accuracy over lemma/upos/xpos/feats (informational only).
std::map<std::string, double> column_accuracy(const Corpus& gold, const Corpus& pred);

// ---------------------------------------------------------------------------
// Rendering

std::string render_eval(const EvalReport& r);
std::string render_breakdown_tsv(const BreakdownReport& r);
std::string render_significance(const SignificanceResult& r);
std::string report_json(const EvalReport& eval, const BreakdownReport* bd,
                        const SignificanceResult* sig);

}  // namespace ttt
