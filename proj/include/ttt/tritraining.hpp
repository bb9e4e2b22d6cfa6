#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ttt/columns.hpp"
#include "ttt/conllu.hpp"
#include "ttt/learner.hpp"
#include "ttt/rng.hpp"

namespace ttt {

enum class SeedMode { with_replacement, full_copy, two_and_a_half };

const char* seed_mode_name(SeedMode m);
SeedMode parse_seed_mode(const std::string& name);

struct TriConfig {
    long long augment_size = 40000;  // A: token budget per iteration per learner
    int iterations = 12;             // T
    double decay = 1.0;              // d
    bool oversample = false;         // o
    SeedMode seed_mode = SeedMode::two_and_a_half;
    ColumnSet agreement_columns;  // empty = the learner's predicted columns
    std::uint64_t master_seed = 1;
    double unlabelled_multiplier = 16.0;  // |U'| = multiplier * A tokens
    bool repeat_run = false;
    int ensemble_repeats = 21;  // combiner repeats for dev scoring
    LearnerSpec learner;
};

void validate(const TriConfig& config);

// Canonical identifier of (A, T, d, o, sampling mode), one of the five seed
// derivation inputs. Fixed key order, shortest round-trip float rendering.
std::string params_id(const TriConfig& config);

// Columns actually compared by the agreement filter.
ColumnSet effective_agreement_columns(const TriConfig& config);

// Token cap for data of iteration t' reused at iteration t: A * d^(t - t').
double decay_cap(double augment_size, double decay, int t, int t_prime);

// ---------------------------------------------------------------------------
// Seed data

struct SeedSample {
    int learner_index = 0;  // 1..3
    Corpus sentences;       // B_i
};

// with_replacement: |L| draws with replacement per learner.
// full_copy:        B_i = L.
// two_and_a_half:   two full seeded permutations plus half of a third, so
//                   half of the data appears twice and the rest three times;
//                   drawn independently per learner.
std::array<SeedSample, 3> sample_seed_data(const Corpus& labelled, SeedMode mode,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Agreement filter

struct TeacherProvenance {
    int u_index = 0;      // sentence index within U'
    int receiver = 0;     // 0-based learner index
    int teacher_j = 0;    // label source (lower agreeing index)
    int teacher_k = 0;
    bool all_agree = false;
};

struct AgreementStats {
    long long pair_agreed = 0;  // exactly one pair agreed
    long long all_agreed = 0;
    long long discarded = 0;
};

struct IterationData {
    int t = 0;
    std::array<Corpus, 3> new_data;  // L_{t,i}
    std::vector<TeacherProvenance> provenance;
    AgreementStats stats;
};

// Per sentence: if exactly one pair (j,k) agrees on every compared column of
// every token, the sentence with h_j's labels goes to the third learner; if
// all three agree the receiver is drawn uniformly (exactly one rng draw per
// fully-agreed sentence, in sentence order); otherwise the sentence is
// dropped.
IterationData agreement_filter(const std::array<Corpus, 3>& predictions, ColumnSet columns,
                               Rng& rng);

bool sentences_agree(const Sentence& a, const Sentence& b, ColumnSet columns);

// ---------------------------------------------------------------------------
// Budget handling

// Unchanged (same order) when already within budget, otherwise a seeded
// greedy whole-sentence sample under it.
Corpus cap_to_budget(const Corpus& data, double budget_tokens, std::uint64_t seed);

struct AssembledTrainingSet {
    Corpus data;  // B_i (possibly oversampled) ++ R, duplicates retained
    long long seed_tokens = 0;  // B_i tokens after oversampling
    long long history_tokens = 0;  // R tokens
    std::vector<double> caps;         // per t' = 1..t
    std::vector<long long> taken_tokens;  // per t' = 1..t
};

// R = concat over t' of a seeded sample of history[t'-1] capped at
// min(|L_{t',i}|, A*d^(t-t')) tokens; sets within their cap keep their
// stored order. With oversampling, B_i is repeated in seeded random order
// until it reaches R's token total (first overshoot allowed, upward only).
AssembledTrainingSet assemble_training_set(const Corpus& seed_data,
                                           const std::vector<Corpus>& history, long long A,
                                           double d, int t, bool oversample, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Run orchestration

struct IterationRecord {
    int t = 0;
    std::array<double, 3> learner_las = {0, 0, 0};
    double ens_mean = 0, ens_min = 0, ens_max = 0;
    std::array<long long, 3> new_tokens = {0, 0, 0};    // |L_{t,i}| after capping
    std::array<long long, 3> history_tokens = {0, 0, 0};  // R sizes
    std::array<long long, 3> train_tokens = {0, 0, 0};  // full training set sizes
    double seconds = 0;  // wall clock; written to timings.tsv only
};

struct RunLog {
    std::string params;
    std::vector<IterationRecord> records;  // iterations 0..T
    int selected_iteration = 0;
};

// Highest ensemble dev LAS; ties go to the earliest iteration.
int select_best_iteration(const std::vector<IterationRecord>& records);

// run-log.tsv is fully deterministic for a fixed config (wall time lives in
// timings.tsv, which is not).
void write_run_log(const RunLog& log, const std::string& path);
void write_timings(const RunLog& log, const std::string& path);

struct RunOptions {
    std::string run_dir;
    int workers = 1;
};

struct RunResult {
    RunLog log;
    std::array<ModelHandle, 3> selected_models;
};

// Full tri-training: iteration 0 trains on the seed samples alone; each
// later iteration samples U' (rejecting duplicates), predicts with all
// three models, filters by agreement, caps to A, assembles the decayed
// history and retrains all three learners unconditionally; the iteration
// with the best ensemble dev LAS supplies the final models.
RunResult run_tritraining(const TriConfig& config, const Corpus& labelled,
                          const Corpus& unlabelled, const Corpus& dev, const RunOptions& opts);

// ---------------------------------------------------------------------------
// Presets

struct Preset {
    std::string name;
    long long A = 0;
    int T = 0;
    double d = 1.0;
    bool oversample = false;
    bool repeat_run = false;
};

// The twelve-run grid: (40k,12,1), (80k,8,1), 2x(80k,8,0.5), 2x(160k,4,0.5),
// each with and without oversampling.
const std::vector<Preset>& standard_presets();
// The same grid with d in {0.5, 0.71} instead of {0.5, 1}.
const std::vector<Preset>& mbert_presets();
const Preset* find_preset(const std::string& name);

}  // namespace ttt
