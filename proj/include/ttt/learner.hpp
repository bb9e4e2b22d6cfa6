#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "ttt/columns.hpp"
#include "ttt/conllu.hpp"

namespace ttt {

enum class LearnerKind { builtin_perceptron, external };

struct LearnerSpec {
    LearnerKind kind = LearnerKind::builtin_perceptron;
    int epochs = 10;  // builtin
    int beam = 1;     // builtin; 1 = greedy (the only supported width)
    std::string external_cmd;
    // head/deprel are always predicted; the builtin learner can add upos,
    // external learners may cover all six columns.
    ColumnSet predicted_columns = ColumnSet::of({Column::upos, Column::head, Column::deprel});

    bool operator==(const LearnerSpec&) const = default;
};

// Throws ValidationError when the spec is self-inconsistent.
void validate(const LearnerSpec& spec);

// The inputs of the seed derivation rule: the master experiment seed, a
// canonical identifier of the tri-training parameters, whether the run is a
// repeat run, the learner number and the tri-training iteration.
struct SeedCoordinates {
    std::uint64_t master_seed = 0;
    std::string params_id;
    bool is_repeat = false;
    int learner_index = 0;  // 1..3 for learners, 0 for run-level streams
    int iteration = 0;
};

// Canonical rendering hashed by derive_seed. Documented in the README so
// external learners can reproduce the derivation.
std::string coordinate_string(const SeedCoordinates& coords);

// Stable 64-bit FNV-1a over coordinate_string. Identical on every platform.
std::uint64_t derive_seed(const SeedCoordinates& coords);

// Named per-purpose stream: same derivation with a purpose suffix, so every
// random draw in a run has its own reproducible stream.
std::uint64_t derive_stream_seed(const SeedCoordinates& coords, std::string_view purpose);

struct ModelManifest {
    LearnerSpec spec;
    std::string corpus_fnv;  // hex FNV-1a of the serialized training corpus
    std::uint64_t seed = 0;
    int learner_index = 0;
    int iteration = 0;
    long long sentences = 0;
    long long nonprojective_excluded = 0;
    double dev_las = -1.0;  // < 0 when not yet evaluated
};

struct BuiltinModel;  // opaque; defined in learner.cpp

// Reference to one trained model h_i: the artifact directory plus its
// training manifest. Immutable after training; predict() is read-only and
// safe to call concurrently.
struct ModelHandle {
    std::string path;
    ModelManifest manifest;
    std::shared_ptr<const BuiltinModel> cached;
};

// Trains a model into `model_dir` (created if needed) and writes
// manifest.txt beside the weight files. Builtin: averaged-perceptron UPOS
// tagger followed by an arc-standard transition parser, sentence order
// shuffled per epoch by `seed`, non-projective sentences excluded from
// parser training and counted in the manifest. External: invokes the
// subprocess contract `<cmd> train --train <file> --seed <n> --model <dir>`
// and blocks until it finishes.
ModelHandle train_learner(const LearnerSpec& spec, const Corpus& corpus, std::uint64_t seed,
                          const std::string& model_dir, int learner_index = 0, int iteration = 0);

// Aligned 1:1 with the input; predicted columns filled, all others "_"
// (head/deprel always filled). Builtin outputs are valid trees by
// construction.
Corpus predict(const ModelHandle& model, const Corpus& input);

// Re-opens a model directory written by train_learner.
ModelHandle load_model_handle(const std::string& model_dir);

// Persists manifest changes (e.g. dev_las filled in after evaluation).
void write_manifest(const ModelHandle& model);

std::string fnv_hex(std::uint64_t value);
std::uint64_t corpus_fingerprint(const Corpus& corpus);

}  // namespace ttt
