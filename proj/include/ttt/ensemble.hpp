#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttt/conllu.hpp"
#include "ttt/rng.hpp"

namespace ttt {

enum class VoteMode {
    exact_pair,  // a vote is an exact (head, deprel) pair
    head_only    // votes count heads; the label is the plurality among proposers
};

struct CombinerConfig {
    int repeats = 21;
    std::uint64_t base_seed = 0;
    VoteMode mode = VoteMode::exact_pair;
};

struct ArcVote {
    int dependent = 0;
    int head = 0;
    std::string deprel;
    int votes = 0;
    std::vector<int> proposers;  // system indices
};

// Greedy top-down linear combination of token-aligned trees: starting from
// the virtual root, repeatedly attach the arc with the most votes among
// arcs whose head is already attached and whose dependent is not, breaking
// vote ties uniformly at random. Only one token may attach to the root, so
// the result is always a valid single-root tree. Non-syntactic columns are
// per-token majorities with the same rng for ties.
Sentence combine_trees(const std::vector<const Sentence*>& trees, Rng& rng,
                       VoteMode mode = VoteMode::exact_pair);

// `repeats` combined corpora; repeat r combines sentence s with an rng
// stream derived from (base_seed, r, s), so results are independent of
// evaluation order.
std::vector<Corpus> combine_corpora(const std::vector<Corpus>& systems,
                                    const CombinerConfig& config);

struct EnsembleScore {
    double mean = 0, min = 0, max = 0;
    std::vector<double> per_repeat;
};

// Combines `repeats` times and evaluates each repeat against gold; the mean
// is the canonical ensemble score.
EnsembleScore averaged_ensemble_las(const std::vector<Corpus>& systems, const Corpus& gold,
                                    const CombinerConfig& config);

}  // namespace ttt
