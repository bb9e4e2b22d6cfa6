#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ttt/conllu.hpp"
#include "ttt/perceptron.hpp"
#include "ttt/transition.hpp"

namespace ttt {

// Greedy arc-standard transition parser with an averaged perceptron scoring
// shift/left-arc(l)/right-arc(l) actions jointly. Every transition sequence
// it can emit yields a valid single-root tree, so outputs are valid trees
// by construction. Non-projective training sentences are skipped (counted).
class TransitionParser {
public:
    struct TrainStats {
        long long sentences_used = 0;
        long long nonprojective_excluded = 0;
    };

    TrainStats train(const Corpus& corpus, int epochs, std::uint64_t seed);

    // Fills head/deprel from forms and (possibly predicted) upos.
    void parse(Sentence& s) const;

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    FeatureMap features_;
    std::vector<std::string> labels_;
    std::vector<char> is_root_label_;     // label ever observed on a head-0 arc
    std::vector<char> is_nonroot_label_;  // label ever observed on a non-root arc
    bool has_root_labels_ = false;
    bool has_nonroot_labels_ = false;
    AveragedPerceptron model_{1};

    void featurize(const std::vector<const std::string*>& form,
                   const std::vector<const std::string*>& upos, const ParserState& state,
                   std::vector<std::string>& out) const;
    int pick_action(const ParserState& state, const std::vector<long long>& scores) const;
    bool action_allowed(const ParserState& state, int action_id) const;
};

}  // namespace ttt
