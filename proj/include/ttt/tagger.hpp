#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ttt/conllu.hpp"
#include "ttt/perceptron.hpp"

namespace ttt {

// Greedy left-to-right averaged-perceptron UPOS tagger. The previously
// predicted tags feed the feature set, Collins-style.
class PerceptronTagger {
public:
    void train(const Corpus& corpus, int epochs, std::uint64_t seed);
    void tag(Sentence& s) const;

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    FeatureMap features_;
    std::vector<std::string> tags_;
    AveragedPerceptron model_{0};

    void featurize(const Sentence& s, int pos, const std::vector<int>& prev_tags,
                   std::vector<std::string>& out) const;
    int best_tag(const std::vector<long long>& scores) const;
};

}  // namespace ttt
