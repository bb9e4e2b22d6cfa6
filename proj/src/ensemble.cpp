#include "ttt/ensemble.hpp"

#include <algorithm>

#include "ttt/error.hpp"
#include "ttt/metrics.hpp"

namespace ttt {

namespace {

void check_tree_alignment(const std::vector<const Sentence*>& trees) {
    if (trees.size() < 2) throw ValidationError("combiner needs at least two input trees");
    const int n = trees[0]->token_count();
    for (std::size_t s = 1; s < trees.size(); ++s) {
        if (trees[s]->token_count() != n)
            throw AlignmentError("combiner inputs differ in token count");
        for (int t = 0; t < n; ++t)
            if (trees[s]->tokens[t].form != trees[0]->tokens[t].form)
                throw AlignmentError("combiner inputs differ in forms at token " +
                                     std::to_string(t + 1));
    }
}

// Majority value for one non-syntactic column; rng breaks ties uniformly
// over the tied values in first-appearance order.
std::string majority_value(const std::vector<const Sentence*>& trees, int token,
                           const std::string Token::*column, Rng& rng) {
    std::vector<std::pair<std::string, int>> counts;
    for (const Sentence* s : trees) {
        const std::string& v = s->tokens[token].*column;
        bool found = false;
        for (auto& [value, n] : counts)
            if (value == v) {
                ++n;
                found = true;
                break;
            }
        if (!found) counts.emplace_back(v, 1);
    }
    int best = 0;
    for (const auto& [value, n] : counts) best = std::max(best, n);
    std::vector<const std::string*> tied;
    for (const auto& [value, n] : counts)
        if (n == best) tied.push_back(&value);
    if (tied.size() == 1) return *tied[0];
    return *tied[rng.index(tied.size())];
}

}  // namespace

Sentence combine_trees(const std::vector<const Sentence*>& trees, Rng& rng, VoteMode mode) {
    check_tree_alignment(trees);
    const int n = trees[0]->token_count();
    const int n_systems = static_cast<int>(trees.size());

    // Vote aggregation per dependent, candidates in first-appearance order.
    std::vector<std::vector<ArcVote>> votes(static_cast<std::size_t>(n) + 1);
    for (int s = 0; s < n_systems; ++s)
        for (int d = 1; d <= n; ++d) {
            const Token& tok = trees[s]->tokens[d - 1];
            auto& cands = votes[d];
            bool found = false;
            for (ArcVote& v : cands) {
                const bool same = mode == VoteMode::exact_pair
                                      ? (v.head == tok.head && v.deprel == tok.deprel)
                                      : v.head == tok.head;
                if (same) {
                    ++v.votes;
                    v.proposers.push_back(s);
                    found = true;
                    break;
                }
            }
            if (!found) {
                ArcVote v;
                v.dependent = d;
                v.head = tok.head;
                v.deprel = tok.deprel;
                v.votes = 1;
                v.proposers.push_back(s);
                cands.push_back(std::move(v));
            }
        }

    std::vector<char> attached(static_cast<std::size_t>(n) + 1, 0);
    attached[0] = 1;
    bool root_taken = false;
    Sentence out;
    out.comments = trees[0]->comments;
    out.extras = trees[0]->extras;
    out.tokens = trees[0]->tokens;

    for (int step = 0; step < n; ++step) {
        // Arcs whose head is attached and dependent is not; at most one arc
        // may use the virtual root.
        int best_votes = 0;
        std::vector<const ArcVote*> tied;
        for (int d = 1; d <= n; ++d) {
            if (attached[d]) continue;
            for (const ArcVote& v : votes[d]) {
                if (!attached[v.head]) continue;
                if (v.head == 0 && root_taken) continue;
                if (v.votes > best_votes) {
                    best_votes = v.votes;
                    tied.clear();
                    tied.push_back(&v);
                } else if (v.votes == best_votes) {
                    tied.push_back(&v);
                }
            }
        }
        // Every input is a tree, so an attachable arc always exists.
        if (tied.empty()) throw ValidationError("combiner inputs are not valid trees");
        const ArcVote* chosen = tied.size() == 1 ? tied[0] : tied[rng.index(tied.size())];

        std::string label = chosen->deprel;
        if (mode == VoteMode::head_only) {
            // Plurality label among the systems that proposed this head.
            std::vector<std::pair<const std::string*, int>> counts;
            for (int s : chosen->proposers) {
                const std::string& l = trees[s]->tokens[chosen->dependent - 1].deprel;
                bool found = false;
                for (auto& [value, cnt] : counts)
                    if (*value == l) {
                        ++cnt;
                        found = true;
                        break;
                    }
                if (!found) counts.emplace_back(&l, 1);
            }
            int best = 0;
            for (auto& [value, cnt] : counts) best = std::max(best, cnt);
            std::vector<const std::string*> tied_labels;
            for (auto& [value, cnt] : counts)
                if (cnt == best) tied_labels.push_back(value);
            label = tied_labels.size() == 1 ? *tied_labels[0]
                                            : *tied_labels[rng.index(tied_labels.size())];
        }

        attached[chosen->dependent] = 1;
        if (chosen->head == 0) root_taken = true;
        out.tokens[chosen->dependent - 1].head = chosen->head;
        out.tokens[chosen->dependent - 1].deprel = label;
    }

    // Non-syntactic columns by per-token majority, token order fixed.
    for (int t = 0; t < n; ++t) {
        out.tokens[t].lemma = majority_value(trees, t, &Token::lemma, rng);
        out.tokens[t].upos = majority_value(trees, t, &Token::upos, rng);
        out.tokens[t].xpos = majority_value(trees, t, &Token::xpos, rng);
        out.tokens[t].feats = majority_value(trees, t, &Token::feats, rng);
    }
    return out;
}

std::vector<Corpus> combine_corpora(const std::vector<Corpus>& systems,
                                    const CombinerConfig& config) {
    if (systems.size() < 2) throw ValidationError("combiner needs at least two systems");
    if (config.repeats < 1) throw ValidationError("combiner repeats must be >= 1");
    const std::size_t n_sentences = systems[0].sentences.size();
    for (const Corpus& c : systems)
        if (c.sentences.size() != n_sentences)
            throw AlignmentError("combiner systems differ in sentence count");

    std::vector<Corpus> out;
    out.reserve(static_cast<std::size_t>(config.repeats));
    for (int r = 0; r < config.repeats; ++r) {
        Corpus combined;
        combined.origin = Origin::predicted;
        combined.sentences.reserve(n_sentences);
        for (std::size_t s = 0; s < n_sentences; ++s) {
            std::vector<const Sentence*> trees;
            trees.reserve(systems.size());
            for (const Corpus& c : systems) trees.push_back(&c.sentences[s]);
            Rng rng(fnv1a64("combine|seed=" + std::to_string(config.base_seed) +
                            "|repeat=" + std::to_string(r) + "|sentence=" + std::to_string(s)));
            combined.sentences.push_back(combine_trees(trees, rng, config.mode));
        }
        out.push_back(std::move(combined));
    }
    return out;
}

EnsembleScore averaged_ensemble_las(const std::vector<Corpus>& systems, const Corpus& gold,
                                    const CombinerConfig& config) {
    const std::vector<Corpus> combined = combine_corpora(systems, config);
    EnsembleScore score;
    score.per_repeat.reserve(combined.size());
    for (const Corpus& c : combined) score.per_repeat.push_back(evaluate(gold, c).las);
    score.min = score.per_repeat[0];
    score.max = score.per_repeat[0];
    double sum = 0;
    for (double v : score.per_repeat) {
        sum += v;
        score.min = std::min(score.min, v);
        score.max = std::max(score.max, v);
    }
    score.mean = sum / static_cast<double>(score.per_repeat.size());
    return score;
}

}  // namespace ttt
