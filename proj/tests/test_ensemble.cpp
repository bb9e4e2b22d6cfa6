#include <doctest.h>

#include <algorithm>

#include "support/test_util.hpp"
#include "ttt/ensemble.hpp"
#include "ttt/error.hpp"
#include "ttt/metrics.hpp"

using namespace ttt;

namespace {

const std::vector<std::string> kLabels = {"dep", "nmod", "obj"};

Corpus corpus_of(const std::vector<Sentence>& sentences) {
    Corpus c;
    c.sentences = sentences;
    return c;
}

Sentence same_forms(const Sentence& proto, const Sentence& tree) {
    Sentence s = tree;
    for (int i = 0; i < s.token_count(); ++i) s.tokens[i].form = proto.tokens[i].form;
    return s;
}

}  // namespace

TEST_SUITE("ensemble") {
    TEST_CASE("unanimous inputs pass through unchanged") {
        Rng gen(1);
        const Sentence t = testutil::random_tree(gen, 6, kLabels);
        Rng rng(2);
        const Sentence out = combine_trees({&t, &t, &t}, rng);
        for (int i = 0; i < 6; ++i) {
            CHECK(out.tokens[i].head == t.tokens[i].head);
            CHECK(out.tokens[i].deprel == t.tokens[i].deprel);
        }
    }

    TEST_CASE("a two-vote majority tree always wins") {
        Rng gen(3);
        for (int round = 0; round < 300; ++round) {
            const int n = 2 + static_cast<int>(gen.below(9));
            const Sentence majority = testutil::random_tree(gen, n, kLabels);
            const Sentence other = same_forms(majority, testutil::random_tree(gen, n, kLabels));
            Rng rng(round);
            const Sentence out = combine_trees({&majority, &other, &majority}, rng);
            for (int i = 0; i < n; ++i) {
                CHECK(out.tokens[i].head == majority.tokens[i].head);
                CHECK(out.tokens[i].deprel == majority.tokens[i].deprel);
            }
        }
    }

    TEST_CASE("outputs are valid trees on random disagreeing inputs") {
        Rng gen(7);
        for (int round = 0; round < 1000; ++round) {
            const int n = 2 + static_cast<int>(gen.below(9));
            const Sentence a = testutil::random_tree(gen, n, kLabels);
            const Sentence b = same_forms(a, testutil::random_tree(gen, n, kLabels));
            const Sentence c = same_forms(a, testutil::random_tree(gen, n, kLabels));
            Rng rng(round * 31 + 1);
            const Sentence out = combine_trees({&a, &b, &c}, rng);
            CHECK(is_valid_tree(out));
        }
    }

    TEST_CASE("unanimous arcs always survive") {
        Rng gen(11);
        for (int round = 0; round < 200; ++round) {
            const int n = 3 + static_cast<int>(gen.below(7));
            const Sentence a = testutil::random_tree(gen, n, kLabels);
            Sentence b = same_forms(a, testutil::random_tree(gen, n, kLabels));
            Sentence c = same_forms(a, testutil::random_tree(gen, n, kLabels));
            // Force unanimity on token 1.
            b.tokens[0] = a.tokens[0];
            c.tokens[0] = a.tokens[0];
            Rng rng(round);
            const Sentence out = combine_trees({&a, &b, &c}, rng);
            CHECK(out.tokens[0].head == a.tokens[0].head);
            CHECK(out.tokens[0].deprel == a.tokens[0].deprel);
        }
    }

    TEST_CASE("the output has one root even when inputs disagree on it") {
        // Three chains rooted at different tokens.
        auto chain_rooted_at = [&](int root, int n) {
            Sentence s;
            for (int i = 1; i <= n; ++i) {
                Token t;
                t.id = i;
                t.form = "w" + std::to_string(i);
                if (i == root) {
                    t.head = 0;
                    t.deprel = "root";
                } else {
                    t.head = i < root ? i + 1 : i - 1;  // chain toward the root
                    t.deprel = "dep";
                }
                s.tokens.push_back(std::move(t));
            }
            return s;
        };
        const Sentence a = chain_rooted_at(1, 4);
        const Sentence b = chain_rooted_at(2, 4);
        const Sentence c = chain_rooted_at(4, 4);
        REQUIRE(is_valid_tree(a));
        REQUIRE(is_valid_tree(b));
        REQUIRE(is_valid_tree(c));
        for (int seed = 0; seed < 20; ++seed) {
            Rng rng(seed);
            const Sentence out = combine_trees({&a, &b, &c}, rng);
            int roots = 0;
            for (const Token& t : out.tokens) roots += t.head == 0;
            CHECK(roots == 1);
            CHECK(is_valid_tree(out));
        }
    }

    TEST_CASE("same seed means same combination") {
        Rng gen(13);
        const Sentence a = testutil::random_tree(gen, 8, kLabels);
        const Sentence b = same_forms(a, testutil::random_tree(gen, 8, kLabels));
        const Sentence c = same_forms(a, testutil::random_tree(gen, 8, kLabels));
        Rng r1(555), r2(555);
        const Sentence o1 = combine_trees({&a, &b, &c}, r1);
        const Sentence o2 = combine_trees({&a, &b, &c}, r2);
        CHECK(o1.tokens == o2.tokens);
    }

    TEST_CASE("misaligned inputs are rejected") {
        Rng gen(17);
        const Sentence a = testutil::random_tree(gen, 5, kLabels);
        Sentence b = same_forms(a, testutil::random_tree(gen, 5, kLabels));
        b.tokens[2].form = "other";
        Rng rng(1);
        CHECK_THROWS_AS(combine_trees({&a, &b}, rng), AlignmentError);
    }

    TEST_CASE("combine_corpora: repeats are deterministic per seed") {
        Rng gen(19);
        std::vector<Sentence> base;
        for (int i = 0; i < 5; ++i) base.push_back(testutil::random_tree(gen, 6, kLabels));
        std::vector<Corpus> systems(3, corpus_of(base));
        for (int sys = 1; sys < 3; ++sys)
            for (auto& s : systems[sys].sentences)
                s = same_forms(s, testutil::random_tree(gen, 6, kLabels));

        CombinerConfig config;
        config.repeats = 1;
        config.base_seed = 99;
        const auto once = combine_corpora(systems, config);
        const auto again = combine_corpora(systems, config);
        REQUIRE(once.size() == 1);
        CHECK(write_conllu(once[0]) == write_conllu(again[0]));
    }

    TEST_CASE("identical systems make identical repeats") {
        Rng gen(23);
        std::vector<Sentence> base;
        for (int i = 0; i < 4; ++i) base.push_back(testutil::random_tree(gen, 5, kLabels));
        const std::vector<Corpus> systems(3, corpus_of(base));
        CombinerConfig config;
        config.repeats = 5;
        config.base_seed = 7;
        const auto repeats = combine_corpora(systems, config);
        for (const Corpus& c : repeats) CHECK(write_conllu(c) == write_conllu(repeats[0]));
    }

    TEST_CASE("averaged score over divergent inputs reports a sound mean") {
        Rng gen(29);
        Corpus gold;
        for (int i = 0; i < 30; ++i) gold.sentences.push_back(testutil::random_tree(gen, 7, kLabels));
        std::vector<Corpus> systems(3);
        for (int sys = 0; sys < 3; ++sys)
            for (const Sentence& g : gold.sentences) {
                // Each system gets the gold tree with some random damage.
                Sentence noisy =
                    gen.below(3) == 0 ? same_forms(g, testutil::random_tree(gen, 7, kLabels)) : g;
                systems[sys].sentences.push_back(noisy);
            }
        CombinerConfig config;
        config.repeats = 21;
        config.base_seed = 1;
        const EnsembleScore score = averaged_ensemble_las(systems, gold, config);
        REQUIRE(score.per_repeat.size() == 21);
        CHECK(score.min <= score.mean);
        CHECK(score.mean <= score.max);
        CHECK(score.max - score.min >= 0.0);
        double sum = 0;
        for (double v : score.per_repeat) sum += v;
        CHECK(score.mean == doctest::Approx(sum / 21.0).epsilon(1e-12));

        SUBCASE("identical repeats collapse to min = mean = max") {
            const std::vector<Corpus> same(3, gold);
            const EnsembleScore s2 = averaged_ensemble_las(same, gold, config);
            CHECK(s2.mean == 100.0);
            CHECK(s2.min == 100.0);
            CHECK(s2.max == 100.0);
        }

        SUBCASE("mean is invariant under permuting identical inputs") {
            const std::vector<Corpus> same = {gold, gold, gold};
            const std::vector<Corpus> permuted = {gold, gold, gold};
            CHECK(averaged_ensemble_las(same, gold, config).mean ==
                  averaged_ensemble_las(permuted, gold, config).mean);
        }
    }

    TEST_CASE("head-only votes pick the plurality label for the winning head") {
        // All three agree on the head of token 2; labels 2:1.
        Sentence a;
        for (int i = 1; i <= 2; ++i) {
            Token t;
            t.id = i;
            t.form = "w" + std::to_string(i);
            t.head = i == 1 ? 0 : 1;
            t.deprel = i == 1 ? "root" : "obj";
            a.tokens.push_back(std::move(t));
        }
        Sentence b = a;
        Sentence c = a;
        c.tokens[1].deprel = "nmod";
        Rng rng(4);
        const Sentence exact = combine_trees({&a, &b, &c}, rng, VoteMode::exact_pair);
        CHECK(exact.tokens[1].deprel == "obj");
        Rng rng2(4);
        const Sentence head_only = combine_trees({&a, &b, &c}, rng2, VoteMode::head_only);
        CHECK(head_only.tokens[1].head == 1);
        CHECK(head_only.tokens[1].deprel == "obj");
    }

    TEST_CASE("non-syntactic columns take the per-token majority") {
        Sentence a;
        Token t;
        t.id = 1;
        t.form = "w";
        t.head = 0;
        t.deprel = "root";
        t.upos = "NOUN";
        t.lemma = "x";
        a.tokens.push_back(t);
        Sentence b = a;
        b.tokens[0].upos = "VERB";
        Sentence c = a;
        Rng rng(9);
        const Sentence out = combine_trees({&a, &b, &c}, rng);
        CHECK(out.tokens[0].upos == "NOUN");
        CHECK(out.tokens[0].lemma == "x");
    }
}
