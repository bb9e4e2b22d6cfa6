#include <doctest.h>

#include <sstream>

#include "support/test_util.hpp"
#include "ttt/conllu.hpp"
#include "ttt/error.hpp"
#include "ttt/rng.hpp"

using namespace ttt;

namespace {

const char* kTwoSentences =
    "# sent_id = 1\n"
    "1\tThe\tthe\tDET\tDT\tDefinite=Def\t2\tdet\t_\t_\n"
    "2\tcat\tcat\tNOUN\tNN\tNumber=Sing\t3\tnsubj\t_\t_\n"
    "3\tsleeps\tsleep\tVERB\tVBZ\t_\t0\troot\t_\t_\n"
    "4\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_\n"
    "\n"
    "1\tBirds\tbird\tNOUN\tNNS\t_\t2\tnsubj\t_\t_\n"
    "2\tsing\tsing\tVERB\tVBP\t_\t0\troot\t_\t_\n"
    "\n";

Corpus make_pool(const std::string& text, int min_len = 5, int max_len = 40,
                 std::uint64_t seed = 1) {
    PoolFilterSpec spec;
    spec.min_len = min_len;
    spec.max_len = max_len;
    spec.shuffle_seed = seed;
    return ingest_unlabelled(text, spec);
}

std::string repeated_words(int n) {
    std::string line;
    for (int i = 0; i < n; ++i) {
        if (i > 0) line += ' ';
        line += "w" + std::to_string(i);
    }
    return line;
}

}  // namespace

TEST_SUITE("conllu") {
    TEST_CASE("parses a two-sentence ten-column file") {
        const Corpus c = parse_conllu(std::string(kTwoSentences));
        REQUIRE(c.sentences.size() == 2);
        CHECK(c.sentences[0].token_count() == 4);
        CHECK(c.sentences[0].tokens[0].head == 2);
        CHECK(c.sentences[0].tokens[2].head == 0);
        CHECK(c.sentences[0].tokens[2].deprel == "root");
        CHECK(c.sentences[0].comments.size() == 1);
        CHECK(c.sentences[1].token_count() == 2);
        CHECK(c.token_total() == 6);
    }

    TEST_CASE("multiword ranges and empty nodes stay out of the token list") {
        const std::string text =
            "1\tvamonos\t_\t_\t_\t_\t0\troot\t_\t_\n"
            "2-3\tal\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "2\ta\t_\t_\t_\t_\t1\tcase\t_\t_\n"
            "3\tel\t_\t_\t_\t_\t2\tdet\t_\t_\n"
            "3.1\tnull\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "\n";
        const Corpus c = parse_conllu(text);
        REQUIRE(c.sentences.size() == 1);
        CHECK(c.sentences[0].token_count() == 3);
        CHECK(c.sentences[0].extras.size() == 2);
        // Round-trip is byte-identical, extras included.
        CHECK(write_conllu(c) == text);
    }

    TEST_CASE("write-parse round trip is byte identical on a canonical file") {
        const Corpus c = parse_conllu(std::string(kTwoSentences));
        CHECK(write_conllu(c) == kTwoSentences);
        const Corpus reparsed = parse_conllu(write_conllu(c));
        CHECK(reparsed.sentences == c.sentences);
    }

    TEST_CASE("empty corpus writes empty output") {
        CHECK(write_conllu(Corpus{}) == "");
        CHECK(parse_conllu(std::string{}).sentences.empty());
    }

    TEST_CASE("feats underscore survives as a literal column") {
        const Corpus c = parse_conllu(std::string(kTwoSentences));
        CHECK(c.sentences[1].tokens[0].feats == "_");
        const std::string out = write_conllu(c);
        CHECK(out.find("Birds\tbird\tNOUN\tNNS\t_\t2") != std::string::npos);
    }

    TEST_CASE("head out of range is a validation error") {
        const std::string text =
            "1\ta\t_\t_\t_\t_\t2\tdep\t_\t_\n"
            "2\tb\t_\t_\t_\t_\t99\tdep\t_\t_\n"
            "3\tc\t_\t_\t_\t_\t0\troot\t_\t_\n"
            "4\td\t_\t_\t_\t_\t3\tdep\t_\t_\n"
            "5\te\t_\t_\t_\t_\t3\tdep\t_\t_\n"
            "\n";
        CHECK_THROWS_AS(parse_conllu(text), ValidationError);
    }

    TEST_CASE("malformed lines raise parse errors naming the line") {
        try {
            parse_conllu(std::string("1\tonly\tthree\n\n"));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line_number == 1);
        }
        try {
            parse_conllu(std::string("1\ta\t_\t_\t_\t_\tx\tdep\t_\t_\n\n"));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("head") != std::string::npos);
        }
    }

    TEST_CASE("tree validity requires a single root and acyclic heads") {
        Corpus c = parse_conllu(std::string(kTwoSentences));
        CHECK(is_valid_tree(c.sentences[0]));
        Sentence cyclic = c.sentences[0];
        cyclic.tokens[2].head = 4;  // 3 -> 4 -> 3 cycle, no root
        CHECK(!is_valid_tree(cyclic));
        Sentence two_roots = c.sentences[0];
        two_roots.tokens[0].head = 0;
        CHECK(!is_valid_tree(two_roots));
    }

    TEST_CASE("ingest keeps only sentences within the length bounds") {
        const std::string text = repeated_words(4) + "\n" + repeated_words(5) + "\n" +
                                 repeated_words(40) + "\n" + repeated_words(41) + "\n";
        const Corpus pool = make_pool(text);
        REQUIRE(pool.sentences.size() == 2);
        std::vector<int> lens = {pool.sentences[0].token_count(),
                                 pool.sentences[1].token_count()};
        std::sort(lens.begin(), lens.end());
        CHECK(lens == std::vector<int>{5, 40});
    }

    TEST_CASE("ingest drops exact duplicates, first occurrence wins") {
        const std::string line = "a b c d e";
        const Corpus pool = make_pool(line + "\n" + line + "\n");
        CHECK(pool.sentences.size() == 1);
    }

    TEST_CASE("ingest drops sentences with an oversized token") {
        std::string big(201, 'x');
        const std::string text = "a b c d " + big + "\nf g h i j\n";
        const Corpus pool = make_pool(text);
        REQUIRE(pool.sentences.size() == 1);
        CHECK(pool.sentences[0].tokens[0].form == "f");
        // Exactly 200 bytes is still allowed.
        std::string edge(200, 'y');
        CHECK(make_pool("a b c d " + edge + "\n").sentences.size() == 1);
    }

    TEST_CASE("ingest of empty input is an empty corpus") {
        CHECK(make_pool("").sentences.empty());
        CHECK(make_pool("\n\n").sentences.empty());
    }

    TEST_CASE("ingest output always satisfies the filter spec") {
        Rng rng(99);
        std::string text;
        for (int i = 0; i < 300; ++i) text += repeated_words(1 + (int)rng.below(50)) + "\n";
        PoolFilterSpec spec;
        spec.min_len = 5;
        spec.max_len = 40;
        spec.shuffle_seed = 3;
        const Corpus pool = ingest_unlabelled(text, spec);
        for (const Sentence& s : pool.sentences) {
            CHECK(s.token_count() >= spec.min_len);
            CHECK(s.token_count() <= spec.max_len);
            for (const Token& t : s.tokens) {
                CHECK((int)t.form.size() <= spec.max_token_bytes);
                CHECK(t.head == 0);
                CHECK(t.lemma == "_");
            }
        }
    }

    TEST_CASE("ingest keep-fraction downsamples deterministically") {
        std::string text;
        for (int i = 0; i < 1000; ++i) text += repeated_words(6) + " x" + std::to_string(i) + "\n";
        PoolFilterSpec spec;
        spec.shuffle_seed = 5;
        spec.keep_fraction = 0.25;
        const Corpus a = ingest_unlabelled(text, spec);
        const Corpus b = ingest_unlabelled(text, spec);
        CHECK(a.sentences.size() == b.sentences.size());
        CHECK(a.sentences.size() > 150);
        CHECK(a.sentences.size() < 350);
    }

    TEST_CASE("sample_corpus stays under the token budget on whole sentences") {
        Corpus corpus;
        for (int i = 0; i < 100; ++i) {
            Sentence s;
            for (int k = 1; k <= 10; ++k) {
                Token t;
                t.id = k;
                t.form = "s" + std::to_string(i) + "w" + std::to_string(k);
                t.head = k == 1 ? 0 : 1;
                t.deprel = k == 1 ? "root" : "dep";
                s.tokens.push_back(std::move(t));
            }
            corpus.sentences.push_back(std::move(s));
        }
        const Corpus sampled = sample_corpus(corpus, 55, 17);
        CHECK(sampled.sentences.size() == 5);
        CHECK(sampled.token_total() == 50);

        const Corpus all = sample_corpus(corpus, 1e9, 17);
        CHECK(all.sentences.size() == 100);

        const Corpus again = sample_corpus(corpus, 55, 17);
        CHECK(write_conllu(again) == write_conllu(sampled));

        SUBCASE("duplicate rejection skips repeated form sequences") {
            Corpus doubled = corpus;
            for (const Sentence& s : corpus.sentences) doubled.sentences.push_back(s);
            const Corpus unique = sample_corpus(doubled, 1e9, 23, true);
            CHECK(unique.sentences.size() == 100);
        }
    }

    TEST_CASE("sample budget is never exceeded on random corpora") {
        Rng rng(4242);
        for (int round = 0; round < 50; ++round) {
            Corpus corpus;
            const int n = 1 + (int)rng.below(30);
            for (int i = 0; i < n; ++i) {
                Sentence s;
                const int len = 1 + (int)rng.below(12);
                for (int k = 1; k <= len; ++k) {
                    Token t;
                    t.id = k;
                    t.form = "t" + std::to_string(rng.below(1000));
                    t.head = k == 1 ? 0 : 1;
                    s.tokens.push_back(std::move(t));
                }
                corpus.sentences.push_back(std::move(s));
            }
            const double budget = 1 + (double)rng.below(80);
            const Corpus sampled = sample_corpus(corpus, budget, rng.next());
            CHECK((double)sampled.token_total() <= budget);
        }
    }
}
