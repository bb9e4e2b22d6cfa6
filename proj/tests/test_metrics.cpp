#include <doctest.h>

#include <cmath>

#include "support/test_util.hpp"
#include "ttt/error.hpp"
#include "ttt/metrics.hpp"
#include "ttt/rng.hpp"

using namespace ttt;

namespace {

// n tokens in one sentence, heads all 1 except the root, labels "dep".
Corpus chain_sentence(int n) {
    Corpus c;
    Sentence s;
    for (int i = 1; i <= n; ++i) {
        Token t;
        t.id = i;
        t.form = "w" + std::to_string(i);
        t.head = i == 1 ? 0 : i - 1;
        t.deprel = i == 1 ? "root" : "dep";
        s.tokens.push_back(std::move(t));
    }
    c.sentences.push_back(std::move(s));
    return c;
}

double bruteforce_mcnemar(long long b, long long c) {
    const int n = static_cast<int>(b + c);
    const long long m = std::min(b, c);
    long long hits = 0;
    for (long long mask = 0; mask < (1LL << n); ++mask)
        if (__builtin_popcountll(static_cast<unsigned long long>(mask)) <= m) ++hits;
    const double p = 2.0 * static_cast<double>(hits) / std::pow(2.0, n);
    return std::min(1.0, p);
}

}  // namespace

TEST_SUITE("metrics") {
    TEST_CASE("identical prediction scores 100/100") {
        const Corpus gold = chain_sentence(6);
        const EvalReport r = evaluate(gold, gold);
        CHECK(r.las == 100.0);
        CHECK(r.uas == 100.0);
        CHECK(r.total_tokens == 6);
    }

    TEST_CASE("uas counts heads, las counts heads plus labels") {
        const Corpus gold = chain_sentence(5);
        Corpus pred = gold;
        pred.sentences[0].tokens[4].head = 1;      // wrong head
        pred.sentences[0].tokens[3].deprel = "x";  // right head, wrong label
        const EvalReport r = evaluate(gold, pred);
        CHECK(r.uas == doctest::Approx(80.0));
        CHECK(r.las == doctest::Approx(60.0));
    }

    TEST_CASE("label changes never move uas") {
        const Corpus gold = chain_sentence(7);
        Corpus pred = gold;
        for (auto& t : pred.sentences[0].tokens) t.deprel = "zzz";
        const EvalReport r = evaluate(gold, pred);
        CHECK(r.uas == 100.0);
        CHECK(r.las == 0.0);
    }

    TEST_CASE("universal label mode strips the subtype") {
        Corpus gold = chain_sentence(3);
        gold.sentences[0].tokens[1].deprel = "acl:relcl";
        Corpus pred = gold;
        pred.sentences[0].tokens[1].deprel = "acl";
        CHECK(evaluate(gold, pred).las < 100.0);
        EvalOptions opts;
        opts.universal_deprel = true;
        CHECK(evaluate(gold, pred, opts).las == 100.0);
    }

    TEST_CASE("alignment mismatch names the first bad sentence") {
        const Corpus gold = chain_sentence(4);
        Corpus pred = chain_sentence(4);
        pred.sentences[0].tokens[2].form = "different";
        try {
            evaluate(gold, pred);
            FAIL("expected AlignmentError");
        } catch (const AlignmentError& e) {
            CHECK(std::string(e.what()).find("sentence 1") != std::string::npos);
        }
    }

    TEST_CASE("breakdown splits by vocabulary, sentence length and label") {
        Corpus gold;
        {
            Corpus nine = chain_sentence(9);
            Corpus ten = chain_sentence(10);
            gold.sentences.push_back(nine.sentences[0]);
            gold.sentences.push_back(ten.sentences[0]);
        }
        Corpus pred = gold;
        pred.sentences[1].tokens[9].head = 1;  // one mistake in the 10-token sentence

        SUBCASE("all forms in vocabulary means an empty OOV class") {
            const BreakdownReport r = breakdown(gold, pred, training_vocabulary(gold));
            CHECK(r.oov.tokens == 0);
            CHECK(r.iv.tokens == 19);
            const EvalReport whole = evaluate(gold, pred);
            CHECK(r.iv.las() == doctest::Approx(whole.las));
        }

        SUBCASE("length bins hold one sentence each") {
            const BreakdownReport r = breakdown(gold, pred, {});
            CHECK(r.by_length[0].tokens == 9);
            CHECK(r.by_length[1].tokens == 10);
            CHECK(r.by_length[2].tokens == 0);
            CHECK(r.by_length[3].tokens == 0);
        }

        SUBCASE("partitions sum to the token total") {
            const BreakdownReport r = breakdown(gold, pred, training_vocabulary(gold));
            CHECK(r.oov.tokens + r.iv.tokens == r.total_tokens);
            long long len_total = 0;
            for (const auto& cell : r.by_length) len_total += cell.tokens;
            CHECK(len_total == r.total_tokens);
            long long dep_total = 0;
            for (const auto& [label, cell] : r.by_deprel) dep_total += cell.tokens;
            CHECK(dep_total == r.total_tokens);
        }
    }

    TEST_CASE("labels under 20 occurrences are flagged") {
        Corpus gold = chain_sentence(20);
        // 19 tokens labelled "dep", one "root": both below the threshold;
        // extend "dep" to exactly 20 via one more sentence.
        Corpus extra = chain_sentence(2);
        gold.sentences.push_back(extra.sentences[0]);
        const BreakdownReport r = breakdown(gold, gold, {});
        REQUIRE(r.by_deprel.count("dep") == 1);
        CHECK(r.by_deprel.at("dep").tokens == 20);
        CHECK(!r.by_deprel.at("dep").below_threshold);
        CHECK(r.by_deprel.at("root").below_threshold);
    }

    TEST_CASE("breakdown partition sums hold on random corpora") {
        Rng rng(31337);
        const std::vector<std::string> labels = {"a", "b", "c"};
        for (int round = 0; round < 20; ++round) {
            Corpus gold, pred;
            const int n_sent = 1 + (int)rng.below(8);
            for (int i = 0; i < n_sent; ++i) {
                Sentence g = testutil::random_tree(rng, 1 + (int)rng.below(45), labels);
                Sentence p = testutil::random_tree(rng, g.token_count(), labels);
                for (int k = 0; k < g.token_count(); ++k) p.tokens[k].form = g.tokens[k].form;
                gold.sentences.push_back(std::move(g));
                pred.sentences.push_back(std::move(p));
            }
            const BreakdownReport r = breakdown(gold, pred, {});
            long long len_total = 0;
            for (const auto& cell : r.by_length) len_total += cell.tokens;
            CHECK(len_total == r.total_tokens);
            CHECK(r.oov.tokens + r.iv.tokens == r.total_tokens);
        }
    }

    TEST_CASE("mcnemar b=10 c=2 matches the exact binomial") {
        std::vector<std::uint8_t> one(40, 1), two(40, 1);
        for (std::size_t i = 0; i < 10; ++i) two[i] = 0;   // b = 10
        for (std::size_t i = 20; i < 22; ++i) one[i] = 0;  // c = 2
        const SignificanceResult r = mcnemar(one, two);
        CHECK(r.b == 10);
        CHECK(r.c == 2);
        CHECK(r.p_value == doctest::Approx(0.03857421875).epsilon(1e-12));
        CHECK(std::fabs(r.p_value - bruteforce_mcnemar(10, 2)) < 1e-12);
        CHECK(r.stars == 1);
        CHECK(star_string(r.stars) == "*");
    }

    TEST_CASE("perfectly symmetric discordance caps at p = 1") {
        std::vector<std::uint8_t> one(10, 1), two(10, 1);
        for (std::size_t i = 0; i < 5; ++i) two[i] = 0;  // b = 5
        for (std::size_t i = 5; i < 10; ++i) one[i] = 0;  // c = 5
        const SignificanceResult r = mcnemar(one, two);
        CHECK(r.b == 5);
        CHECK(r.c == 5);
        CHECK(r.p_value == 1.0);
    }

    TEST_CASE("no discordance is degenerate") {
        std::vector<std::uint8_t> f(8, 1);
        f[3] = 0;
        const SignificanceResult r = mcnemar(f, f);
        CHECK(r.b == 0);
        CHECK(r.c == 0);
        CHECK(r.p_value == 1.0);
        CHECK(r.stars == 0);
        CHECK(r.degenerate);
    }

    TEST_CASE("swapping systems swaps b and c and keeps p") {
        Rng rng(77);
        for (int round = 0; round < 30; ++round) {
            const std::size_t n = 5 + rng.below(60);
            std::vector<std::uint8_t> f1(n), f2(n);
            for (std::size_t i = 0; i < n; ++i) {
                f1[i] = rng.below(2) ? 1 : 0;
                f2[i] = rng.below(2) ? 1 : 0;
            }
            const SignificanceResult a = mcnemar(f1, f2);
            const SignificanceResult b = mcnemar(f2, f1);
            CHECK(a.b == b.c);
            CHECK(a.c == b.b);
            CHECK(a.p_value == b.p_value);
        }
    }

    TEST_CASE("star thresholds sit exactly on the caption boundaries") {
        CHECK(stars_for_p(0.051) == 0);
        CHECK(stars_for_p(0.05) == 1);
        CHECK(stars_for_p(0.01) == 2);
        CHECK(stars_for_p(0.001) == 3);
        CHECK(stars_for_p(0.0001) == 4);
        CHECK(stars_for_p(0.00001) == 5);
        CHECK(stars_for_p(1.0) == 0);
        CHECK(star_string(5) == "*****");
    }

    TEST_CASE("star count never increases with p") {
        Rng rng(55);
        for (int i = 0; i < 200; ++i) {
            const double p1 = rng.unit();
            const double p2 = rng.unit();
            const double lo = std::min(p1, p2), hi = std::max(p1, p2);
            CHECK(stars_for_p(lo) >= stars_for_p(hi));
        }
    }

    TEST_CASE("chisquare mode stays close to the exact test at large counts") {
        std::vector<std::uint8_t> one(400, 1), two(400, 1);
        for (std::size_t i = 0; i < 90; ++i) two[i] = 0;    // b = 90
        for (std::size_t i = 100; i < 160; ++i) one[i] = 0;  // c = 60
        const SignificanceResult exact = mcnemar(one, two, McnemarMode::exact);
        const SignificanceResult chi = mcnemar(one, two, McnemarMode::chisquare);
        CHECK(std::fabs(exact.p_value - chi.p_value) < 0.005);
    }

    TEST_CASE("sentence flags collapse token flags") {
        Corpus gold = chain_sentence(3);
        Corpus second = chain_sentence(2);
        gold.sentences.push_back(second.sentences[0]);
        std::vector<std::uint8_t> tokens = {1, 1, 0, 1, 1};
        const auto sents = sentence_flags(gold, tokens);
        REQUIRE(sents.size() == 2);
        CHECK(sents[0] == 0);
        CHECK(sents[1] == 1);
    }

    TEST_CASE("renderings carry the headline numbers") {
        const Corpus gold = chain_sentence(4);
        const EvalReport r = evaluate(gold, gold);
        CHECK(render_eval(r).find("LAS 100.00") == 0);
        const std::string json = report_json(r, nullptr, nullptr);
        CHECK(json.find("\"las\": 100.0") != std::string::npos);
    }
}
