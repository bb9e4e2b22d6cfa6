#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ttt {

// One plain token line of a CoNLL-U sentence. `head` is 0 for the root
// token, otherwise the 1-based id of the governing token.
struct Token {
    int id = 0;
    std::string form;
    std::string lemma = "_";
    std::string upos = "_";
    std::string xpos = "_";
    std::string feats = "_";
    int head = 0;
    std::string deprel = "_";
    std::string deps = "_";
    std::string misc = "_";

    bool operator==(const Token&) const = default;
};

// A sentence: leading comments, plain tokens, and any multiword-token
// ("3-4") or empty-node ("3.1") lines preserved verbatim. Extras are keyed
// by the number of plain tokens that precede them so writing round-trips
// byte-identically; they never count toward sentence length.
struct Sentence {
    std::vector<std::string> comments;
    std::vector<Token> tokens;
    std::vector<std::pair<int, std::string>> extras;

    int token_count() const { return static_cast<int>(tokens.size()); }

    bool operator==(const Sentence&) const = default;
};

enum class Origin { labelled, unlabelled, predicted, mixed };

struct Corpus {
    std::vector<Sentence> sentences;
    Origin origin = Origin::mixed;

    long long token_total() const {
        long long n = 0;
        for (const auto& s : sentences) n += s.token_count();
        return n;
    }
};

// True iff the head relation forms a tree: exactly one head-0 token and
// every token reaches the root (acyclic, heads in range).
bool is_valid_tree(const Sentence& s);

// Throws ValidationError naming the first offending sentence.
void validate_trees(const Corpus& c, const std::string& corpus_name);

// Key used for duplicate detection and gold lookups: forms joined by a
// single space (exact match, case-sensitive).
std::string forms_key(const Sentence& s);

// ---------------------------------------------------------------------------
// Parsing / serialization

Corpus parse_conllu(std::istream& in);
Corpus parse_conllu(const std::string& text);
Corpus read_conllu_file(const std::string& path);

void write_conllu(const Corpus& c, std::ostream& out);
std::string write_conllu(const Corpus& c);
void write_conllu_file(const Corpus& c, const std::string& path);

// ---------------------------------------------------------------------------
// Unlabelled-pool ingestion

struct PoolFilterSpec {
    int min_len = 5;
    int max_len = 40;
    int max_token_bytes = 200;
    bool dedup = true;
    std::uint64_t shuffle_seed = 0;
    // Generic pre-filter downsampling: keep each input sentence with this
    // probability (1.0 = keep everything).
    double keep_fraction = 1.0;
};

// Reads one sentence per line (tokens whitespace-separated), applies the
// length/byte filters, drops exact duplicates (first occurrence wins) and
// shuffles the survivors. Tokens carry the form only; every other column
// is "_" and the head is a 0 placeholder. Streaming: memory is bounded by
// the surviving pool plus the duplicate index, not by the input.
Corpus ingest_unlabelled(std::istream& text, const PoolFilterSpec& spec);
Corpus ingest_unlabelled(const std::string& text, const PoolFilterSpec& spec);

// Draws whole sentences without replacement in seeded-random order and
// stops before the first sentence that would push the token total over
// `budget_tokens`. With `reject_duplicates`, sentences whose forms_key was
// already drawn are skipped instead of ending the walk.
Corpus sample_corpus(const Corpus& corpus, double budget_tokens, std::uint64_t seed,
                     bool reject_duplicates = false);

}  // namespace ttt
