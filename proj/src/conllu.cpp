#include "ttt/conllu.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "ttt/error.hpp"
#include "ttt/rng.hpp"

namespace ttt {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// "3-4" multiword range or "3.1" empty node.
bool is_range_or_empty_id(std::string_view id) {
    auto sep = id.find_first_of("-.");
    if (sep == std::string_view::npos) return false;
    return all_digits(id.substr(0, sep)) && all_digits(id.substr(sep + 1));
}

void split_tabs(const std::string& line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.emplace_back(line.data() + start, line.size() - start);
            return;
        }
        out.emplace_back(line.data() + start, tab - start);
        start = tab + 1;
    }
}

void finish_sentence(Corpus& c, Sentence& s, long line_no, long long& first_line) {
    if (s.tokens.empty())
        throw ParseError("sentence block without token lines (started near line " +
                             std::to_string(first_line) + ")",
                         line_no);
    // Head range is only checkable once the sentence length is known.
    const int n = s.token_count();
    for (const Token& t : s.tokens) {
        if (t.head < 0 || t.head > n)
            throw ValidationError("sentence " + std::to_string(c.sentences.size() + 1) +
                                  ", token " + std::to_string(t.id) + ": head " +
                                  std::to_string(t.head) + " out of range [0, " +
                                  std::to_string(n) + "]");
        if (t.head == t.id)
            throw ValidationError("sentence " + std::to_string(c.sentences.size() + 1) +
                                  ", token " + std::to_string(t.id) + ": head equals id");
    }
    c.sentences.push_back(std::move(s));
    s = Sentence{};
    first_line = -1;
}

}  // namespace

bool is_valid_tree(const Sentence& s) {
    const int n = s.token_count();
    int roots = 0;
    for (const Token& t : s.tokens) {
        if (t.head < 0 || t.head > n || t.head == t.id) return false;
        if (t.head == 0) ++roots;
    }
    if (roots != 1) return false;
    // Every token must reach the root in at most n steps.
    for (int i = 1; i <= n; ++i) {
        int cur = i, steps = 0;
        while (cur != 0) {
            cur = s.tokens[cur - 1].head;
            if (++steps > n) return false;
        }
    }
    return true;
}

void validate_trees(const Corpus& c, const std::string& corpus_name) {
    for (std::size_t i = 0; i < c.sentences.size(); ++i)
        if (!is_valid_tree(c.sentences[i]))
            throw ValidationError(corpus_name + ": sentence " + std::to_string(i + 1) +
                                  " is not a valid tree (needs a single root and acyclic heads)");
}

std::string forms_key(const Sentence& s) {
    std::string key;
    std::size_t total = 0;
    for (const Token& t : s.tokens) total += t.form.size() + 1;
    key.reserve(total);
    for (const Token& t : s.tokens) {
        if (!key.empty()) key.push_back(' ');
        key += t.form;
    }
    return key;
}

Corpus parse_conllu(std::istream& in) {
    Corpus corpus;
    Sentence sent;
    std::string line;
    std::vector<std::string_view> cols;
    long line_no = 0;
    long long first_line = -1;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            if (!sent.tokens.empty() || !sent.comments.empty() || !sent.extras.empty())
                finish_sentence(corpus, sent, line_no, first_line);
            continue;
        }
        if (first_line < 0) first_line = line_no;
        if (line[0] == '#') {
            if (sent.tokens.empty())
                sent.comments.push_back(line);
            else
                sent.extras.emplace_back(sent.token_count(), line);
            continue;
        }
        split_tabs(line, cols);
        if (cols.size() != 10)
            throw ParseError("expected 10 tab-separated columns, found " +
                                 std::to_string(cols.size()),
                             line_no);
        if (is_range_or_empty_id(cols[0])) {
            sent.extras.emplace_back(sent.token_count(), line);
            continue;
        }
        Token tok;
        if (!parse_int(cols[0], tok.id))
            throw ParseError("malformed token id '" + std::string(cols[0]) + "'", line_no);
        if (tok.id != sent.token_count() + 1)
            throw ParseError("token id " + std::to_string(tok.id) + " out of sequence (expected " +
                                 std::to_string(sent.token_count() + 1) + ")",
                             line_no);
        tok.form = cols[1];
        if (tok.form.empty()) throw ParseError("empty form", line_no);
        tok.lemma = cols[2];
        tok.upos = cols[3];
        tok.xpos = cols[4];
        tok.feats = cols[5];
        if (!parse_int(cols[6], tok.head))
            throw ParseError("non-numeric head '" + std::string(cols[6]) + "'", line_no);
        tok.deprel = cols[7];
        tok.deps = cols[8];
        tok.misc = cols[9];
        sent.tokens.push_back(std::move(tok));
    }
    if (!sent.tokens.empty() || !sent.comments.empty() || !sent.extras.empty())
        finish_sentence(corpus, sent, line_no, first_line);
    return corpus;
}

Corpus parse_conllu(const std::string& text) {
    std::istringstream in(text);
    return parse_conllu(in);
}

Corpus read_conllu_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return parse_conllu(in);
}

void write_conllu(const Corpus& c, std::ostream& out) {
    for (const Sentence& s : c.sentences) {
        for (const std::string& comment : s.comments) out << comment << '\n';
        std::size_t next_extra = 0;
        auto flush_extras = [&](int before) {
            while (next_extra < s.extras.size() && s.extras[next_extra].first <= before)
                out << s.extras[next_extra++].second << '\n';
        };
        for (const Token& t : s.tokens) {
            flush_extras(t.id - 1);
            out << t.id << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t' << t.xpos
                << '\t' << t.feats << '\t' << t.head << '\t' << t.deprel << '\t' << t.deps << '\t'
                << t.misc << '\n';
        }
        flush_extras(s.token_count());
        out << '\n';
    }
}

std::string write_conllu(const Corpus& c) {
    std::ostringstream out;
    write_conllu(c, out);
    return out.str();
}

void write_conllu_file(const Corpus& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    write_conllu(c, out);
}

Corpus ingest_unlabelled(std::istream& text, const PoolFilterSpec& spec) {
    if (spec.min_len < 1 || spec.min_len > spec.max_len)
        throw ValidationError("pool filter requires 1 <= min_len <= max_len");

    Rng keep_rng(fnv1a64("ingest-keep|seed=" + std::to_string(spec.shuffle_seed)));
    Rng shuffle_rng(fnv1a64("ingest-shuffle|seed=" + std::to_string(spec.shuffle_seed)));

    Corpus pool;
    pool.origin = Origin::unlabelled;
    std::unordered_set<std::string> seen;
    std::string line;
    std::vector<std::string_view> forms;

    while (std::getline(text, line)) {
        forms.clear();
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
            if (i > start) forms.emplace_back(line.data() + start, i - start);
        }
        if (forms.empty()) continue;
        if (spec.keep_fraction < 1.0 && keep_rng.unit() >= spec.keep_fraction) continue;

        const int n = static_cast<int>(forms.size());
        if (n < spec.min_len || n > spec.max_len) continue;
        bool oversize = false;
        for (auto f : forms)
            if (static_cast<int>(f.size()) > spec.max_token_bytes) {
                oversize = true;
                break;
            }
        if (oversize) continue;

        if (spec.dedup) {
            std::string key;
            key.reserve(line.size());
            for (auto f : forms) {
                if (!key.empty()) key.push_back(' ');
                key += f;
            }
            if (!seen.insert(std::move(key)).second) continue;
        }

        Sentence sent;
        sent.tokens.reserve(forms.size());
        for (int t = 0; t < n; ++t) {
            Token tok;
            tok.id = t + 1;
            tok.form = forms[t];
            sent.tokens.push_back(std::move(tok));
        }
        pool.sentences.push_back(std::move(sent));
    }

    shuffle_rng.shuffle(pool.sentences);
    return pool;
}

Corpus ingest_unlabelled(const std::string& text, const PoolFilterSpec& spec) {
    std::istringstream in(text);
    return ingest_unlabelled(in, spec);
}

Corpus sample_corpus(const Corpus& corpus, double budget_tokens, std::uint64_t seed,
                     bool reject_duplicates) {
    if (budget_tokens <= 0) throw ValidationError("sample budget must be positive");
    Rng rng(seed);
    std::vector<std::size_t> order = rng.permutation(corpus.sentences.size());

    Corpus out;
    out.origin = corpus.origin;
    std::unordered_set<std::string> seen;
    long long taken = 0;
    for (std::size_t idx : order) {
        const Sentence& s = corpus.sentences[idx];
        if (reject_duplicates && !seen.insert(forms_key(s)).second) continue;
        if (static_cast<double>(taken + s.token_count()) > budget_tokens) break;
        taken += s.token_count();
        out.sentences.push_back(s);
    }
    return out;
}

}  // namespace ttt
