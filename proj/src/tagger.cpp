#include "ttt/tagger.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "ttt/error.hpp"
#include "ttt/rng.hpp"

namespace ttt {

namespace {

// Last `n` bytes of a UTF-8 string (byte-level affixes are cheap and work
// for the agglutinative cases that matter here).
std::string_view suffix(const std::string& s, std::size_t n) {
    return std::string_view(s).substr(s.size() > n ? s.size() - n : 0);
}

std::string_view prefix(const std::string& s, std::size_t n) {
    return std::string_view(s).substr(0, std::min(n, s.size()));
}

const std::string kBoundary = "<s>";

}  // namespace

void PerceptronTagger::featurize(const Sentence& s, int pos, const std::vector<int>& prev_tags,
                                 std::vector<std::string>& out) const {
    const int n = s.token_count();
    auto form = [&](int i) -> const std::string& {
        return (i < 0 || i >= n) ? kBoundary : s.tokens[i].form;
    };
    const std::string& w0 = s.tokens[pos].form;
    const std::string t1 = pos >= 1 ? std::to_string(prev_tags[pos - 1]) : "-";
    const std::string t2 = pos >= 2 ? std::to_string(prev_tags[pos - 2]) : "-";

    out.clear();
    out.push_back("b");
    out.push_back("w0=" + w0);
    out.push_back("w-1=" + form(pos - 1));
    out.push_back("w-2=" + form(pos - 2));
    out.push_back("w+1=" + form(pos + 1));
    out.push_back("w+2=" + form(pos + 2));
    out.push_back("suf1=" + std::string(suffix(w0, 1)));
    out.push_back("suf2=" + std::string(suffix(w0, 2)));
    out.push_back("suf3=" + std::string(suffix(w0, 3)));
    out.push_back("pre1=" + std::string(prefix(w0, 1)));
    out.push_back("t-1=" + t1);
    out.push_back("t-2,-1=" + t2 + "|" + t1);
    out.push_back("t-1w0=" + t1 + "|" + w0);
    out.push_back("w-1w0=" + form(pos - 1) + "|" + w0);
}

int PerceptronTagger::best_tag(const std::vector<long long>& scores) const {
    int best = 0;
    for (std::size_t a = 1; a < scores.size(); ++a)
        if (scores[a] > scores[best]) best = static_cast<int>(a);
    return best;
}

void PerceptronTagger::train(const Corpus& corpus, int epochs, std::uint64_t seed) {
    // Tag inventory in first-encounter order over the original corpus order,
    // independent of the shuffle seed.
    tags_.clear();
    for (const Sentence& s : corpus.sentences)
        for (const Token& t : s.tokens)
            if (std::find(tags_.begin(), tags_.end(), t.upos) == tags_.end())
                tags_.push_back(t.upos);
    if (tags_.empty()) throw ValidationError("tagger training corpus is empty");
    model_ = AveragedPerceptron(static_cast<int>(tags_.size()));

    std::vector<int> gold_ids;
    auto tag_id = [&](const std::string& tag) {
        for (std::size_t i = 0; i < tags_.size(); ++i)
            if (tags_[i] == tag) return static_cast<int>(i);
        return 0;
    };

    Rng rng(seed);
    std::vector<std::size_t> order(corpus.sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<std::string> feat_names;
    std::vector<std::uint32_t> feat_ids;
    std::vector<long long> scores;
    std::vector<int> prev_tags;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t si : order) {
            const Sentence& s = corpus.sentences[si];
            const int n = s.token_count();
            gold_ids.resize(n);
            for (int i = 0; i < n; ++i) gold_ids[i] = tag_id(s.tokens[i].upos);
            prev_tags.assign(n, -1);
            for (int i = 0; i < n; ++i) {
                featurize(s, i, prev_tags, feat_names);
                feat_ids.clear();
                for (const auto& f : feat_names) feat_ids.push_back(features_.get_or_add(f));
                model_.score(feat_ids, scores);
                const int predicted = best_tag(scores);
                if (predicted != gold_ids[i]) model_.update(feat_ids, gold_ids[i], predicted);
                model_.tick();
                prev_tags[i] = predicted;
            }
        }
    }
    model_.finalize();
}

void PerceptronTagger::tag(Sentence& s) const {
    const int n = s.token_count();
    std::vector<int> prev_tags(n, -1);
    std::vector<std::string> feat_names;
    std::vector<std::uint32_t> feat_ids;
    std::vector<long long> scores;
    for (int i = 0; i < n; ++i) {
        featurize(s, i, prev_tags, feat_names);
        feat_ids.clear();
        for (const auto& f : feat_names) {
            int id = features_.find(f);
            if (id >= 0) feat_ids.push_back(static_cast<std::uint32_t>(id));
        }
        model_.score(feat_ids, scores);
        const int predicted = best_tag(scores);
        prev_tags[i] = predicted;
        s.tokens[i].upos = tags_[predicted];
    }
}

void PerceptronTagger::save(std::ostream& out) const {
    out << "ttt-tagger v1\n";
    out << "tags " << tags_.size() << "\n";
    for (const auto& t : tags_) out << t << "\n";
    out << "features " << features_.size() << "\n";
    for (std::uint32_t i = 0; i < features_.size(); ++i) out << features_.name(i) << "\n";
    model_.save(out);
}

void PerceptronTagger::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "ttt-tagger v1")
        throw DataError("corrupt tagger model: bad magic");
    std::size_t n_tags = 0, n_features = 0;
    std::string tag;
    in >> tag >> n_tags;
    if (tag != "tags") throw DataError("corrupt tagger model");
    std::getline(in, line);
    tags_.clear();
    for (std::size_t i = 0; i < n_tags; ++i) {
        if (!std::getline(in, line)) throw DataError("corrupt tagger model: truncated tags");
        tags_.push_back(line);
    }
    in >> tag >> n_features;
    if (tag != "features") throw DataError("corrupt tagger model");
    std::getline(in, line);
    features_ = FeatureMap();
    for (std::size_t i = 0; i < n_features; ++i) {
        if (!std::getline(in, line)) throw DataError("corrupt tagger model: truncated features");
        features_.get_or_add(line);
    }
    model_ = AveragedPerceptron(static_cast<int>(tags_.size()));
    model_.load(in, n_features);
}

}  // namespace ttt
