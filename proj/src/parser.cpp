#include "ttt/parser.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>

#include "ttt/error.hpp"
#include "ttt/rng.hpp"

namespace ttt {

namespace {

const std::string kRootSym = "<root>";
const std::string kNone = "-";

int distance_bucket(int a, int b) {
    const int d = b - a;
    return d >= 5 ? 5 : d;
}

}  // namespace

void TransitionParser::featurize(const std::vector<const std::string*>& form,
                                 const std::vector<const std::string*>& upos,
                                 const ParserState& state, std::vector<std::string>& out) const {
    const auto stack_at = [&](int depth) -> int {
        const int size = static_cast<int>(state.stack.size());
        return depth < size ? state.stack[size - 1 - depth] : -1;
    };
    const auto buffer_at = [&](int offset) -> int {
        const int id = state.buffer_next + offset;
        return id <= state.n ? id : -1;
    };
    const auto F = [&](int node) -> const std::string& { return node < 0 ? kNone : *form[node]; };
    const auto P = [&](int node) -> const std::string& { return node < 0 ? kNone : *upos[node]; };
    const auto child_pos = [&](int node, bool left) -> const std::string& {
        if (node < 0) return kNone;
        const int c = left ? state.leftmost_child(node) : state.rightmost_child(node);
        return c == 0 ? kNone : *upos[c];
    };

    const int s0 = stack_at(0), s1 = stack_at(1), s2 = stack_at(2);
    const int b0 = buffer_at(0), b1 = buffer_at(1), b2 = buffer_at(2);

    out.clear();
    out.push_back("b");
    out.push_back("s0w=" + F(s0));
    out.push_back("s0p=" + P(s0));
    out.push_back("s0wp=" + F(s0) + "|" + P(s0));
    out.push_back("s1w=" + F(s1));
    out.push_back("s1p=" + P(s1));
    out.push_back("s1wp=" + F(s1) + "|" + P(s1));
    out.push_back("s2p=" + P(s2));
    out.push_back("b0w=" + F(b0));
    out.push_back("b0p=" + P(b0));
    out.push_back("b0wp=" + F(b0) + "|" + P(b0));
    out.push_back("b1p=" + P(b1));
    out.push_back("b1w=" + F(b1));
    out.push_back("b2p=" + P(b2));
    out.push_back("s0s1p=" + P(s0) + "|" + P(s1));
    out.push_back("s0s1w=" + F(s0) + "|" + F(s1));
    out.push_back("s0pb0p=" + P(s0) + "|" + P(b0));
    out.push_back("s1pb0p=" + P(s1) + "|" + P(b0));
    out.push_back("s0s1b0p=" + P(s0) + "|" + P(s1) + "|" + P(b0));
    out.push_back("s0ws1p=" + F(s0) + "|" + P(s1));
    out.push_back("s1ws0p=" + F(s1) + "|" + P(s0));
    out.push_back("s1lc=" + child_pos(s1, true));
    out.push_back("s1rc=" + child_pos(s1, false));
    out.push_back("s0lc=" + child_pos(s0, true));
    out.push_back("s0rc=" + child_pos(s0, false));
    out.push_back("s1rcs0p=" + child_pos(s1, false) + "|" + P(s0));
    if (s0 >= 0 && s1 >= 0) {
        const std::string d = std::to_string(distance_bucket(s1, s0));
        out.push_back("dist=" + d);
        out.push_back("dps=" + d + "|" + P(s0) + "|" + P(s1));
    }
}

bool TransitionParser::action_allowed(const ParserState& state, int action_id) const {
    const Action a = decode_action(action_id);
    if (!state.can_apply(a)) return false;
    if (a.type == ActionType::shift) return true;
    // Labels stay on the side of the inventory they were observed on: arcs
    // to the root node take root labels, all other arcs take non-root ones.
    // Degenerate inventories (all-root or all-non-root) fall back to any.
    const bool to_root =
        a.type == ActionType::right_arc && state.stack[state.stack.size() - 2] == 0;
    if (to_root) return !has_root_labels_ || is_root_label_[a.label] != 0;
    return !has_nonroot_labels_ || is_nonroot_label_[a.label] != 0;
}

int TransitionParser::pick_action(const ParserState& state,
                                  const std::vector<long long>& scores) const {
    int best = -1;
    long long best_score = std::numeric_limits<long long>::min();
    for (int a = 0; a < static_cast<int>(scores.size()); ++a) {
        if (!action_allowed(state, a)) continue;
        if (best < 0 || scores[a] > best_score) {
            best = a;
            best_score = scores[a];
        }
    }
    if (best < 0) throw ValidationError("parser reached a dead configuration");
    return best;
}

TransitionParser::TrainStats TransitionParser::train(const Corpus& corpus, int epochs,
                                                     std::uint64_t seed) {
    // Label inventory in first-encounter order over the original corpus.
    labels_.clear();
    for (const Sentence& s : corpus.sentences)
        for (const Token& t : s.tokens)
            if (std::find(labels_.begin(), labels_.end(), t.deprel) == labels_.end())
                labels_.push_back(t.deprel);
    if (labels_.empty()) throw ValidationError("parser training corpus is empty");
    is_root_label_.assign(labels_.size(), 0);
    is_nonroot_label_.assign(labels_.size(), 0);
    for (const Sentence& s : corpus.sentences)
        for (const Token& t : s.tokens) {
            const auto idx = static_cast<std::size_t>(
                std::find(labels_.begin(), labels_.end(), t.deprel) - labels_.begin());
            (t.head == 0 ? is_root_label_ : is_nonroot_label_)[idx] = 1;
        }
    has_root_labels_ = std::find(is_root_label_.begin(), is_root_label_.end(), 1) !=
                       is_root_label_.end();
    has_nonroot_labels_ = std::find(is_nonroot_label_.begin(), is_nonroot_label_.end(), 1) !=
                          is_nonroot_label_.end();

    model_ = AveragedPerceptron(1 + 2 * static_cast<int>(labels_.size()));

    // Gold transition sequences, computed once.
    TrainStats stats;
    std::vector<std::vector<Action>> oracles(corpus.sentences.size());
    std::vector<char> usable(corpus.sentences.size(), 0);
    for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
        try {
            oracles[i] = static_oracle(corpus.sentences[i], labels_);
            usable[i] = 1;
            ++stats.sentences_used;
        } catch (const ValidationError&) {
            ++stats.nonprojective_excluded;
        }
    }

    Rng rng(seed);
    std::vector<std::size_t> order(corpus.sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<std::string> feat_names;
    std::vector<std::uint32_t> feat_ids;
    std::vector<long long> scores;
    std::vector<const std::string*> form, upos;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t si : order) {
            if (!usable[si]) continue;
            const Sentence& s = corpus.sentences[si];
            const int n = s.token_count();
            form.assign(static_cast<std::size_t>(n) + 1, &kRootSym);
            upos.assign(static_cast<std::size_t>(n) + 1, &kRootSym);
            for (int i = 1; i <= n; ++i) {
                form[i] = &s.tokens[i - 1].form;
                upos[i] = &s.tokens[i - 1].upos;
            }
            ParserState state(n);
            for (const Action& gold : oracles[si]) {
                featurize(form, upos, state, feat_names);
                feat_ids.clear();
                for (const auto& f : feat_names) feat_ids.push_back(features_.get_or_add(f));
                model_.score(feat_ids, scores);
                const int gold_id = encode_action(gold);
                const int predicted = pick_action(state, scores);
                if (predicted != gold_id) model_.update(feat_ids, gold_id, predicted);
                model_.tick();
                state.apply(gold);
            }
        }
    }
    model_.finalize();
    return stats;
}

void TransitionParser::parse(Sentence& s) const {
    const int n = s.token_count();
    if (n == 0) return;
    std::vector<const std::string*> form(static_cast<std::size_t>(n) + 1, &kRootSym);
    std::vector<const std::string*> upos(static_cast<std::size_t>(n) + 1, &kRootSym);
    for (int i = 1; i <= n; ++i) {
        form[i] = &s.tokens[i - 1].form;
        upos[i] = &s.tokens[i - 1].upos;
    }
    ParserState state(n);
    std::vector<std::string> feat_names;
    std::vector<std::uint32_t> feat_ids;
    std::vector<long long> scores;
    while (!state.terminal()) {
        featurize(form, upos, state, feat_names);
        feat_ids.clear();
        for (const auto& f : feat_names) {
            int id = features_.find(f);
            if (id >= 0) feat_ids.push_back(static_cast<std::uint32_t>(id));
        }
        model_.score(feat_ids, scores);
        state.apply(decode_action(pick_action(state, scores)));
    }
    for (int i = 1; i <= n; ++i) {
        s.tokens[i - 1].head = state.heads[i];
        s.tokens[i - 1].deprel = labels_[state.labels[i]];
    }
}

void TransitionParser::save(std::ostream& out) const {
    out << "ttt-parser v1\n";
    out << "labels " << labels_.size() << "\n";
    for (std::size_t i = 0; i < labels_.size(); ++i)
        out << static_cast<int>(is_root_label_[i]) << ' ' << static_cast<int>(is_nonroot_label_[i])
            << ' ' << labels_[i] << "\n";
    out << "features " << features_.size() << "\n";
    for (std::uint32_t i = 0; i < features_.size(); ++i) out << features_.name(i) << "\n";
    model_.save(out);
}

void TransitionParser::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "ttt-parser v1")
        throw DataError("corrupt parser model: bad magic");
    std::string tag;
    std::size_t n_labels = 0, n_features = 0;
    in >> tag >> n_labels;
    if (tag != "labels") throw DataError("corrupt parser model");
    std::getline(in, line);
    labels_.clear();
    is_root_label_.assign(n_labels, 0);
    is_nonroot_label_.assign(n_labels, 0);
    for (std::size_t i = 0; i < n_labels; ++i) {
        if (!std::getline(in, line)) throw DataError("corrupt parser model: truncated labels");
        // "<root-flag> <nonroot-flag> <label>"
        if (line.size() < 5) throw DataError("corrupt parser model: bad label line");
        is_root_label_[i] = line[0] == '1';
        is_nonroot_label_[i] = line[2] == '1';
        labels_.push_back(line.substr(4));
    }
    has_root_labels_ = std::find(is_root_label_.begin(), is_root_label_.end(), 1) !=
                       is_root_label_.end();
    has_nonroot_labels_ = std::find(is_nonroot_label_.begin(), is_nonroot_label_.end(), 1) !=
                          is_nonroot_label_.end();
    in >> tag >> n_features;
    if (tag != "features") throw DataError("corrupt parser model");
    std::getline(in, line);
    features_ = FeatureMap();
    for (std::size_t i = 0; i < n_features; ++i) {
        if (!std::getline(in, line)) throw DataError("corrupt parser model: truncated features");
        features_.get_or_add(line);
    }
    model_ = AveragedPerceptron(1 + 2 * static_cast<int>(labels_.size()));
    model_.load(in, n_features);
}

}  // namespace ttt
