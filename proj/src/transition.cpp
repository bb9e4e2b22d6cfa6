#include "ttt/transition.hpp"

#include <algorithm>

#include "ttt/error.hpp"

namespace ttt {

int encode_action(const Action& a) {
    switch (a.type) {
        case ActionType::shift:
            return 0;
        case ActionType::left_arc:
            return 1 + 2 * a.label;
        case ActionType::right_arc:
            return 2 + 2 * a.label;
    }
    return 0;
}

Action decode_action(int id) {
    if (id == 0) return {ActionType::shift, -1};
    if (id % 2 == 1) return {ActionType::left_arc, (id - 1) / 2};
    return {ActionType::right_arc, (id - 2) / 2};
}

ParserState::ParserState(int n_tokens)
    : buffer_next(1),
      n(n_tokens),
      heads(static_cast<std::size_t>(n_tokens) + 1, -1),
      labels(static_cast<std::size_t>(n_tokens) + 1, -1),
      left_child_of(static_cast<std::size_t>(n_tokens) + 1, 0),
      right_child_of(static_cast<std::size_t>(n_tokens) + 1, 0) {
    stack.push_back(0);
}

int ParserState::leftmost_child(int node) const { return left_child_of[node]; }
int ParserState::rightmost_child(int node) const { return right_child_of[node]; }

bool ParserState::can_apply(const Action& a) const {
    switch (a.type) {
        case ActionType::shift:
            return !buffer_empty();
        case ActionType::left_arc:
            // Dependent is the second-from-top; the root node never becomes
            // a dependent.
            return stack.size() >= 2 && stack[stack.size() - 2] != 0;
        case ActionType::right_arc:
            if (stack.size() < 2) return false;
            // Attaching to the root node is the final move only: otherwise a
            // later attachment could create a second root.
            if (stack[stack.size() - 2] == 0) return buffer_empty() && stack.size() == 2;
            return true;
    }
    return false;
}

void ParserState::apply(const Action& a) {
    if (!can_apply(a)) throw ValidationError("transition not applicable in this configuration");
    switch (a.type) {
        case ActionType::shift:
            stack.push_back(buffer_next++);
            break;
        case ActionType::left_arc: {
            const int dep = stack[stack.size() - 2];
            const int head = stack[stack.size() - 1];
            heads[dep] = head;
            labels[dep] = a.label;
            if (left_child_of[head] == 0 || dep < left_child_of[head]) left_child_of[head] = dep;
            if (dep > right_child_of[head]) right_child_of[head] = dep;
            stack.erase(stack.end() - 2);
            break;
        }
        case ActionType::right_arc: {
            const int dep = stack[stack.size() - 1];
            const int head = stack[stack.size() - 2];
            heads[dep] = head;
            labels[dep] = a.label;
            if (left_child_of[head] == 0 || dep < left_child_of[head]) left_child_of[head] = dep;
            if (dep > right_child_of[head]) right_child_of[head] = dep;
            stack.pop_back();
            break;
        }
    }
}

namespace {

int label_id(std::vector<std::string>& table, const std::string& label) {
    for (std::size_t i = 0; i < table.size(); ++i)
        if (table[i] == label) return static_cast<int>(i);
    table.push_back(label);
    return static_cast<int>(table.size()) - 1;
}

}  // namespace

std::vector<Action> static_oracle(const Sentence& tree, std::vector<std::string>& label_table) {
    const int n = tree.token_count();
    std::vector<int> gold_head(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> n_deps(static_cast<std::size_t>(n) + 1, 0);
    for (const Token& t : tree.tokens) {
        gold_head[t.id] = t.head;
        n_deps[t.head]++;
    }

    ParserState state(n);
    std::vector<int> attached_deps(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Action> actions;
    actions.reserve(2 * static_cast<std::size_t>(n));

    while (!state.terminal()) {
        Action next;
        bool found = false;
        if (state.stack.size() >= 2) {
            const int s0 = state.stack[state.stack.size() - 1];
            const int s1 = state.stack[state.stack.size() - 2];
            if (s1 != 0 && gold_head[s1] == s0) {
                next = {ActionType::left_arc, label_id(label_table, tree.tokens[s1 - 1].deprel)};
                found = true;
            } else if (gold_head[s0] == s1 && attached_deps[s0] == n_deps[s0]) {
                next = {ActionType::right_arc, label_id(label_table, tree.tokens[s0 - 1].deprel)};
                if (!state.can_apply(next)) found = false;  // premature root attachment
                else
                    found = true;
            }
        }
        if (!found) {
            if (state.buffer_empty())
                throw ValidationError("non-projective tree: no derivation exists");
            next = {ActionType::shift, -1};
        }
        if (next.type != ActionType::shift) {
            const int dep =
                next.type == ActionType::left_arc ? state.stack[state.stack.size() - 2]
                                                  : state.stack[state.stack.size() - 1];
            attached_deps[gold_head[dep]]++;
        }
        state.apply(next);
        actions.push_back(next);
    }
    return actions;
}

ReplayResult replay(int n_tokens, const std::vector<Action>& actions) {
    ParserState state(n_tokens);
    for (const Action& a : actions) state.apply(a);
    if (!state.terminal()) throw ValidationError("transition sequence does not reach a terminal state");
    ReplayResult r;
    r.heads.assign(state.heads.begin() + 1, state.heads.end());
    r.labels.assign(state.labels.begin() + 1, state.labels.end());
    return r;
}

bool is_projective(const Sentence& tree) {
    std::vector<std::string> scratch;
    try {
        static_oracle(tree, scratch);
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

}  // namespace ttt
