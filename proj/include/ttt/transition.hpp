#pragma once

#include <string>
#include <vector>

#include "ttt/conllu.hpp"

namespace ttt {

// Arc-standard transition system over a sentence with an artificial root
// node at position 0. The stack starts as [0]; the terminal configuration
// is stack == [0], empty buffer. Exactly one token ends up attached to the
// root, so every derivable analysis is a valid single-root projective tree.
enum class ActionType : std::uint8_t { shift, left_arc, right_arc };

struct Action {
    ActionType type = ActionType::shift;
    int label = -1;  // index into the label table; -1 for shift

    bool operator==(const Action&) const = default;
};

// Encoded action ids: 0 = shift, 1 + 2*l = left_arc(l), 2 + 2*l = right_arc(l).
int encode_action(const Action& a);
Action decode_action(int id);

struct ParserState {
    explicit ParserState(int n_tokens);

    std::vector<int> stack;  // holds node ids, 0 = root
    int buffer_next;         // next unread token id; buffer is [buffer_next, n]
    int n;
    std::vector<int> heads;   // 1-based; heads[0] unused
    std::vector<int> labels;  // label ids, parallel to heads

    bool buffer_empty() const { return buffer_next > n; }
    bool terminal() const { return buffer_empty() && stack.size() == 1; }
    // Positions of the leftmost/rightmost dependents attached so far (0 if none).
    int leftmost_child(int node) const;
    int rightmost_child(int node) const;

    bool can_apply(const Action& a) const;
    void apply(const Action& a);

    std::vector<int> left_child_of;   // per node, leftmost dependent id so far
    std::vector<int> right_child_of;  // per node, rightmost dependent id so far
};

// Gold transition sequence for a projective tree (static oracle). Labels are
// mapped through `label_ids`, which is extended with unseen labels.
// Throws ValidationError if the sentence is not derivable (non-projective).
std::vector<Action> static_oracle(const Sentence& tree, std::vector<std::string>& label_table);

// Replays a transition sequence and returns the resulting (head, label-id)
// assignment. Throws ValidationError on an inapplicable action.
struct ReplayResult {
    std::vector<int> heads;
    std::vector<int> labels;
};
ReplayResult replay(int n_tokens, const std::vector<Action>& actions);

// True if the oracle can derive the tree (the training-set filter).
bool is_projective(const Sentence& tree);

}  // namespace ttt
