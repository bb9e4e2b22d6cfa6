#pragma once

#include <cstdint>
#include <string>

#include "ttt/conllu.hpp"

namespace ttt::synth {

// Deterministic template grammar over a pseudo-word vocabulary. Sentences
// are projective single-root trees, and the gold analysis is a function of
// the token sequence alone (word classes are disjoint and prepositional
// attachment is decided by the preposition's lexical class), so identical
// surface forms always carry identical trees.
Corpus treebank(int n_sentences, std::uint64_t seed);

// One sentence per line, tokens space-separated (the ingest input format).
std::string forms_text(const Corpus& corpus);

// Forms only: every other column "_", head 0.
Corpus strip_to_unlabelled(const Corpus& corpus);

}  // namespace ttt::synth
