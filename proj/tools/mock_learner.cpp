// Bundled mock external learner implementing the subprocess contract:
//
//   mock-learner train   --train <file> --seed <n> --model <dir>
//   mock-learner predict --model <dir> --input <file> --output <file>
//
// "Training" records the seed and a fingerprint of the training file;
// prediction emits a deterministic baseline analysis (each token attached
// to the previous one, first token to the root). Used by tests and by
// `ttt learner-check` demonstrations.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "ttt/conllu.hpp"
#include "ttt/rng.hpp"

namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> parse_flags(int argc, char** argv, int start) {
    std::map<std::string, std::string> flags;
    for (int i = start; i + 1 < argc; i += 2) flags[argv[i]] = argv[i + 1];
    return flags;
}

int do_train(const std::map<std::string, std::string>& flags) {
    const auto train = flags.find("--train");
    const auto seed = flags.find("--seed");
    const auto model = flags.find("--model");
    if (train == flags.end() || seed == flags.end() || model == flags.end()) {
        std::cerr << "usage: mock-learner train --train <file> --seed <n> --model <dir>\n";
        return 1;
    }
    const ttt::Corpus corpus = ttt::read_conllu_file(train->second);
    fs::create_directories(model->second);
    std::ofstream out(model->second + "/mock.model");
    out << "mock-learner v1\n";
    out << "seed " << seed->second << "\n";
    out << "train_fnv " << ttt::fnv1a64(ttt::write_conllu(corpus)) << "\n";
    out << "sentences " << corpus.sentences.size() << "\n";
    return 0;
}

int do_predict(const std::map<std::string, std::string>& flags) {
    const auto model = flags.find("--model");
    const auto input = flags.find("--input");
    const auto output = flags.find("--output");
    if (model == flags.end() || input == flags.end() || output == flags.end()) {
        std::cerr << "usage: mock-learner predict --model <dir> --input <file> --output <file>\n";
        return 1;
    }
    if (!fs::exists(model->second + "/mock.model")) {
        std::cerr << "mock-learner: missing model artifact in " << model->second << "\n";
        return 1;
    }
    ttt::Corpus corpus = ttt::read_conllu_file(input->second);
    for (ttt::Sentence& s : corpus.sentences)
        for (int i = 0; i < s.token_count(); ++i) {
            ttt::Token& t = s.tokens[i];
            t.head = i;  // chain: token 1 is the root
            t.deprel = i == 0 ? "root" : "dep";
            t.upos = "X";
            t.lemma = t.form;
            t.xpos = "_";
            t.feats = "_";
        }
    ttt::write_conllu_file(corpus, output->second);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: mock-learner <train|predict> ...\n";
        return 1;
    }
    const std::string mode = argv[1];
    const auto flags = parse_flags(argc, argv, 2);
    if (mode == "train") return do_train(flags);
    if (mode == "predict") return do_predict(flags);
    std::cerr << "mock-learner: unknown mode '" << mode << "'\n";
    return 1;
}
