#include "ttt/learner.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ttt/error.hpp"
#include "ttt/parser.hpp"
#include "ttt/rng.hpp"
#include "ttt/tagger.hpp"

#ifdef __unix__
#include <sys/wait.h>
#endif

namespace fs = std::filesystem;

namespace ttt {

struct BuiltinModel {
    bool has_tagger = false;
    PerceptronTagger tagger;
    TransitionParser parser;
};

void validate(const LearnerSpec& spec) {
    if (!spec.predicted_columns.contains(Column::head) ||
        !spec.predicted_columns.contains(Column::deprel))
        throw ValidationError("predicted_columns must contain head and deprel");
    if (spec.kind == LearnerKind::builtin_perceptron) {
        if (spec.epochs < 1) throw ValidationError("builtin learner needs epochs >= 1");
        if (spec.beam != 1)
            throw ValidationError("builtin learner decodes greedily; beam must be 1");
        ColumnSet builtin = ColumnSet::of({Column::upos, Column::head, Column::deprel});
        if (!builtin.contains_all(spec.predicted_columns))
            throw ValidationError(
                "builtin learner can only predict upos, head and deprel; use an external "
                "learner for lemma/xpos/feats");
    } else if (spec.external_cmd.empty()) {
        throw ValidationError("external learner requires external_cmd");
    }
}

std::string coordinate_string(const SeedCoordinates& coords) {
    std::string s = "master=" + std::to_string(coords.master_seed);
    s += "|params=" + coords.params_id;
    s += "|repeat=";
    s += coords.is_repeat ? '1' : '0';
    s += "|learner=" + std::to_string(coords.learner_index);
    s += "|iteration=" + std::to_string(coords.iteration);
    return s;
}

std::uint64_t derive_seed(const SeedCoordinates& coords) {
    return fnv1a64(coordinate_string(coords));
}

std::uint64_t derive_stream_seed(const SeedCoordinates& coords, std::string_view purpose) {
    std::string s = coordinate_string(coords);
    s += "|purpose=";
    s += purpose;
    return fnv1a64(s);
}

std::string fnv_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::uint64_t corpus_fingerprint(const Corpus& corpus) { return fnv1a64(write_conllu(corpus)); }

namespace {

const char* kind_name(LearnerKind k) {
    return k == LearnerKind::builtin_perceptron ? "builtin_perceptron" : "external";
}

std::string manifest_path(const std::string& model_dir) { return model_dir + "/manifest.txt"; }

void write_manifest_file(const std::string& model_dir, const ModelManifest& m) {
    std::ofstream out(manifest_path(model_dir), std::ios::binary);
    if (!out) throw DataError("cannot write " + manifest_path(model_dir));
    out << "kind=" << kind_name(m.spec.kind) << "\n";
    out << "epochs=" << m.spec.epochs << "\n";
    out << "beam=" << m.spec.beam << "\n";
    out << "predicted_columns=" << columns_to_string(m.spec.predicted_columns) << "\n";
    if (!m.spec.external_cmd.empty()) out << "external_cmd=" << m.spec.external_cmd << "\n";
    out << "corpus_fnv=" << m.corpus_fnv << "\n";
    out << "seed=" << m.seed << "\n";
    out << "learner_index=" << m.learner_index << "\n";
    out << "iteration=" << m.iteration << "\n";
    out << "sentences=" << m.sentences << "\n";
    out << "nonprojective_excluded=" << m.nonprojective_excluded << "\n";
    if (m.dev_las >= 0) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.17g", m.dev_las);
        out << "dev_las=" << buf << "\n";
    }
}

ModelManifest read_manifest_file(const std::string& model_dir) {
    std::ifstream in(manifest_path(model_dir), std::ios::binary);
    if (!in) throw DataError("missing model manifest: " + manifest_path(model_dir));
    ModelManifest m;
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "kind")
            m.spec.kind = value == "external" ? LearnerKind::external
                                              : LearnerKind::builtin_perceptron;
        else if (key == "epochs")
            m.spec.epochs = std::stoi(value);
        else if (key == "beam")
            m.spec.beam = std::stoi(value);
        else if (key == "predicted_columns")
            m.spec.predicted_columns = parse_columns(value);
        else if (key == "external_cmd")
            m.spec.external_cmd = value;
        else if (key == "corpus_fnv")
            m.corpus_fnv = value;
        else if (key == "seed")
            m.seed = std::stoull(value);
        else if (key == "learner_index")
            m.learner_index = std::stoi(value);
        else if (key == "iteration")
            m.iteration = std::stoi(value);
        else if (key == "sentences")
            m.sentences = std::stoll(value);
        else if (key == "nonprojective_excluded")
            m.nonprojective_excluded = std::stoll(value);
        else if (key == "dev_las")
            m.dev_las = std::stod(value);
    }
    return m;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out.push_back(c);
    }
    out += "'";
    return out;
}

std::string file_tail(const std::string& path, std::size_t max_bytes = 2000) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "(no diagnostics captured)";
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string all = buf.str();
    if (all.size() > max_bytes) return "..." + all.substr(all.size() - max_bytes);
    return all;
}

// Runs a shell command with stdout+stderr captured to log_path; throws
// LearnerError carrying the captured tail on nonzero exit.
void run_checked(const std::string& command, const std::string& log_path,
                 const std::string& what) {
    const std::string full = command + " > " + shell_quote(log_path) + " 2>&1";
    const int rc = std::system(full.c_str());
    bool ok = false;
#ifdef __unix__
    ok = rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
#else
    ok = rc == 0;
#endif
    if (!ok)
        throw LearnerError(what + " failed (command: " + command +
                           ")\ncaptured output:\n" + file_tail(log_path));
}

std::string external_artifact_dir(const std::string& model_dir) { return model_dir + "/external"; }

ModelHandle train_external(const LearnerSpec& spec, const Corpus& corpus, std::uint64_t seed,
                           const std::string& model_dir, int learner_index, int iteration) {
    fs::create_directories(external_artifact_dir(model_dir));
    const std::string train_file = model_dir + "/train.conllu";
    write_conllu_file(corpus, train_file);
    const std::string cmd = spec.external_cmd + " train --train " + shell_quote(train_file) +
                            " --seed " + std::to_string(seed) + " --model " +
                            shell_quote(external_artifact_dir(model_dir));
    run_checked(cmd, model_dir + "/train.log", "external learner training");

    ModelHandle handle;
    handle.path = model_dir;
    handle.manifest.spec = spec;
    handle.manifest.corpus_fnv = fnv_hex(corpus_fingerprint(corpus));
    handle.manifest.seed = seed;
    handle.manifest.learner_index = learner_index;
    handle.manifest.iteration = iteration;
    handle.manifest.sentences = static_cast<long long>(corpus.sentences.size());
    write_manifest_file(model_dir, handle.manifest);
    return handle;
}

Corpus predict_external(const ModelHandle& model, const Corpus& input) {
    static std::atomic<unsigned long> counter{0};
    const unsigned long k = counter.fetch_add(1);
    const std::string base = model.path + "/pred-" + std::to_string(k);
    const std::string in_file = base + "-in.conllu";
    const std::string out_file = base + "-out.conllu";
    const std::string log_file = base + ".log";
    write_conllu_file(input, in_file);
    const std::string cmd = model.manifest.spec.external_cmd + " predict --model " +
                            shell_quote(external_artifact_dir(model.path)) + " --input " +
                            shell_quote(in_file) + " --output " + shell_quote(out_file);
    run_checked(cmd, log_file, "external learner prediction");
    Corpus out;
    try {
        out = read_conllu_file(out_file);
    } catch (const DataError& e) {
        throw LearnerError(std::string("external learner wrote unreadable output: ") + e.what());
    }
    if (out.sentences.size() != input.sentences.size())
        throw LearnerError("external learner output has " + std::to_string(out.sentences.size()) +
                           " sentences, expected " + std::to_string(input.sentences.size()));
    for (std::size_t i = 0; i < out.sentences.size(); ++i) {
        if (out.sentences[i].token_count() != input.sentences[i].token_count())
            throw LearnerError("external learner changed tokenization of sentence " +
                               std::to_string(i + 1));
        for (int t = 0; t < out.sentences[i].token_count(); ++t)
            if (out.sentences[i].tokens[t].form != input.sentences[i].tokens[t].form)
                throw LearnerError("external learner changed forms in sentence " +
                                   std::to_string(i + 1));
    }
    out.origin = Origin::predicted;
    fs::remove(in_file);
    fs::remove(out_file);
    fs::remove(log_file);
    return out;
}

}  // namespace

ModelHandle train_learner(const LearnerSpec& spec, const Corpus& corpus, std::uint64_t seed,
                          const std::string& model_dir, int learner_index, int iteration) {
    validate(spec);
    if (corpus.sentences.empty()) throw ValidationError("training corpus is empty");
    validate_trees(corpus, "training corpus");

    if (spec.kind == LearnerKind::external)
        return train_external(spec, corpus, seed, model_dir, learner_index, iteration);

    fs::create_directories(model_dir);
    auto model = std::make_shared<BuiltinModel>();
    model->has_tagger = spec.predicted_columns.contains(Column::upos);
    if (model->has_tagger)
        model->tagger.train(corpus, spec.epochs, fnv1a64("tagger", seed));
    const auto stats = model->parser.train(corpus, spec.epochs, fnv1a64("parser", seed));
    if (stats.sentences_used == 0)
        throw ValidationError("no projective sentences left to train the parser on");

    {
        std::ofstream out(model_dir + "/parser.model", std::ios::binary);
        if (!out) throw DataError("cannot write " + model_dir + "/parser.model");
        model->parser.save(out);
    }
    if (model->has_tagger) {
        std::ofstream out(model_dir + "/tagger.model", std::ios::binary);
        if (!out) throw DataError("cannot write " + model_dir + "/tagger.model");
        model->tagger.save(out);
    }

    ModelHandle handle;
    handle.path = model_dir;
    handle.manifest.spec = spec;
    handle.manifest.corpus_fnv = fnv_hex(corpus_fingerprint(corpus));
    handle.manifest.seed = seed;
    handle.manifest.learner_index = learner_index;
    handle.manifest.iteration = iteration;
    handle.manifest.sentences = static_cast<long long>(corpus.sentences.size());
    handle.manifest.nonprojective_excluded = stats.nonprojective_excluded;
    handle.cached = model;
    write_manifest_file(model_dir, handle.manifest);
    return handle;
}

ModelHandle load_model_handle(const std::string& model_dir) {
    ModelHandle handle;
    handle.path = model_dir;
    handle.manifest = read_manifest_file(model_dir);
    if (handle.manifest.spec.kind == LearnerKind::builtin_perceptron) {
        auto model = std::make_shared<BuiltinModel>();
        std::ifstream pin(model_dir + "/parser.model", std::ios::binary);
        if (!pin) throw DataError("missing or unreadable model artifact: " + model_dir +
                                  "/parser.model");
        model->parser.load(pin);
        model->has_tagger = handle.manifest.spec.predicted_columns.contains(Column::upos);
        if (model->has_tagger) {
            std::ifstream tin(model_dir + "/tagger.model", std::ios::binary);
            if (!tin) throw DataError("missing or unreadable model artifact: " + model_dir +
                                      "/tagger.model");
            model->tagger.load(tin);
        }
        handle.cached = model;
    }
    return handle;
}

void write_manifest(const ModelHandle& model) { write_manifest_file(model.path, model.manifest); }

Corpus predict(const ModelHandle& model, const Corpus& input) {
    if (model.manifest.spec.kind == LearnerKind::external)
        return predict_external(model, input);

    std::shared_ptr<const BuiltinModel> builtin = model.cached;
    if (!builtin) builtin = load_model_handle(model.path).cached;

    const bool predicts_upos = model.manifest.spec.predicted_columns.contains(Column::upos);
    Corpus out;
    out.origin = Origin::predicted;
    out.sentences.reserve(input.sentences.size());
    for (const Sentence& s : input.sentences) {
        Sentence work;
        work.tokens = s.tokens;
        if (predicts_upos && builtin->has_tagger)
            builtin->tagger.tag(work);
        builtin->parser.parse(work);

        Sentence res;
        res.comments = s.comments;
        res.extras = s.extras;
        res.tokens.reserve(work.tokens.size());
        for (const Token& t : work.tokens) {
            Token o;
            o.id = t.id;
            o.form = t.form;
            o.upos = predicts_upos ? t.upos : "_";
            o.head = t.head;
            o.deprel = t.deprel;
            res.tokens.push_back(std::move(o));
        }
        out.sentences.push_back(std::move(res));
    }
    return out;
}

}  // namespace ttt
