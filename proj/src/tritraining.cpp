#include "ttt/tritraining.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "ttt/ensemble.hpp"
#include "ttt/error.hpp"
#include "ttt/metrics.hpp"

namespace fs = std::filesystem;

namespace ttt {

const char* seed_mode_name(SeedMode m) {
    switch (m) {
        case SeedMode::with_replacement:
            return "with_replacement";
        case SeedMode::full_copy:
            return "full_copy";
        case SeedMode::two_and_a_half:
            return "two_and_a_half";
    }
    return "?";
}

SeedMode parse_seed_mode(const std::string& name) {
    if (name == "with_replacement") return SeedMode::with_replacement;
    if (name == "full_copy") return SeedMode::full_copy;
    if (name == "two_and_a_half") return SeedMode::two_and_a_half;
    throw ValidationError("unknown seed mode '" + name + "'");
}

void validate(const TriConfig& config) {
    if (config.augment_size <= 0) throw ValidationError("A (augment size) must be positive");
    if (config.iterations < 1) throw ValidationError("T (iterations) must be >= 1");
    if (config.decay < 0.0 || config.decay > 1.0)
        throw ValidationError("d (decay) must be within [0, 1]");
    if (config.unlabelled_multiplier <= 0)
        throw ValidationError("unlabelled multiplier must be positive");
    if (config.ensemble_repeats < 1) throw ValidationError("ensemble repeats must be >= 1");
    validate(config.learner);
    const ColumnSet cols = effective_agreement_columns(config);
    if (!cols.contains(Column::head) || !cols.contains(Column::deprel))
        throw ValidationError("agreement columns must include head and deprel");
}

namespace {

std::string shortest_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string params_id(const TriConfig& config) {
    std::string s = "A=" + std::to_string(config.augment_size);
    s += ",T=" + std::to_string(config.iterations);
    s += ",d=" + shortest_double(config.decay);
    s += ",o=";
    s += config.oversample ? '1' : '0';
    s += ",seed_mode=";
    s += seed_mode_name(config.seed_mode);
    return s;
}

ColumnSet effective_agreement_columns(const TriConfig& config) {
    return config.agreement_columns.empty() ? config.learner.predicted_columns
                                            : config.agreement_columns;
}

double decay_cap(double augment_size, double decay, int t, int t_prime) {
    return augment_size * std::pow(decay, static_cast<double>(t - t_prime));
}

std::array<SeedSample, 3> sample_seed_data(const Corpus& labelled, SeedMode mode,
                                           std::uint64_t seed) {
    if (labelled.sentences.empty()) throw ValidationError("labelled data is empty");
    const std::size_t n = labelled.sentences.size();
    std::array<SeedSample, 3> out;
    for (int i = 0; i < 3; ++i) {
        out[i].learner_index = i + 1;
        out[i].sentences.origin = Origin::labelled;
        Rng rng(fnv1a64("seed-sample|learner=" + std::to_string(i + 1), seed));
        Corpus& b = out[i].sentences;
        switch (mode) {
            case SeedMode::full_copy:
                b.sentences = labelled.sentences;
                break;
            case SeedMode::with_replacement:
                b.sentences.reserve(n);
                for (std::size_t k = 0; k < n; ++k)
                    b.sentences.push_back(labelled.sentences[rng.index(n)]);
                break;
            case SeedMode::two_and_a_half: {
                // Urn sampling without replacement, refilled on empty: two
                // full passes plus half of a third, so the half drawn first
                // in the third pass appears three times, the rest twice.
                b.sentences.reserve(2 * n + n / 2);
                for (int pass = 0; pass < 2; ++pass)
                    for (std::size_t idx : rng.permutation(n))
                        b.sentences.push_back(labelled.sentences[idx]);
                const std::vector<std::size_t> third = rng.permutation(n);
                for (std::size_t k = 0; k < n / 2; ++k)
                    b.sentences.push_back(labelled.sentences[third[k]]);
                break;
            }
        }
    }
    return out;
}

bool sentences_agree(const Sentence& a, const Sentence& b, ColumnSet columns) {
    const int n = a.token_count();
    if (b.token_count() != n) return false;
    for (int t = 0; t < n; ++t) {
        const Token& x = a.tokens[t];
        const Token& y = b.tokens[t];
        if (columns.contains(Column::head) && x.head != y.head) return false;
        if (columns.contains(Column::deprel) && x.deprel != y.deprel) return false;
        if (columns.contains(Column::upos) && x.upos != y.upos) return false;
        if (columns.contains(Column::lemma) && x.lemma != y.lemma) return false;
        if (columns.contains(Column::xpos) && x.xpos != y.xpos) return false;
        if (columns.contains(Column::feats) && x.feats != y.feats) return false;
    }
    return true;
}

IterationData agreement_filter(const std::array<Corpus, 3>& predictions, ColumnSet columns,
                               Rng& rng) {
    const std::size_t n = predictions[0].sentences.size();
    for (int i = 1; i < 3; ++i)
        if (predictions[i].sentences.size() != n)
            throw AlignmentError("teacher predictions differ in sentence count");

    IterationData data;
    for (auto& c : data.new_data) c.origin = Origin::predicted;

    for (std::size_t s = 0; s < n; ++s) {
        const Sentence& p0 = predictions[0].sentences[s];
        const Sentence& p1 = predictions[1].sentences[s];
        const Sentence& p2 = predictions[2].sentences[s];
        if (p1.token_count() != p0.token_count() || p2.token_count() != p0.token_count())
            throw AlignmentError("teacher predictions differ in tokenization at sentence " +
                                 std::to_string(s + 1));
        const bool a01 = sentences_agree(p0, p1, columns);
        const bool a02 = sentences_agree(p0, p2, columns);
        const bool a12 = sentences_agree(p1, p2, columns);

        TeacherProvenance prov;
        prov.u_index = static_cast<int>(s);
        if (a01 && a02 && a12) {
            prov.all_agree = true;
            prov.teacher_j = 0;
            prov.teacher_k = 1;
            prov.receiver = static_cast<int>(rng.below(3));
            data.stats.all_agreed++;
        } else if (a01) {
            prov.teacher_j = 0;
            prov.teacher_k = 1;
            prov.receiver = 2;
            data.stats.pair_agreed++;
        } else if (a02) {
            prov.teacher_j = 0;
            prov.teacher_k = 2;
            prov.receiver = 1;
            data.stats.pair_agreed++;
        } else if (a12) {
            prov.teacher_j = 1;
            prov.teacher_k = 2;
            prov.receiver = 0;
            data.stats.pair_agreed++;
        } else {
            data.stats.discarded++;
            continue;
        }
        data.new_data[prov.receiver].sentences.push_back(
            predictions[prov.teacher_j].sentences[s]);
        data.provenance.push_back(prov);
    }
    return data;
}

Corpus cap_to_budget(const Corpus& data, double budget_tokens, std::uint64_t seed) {
    if (static_cast<double>(data.token_total()) <= budget_tokens) return data;
    return sample_corpus(data, budget_tokens, seed, false);
}

AssembledTrainingSet assemble_training_set(const Corpus& seed_data,
                                           const std::vector<Corpus>& history, long long A,
                                           double d, int t, bool oversample, std::uint64_t seed) {
    if (static_cast<int>(history.size()) != t)
        throw ValidationError("history must hold exactly t entries (t'=1..t)");

    AssembledTrainingSet out;
    Corpus reused;
    reused.origin = Origin::predicted;
    for (int tp = 1; tp <= t; ++tp) {
        const double cap = decay_cap(static_cast<double>(A), d, t, tp);
        out.caps.push_back(cap);
        const Corpus& source = history[static_cast<std::size_t>(tp) - 1];
        Corpus sampled;
        if (static_cast<double>(source.token_total()) <= cap)
            sampled = source;  // within the cap: kept in stored order
        else if (cap <= 0)
            sampled.origin = source.origin;
        else
            sampled = sample_corpus(source, cap,
                                    fnv1a64("hist|t_prime=" + std::to_string(tp), seed), false);
        out.taken_tokens.push_back(sampled.token_total());
        for (auto& s : sampled.sentences) reused.sentences.push_back(std::move(s));
    }
    out.history_tokens = reused.token_total();

    Corpus seeds = seed_data;
    if (oversample && seeds.token_total() > 0 && seeds.token_total() < out.history_tokens) {
        Rng rng(fnv1a64("oversample", seed));
        Corpus grown;
        grown.origin = seeds.origin;
        long long total = 0;
        while (total < out.history_tokens) {
            for (std::size_t idx : rng.permutation(seeds.sentences.size())) {
                grown.sentences.push_back(seeds.sentences[idx]);
                total += seeds.sentences[idx].token_count();
                if (total >= out.history_tokens) break;
            }
        }
        seeds = std::move(grown);
    }
    out.seed_tokens = seeds.token_total();

    out.data.origin = Origin::mixed;
    out.data.sentences.reserve(seeds.sentences.size() + reused.sentences.size());
    for (auto& s : seeds.sentences) out.data.sentences.push_back(std::move(s));
    for (auto& s : reused.sentences) out.data.sentences.push_back(std::move(s));
    return out;
}

int select_best_iteration(const std::vector<IterationRecord>& records) {
    if (records.empty()) throw ValidationError("no iteration records to select from");
    int best = 0;
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].ens_mean > records[best].ens_mean) best = static_cast<int>(i);
    return records[static_cast<std::size_t>(best)].t;
}

void write_run_log(const RunLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << "# params\t" << log.params << "\n";
    out << "iteration\tlas1\tlas2\tlas3\tens_mean\tens_min\tens_max"
        << "\tnew1\tnew2\tnew3\tr1\tr2\tr3\ttrain1\ttrain2\ttrain3\n";
    char buf[64];
    auto f4 = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    for (const IterationRecord& r : log.records) {
        out << r.t;
        for (double v : r.learner_las) out << '\t' << f4(v);
        out << '\t' << f4(r.ens_mean) << '\t' << f4(r.ens_min) << '\t' << f4(r.ens_max);
        for (long long v : r.new_tokens) out << '\t' << v;
        for (long long v : r.history_tokens) out << '\t' << v;
        for (long long v : r.train_tokens) out << '\t' << v;
        out << '\n';
    }
    out << "# selected\t" << log.selected_iteration << "\n";
}

void write_timings(const RunLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << "iteration\tseconds\n";
    char buf[64];
    for (const IterationRecord& r : log.records) {
        std::snprintf(buf, sizeof(buf), "%.3f", r.seconds);
        out << r.t << '\t' << buf << '\n';
    }
}

namespace {

// Runs fn(0..n-1) on up to `workers` threads. Output slots are indexed, so
// results are identical for any worker count.
void run_indexed(int n, int workers, const std::function<void(int)>& fn) {
    const int n_threads = std::max(1, std::min(workers, n));
    if (n_threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::string learner_dir(const std::string& run_dir, int t, int i) {
    return run_dir + "/iter-" + std::to_string(t) + "/learner-" + std::to_string(i + 1);
}

}  // namespace

RunResult run_tritraining(const TriConfig& config, const Corpus& labelled,
                          const Corpus& unlabelled, const Corpus& dev, const RunOptions& opts) {
    validate(config);
    if (labelled.sentences.empty()) throw ValidationError("labelled data is empty");
    if (dev.sentences.empty()) throw ValidationError("dev data is empty");
    if (unlabelled.sentences.empty()) throw ValidationError("unlabelled data is empty");
    validate_trees(labelled, "labelled data");
    validate_trees(dev, "dev data");
    if (opts.run_dir.empty()) throw ValidationError("run directory is required");
    fs::create_directories(opts.run_dir);

    const std::string pid = params_id(config);
    const ColumnSet agree_cols = effective_agreement_columns(config);
    auto coords = [&](int learner_index, int t) {
        SeedCoordinates c;
        c.master_seed = config.master_seed;
        c.params_id = pid;
        c.is_repeat = config.repeat_run;
        c.learner_index = learner_index;
        c.iteration = t;
        return c;
    };

    RunLog log;
    log.params = pid;
    RunResult result;

    const auto seed_samples = sample_seed_data(
        labelled, config.seed_mode, derive_stream_seed(coords(0, 0), "seed-sample"));

    std::array<ModelHandle, 3> models;
    std::array<std::vector<Corpus>, 3> history;  // history[i][t'-1] = L_{t',i}

    auto train_and_score = [&](int t, const std::array<Corpus, 3>& train_sets,
                               IterationRecord& record) {
        run_indexed(3, opts.workers, [&](int i) {
            const std::string dir = learner_dir(opts.run_dir, t, i);
            fs::create_directories(dir);
            write_conllu_file(train_sets[i], dir + "/train.conllu");
            models[i] = train_learner(config.learner, train_sets[i],
                                      derive_seed(coords(i + 1, t)), dir + "/model", i + 1, t);
        });
        std::array<Corpus, 3> dev_preds;
        run_indexed(3, opts.workers, [&](int i) {
            dev_preds[i] = predict(models[i], dev);
            write_conllu_file(dev_preds[i],
                              learner_dir(opts.run_dir, t, i) + "/pred-dev.conllu");
        });
        for (int i = 0; i < 3; ++i) {
            record.learner_las[i] = evaluate(dev, dev_preds[i]).las;
            models[i].manifest.dev_las = record.learner_las[i];
            write_manifest(models[i]);
        }
        CombinerConfig cc;
        cc.repeats = config.ensemble_repeats;
        cc.base_seed = derive_stream_seed(coords(0, t), "combine");
        const EnsembleScore score = averaged_ensemble_las(
            std::vector<Corpus>(dev_preds.begin(), dev_preds.end()), dev, cc);
        record.ens_mean = score.mean;
        record.ens_min = score.min;
        record.ens_max = score.max;
        for (int i = 0; i < 3; ++i) record.train_tokens[i] = train_sets[i].token_total();
    };

    auto flush = [&] {
        write_run_log(log, opts.run_dir + "/run-log.tsv");
        write_timings(log, opts.run_dir + "/timings.tsv");
    };

    try {
        {
            const auto started = std::chrono::steady_clock::now();
            IterationRecord record;
            record.t = 0;
            std::array<Corpus, 3> train_sets = {seed_samples[0].sentences,
                                                seed_samples[1].sentences,
                                                seed_samples[2].sentences};
            train_and_score(0, train_sets, record);
            record.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            log.records.push_back(record);
            log.selected_iteration = select_best_iteration(log.records);
            flush();
        }

        for (int t = 1; t <= config.iterations; ++t) {
            const auto started = std::chrono::steady_clock::now();
            IterationRecord record;
            record.t = t;

            const double uprime_budget =
                config.unlabelled_multiplier * static_cast<double>(config.augment_size);
            const Corpus uprime =
                sample_corpus(unlabelled, uprime_budget,
                              derive_stream_seed(coords(0, t), "unlabelled-sample"), true);

            std::array<Corpus, 3> uprime_preds;
            run_indexed(3, opts.workers, [&](int i) {
                uprime_preds[i] = predict(models[i], uprime);
            });

            Rng agree_rng(derive_stream_seed(coords(0, t), "agreement"));
            IterationData iteration = agreement_filter(uprime_preds, agree_cols, agree_rng);
            iteration.t = t;

            fs::create_directories(opts.run_dir + "/iter-" + std::to_string(t));
            std::array<Corpus, 3> train_sets;
            for (int i = 0; i < 3; ++i) {
                Corpus capped = cap_to_budget(iteration.new_data[i],
                                              static_cast<double>(config.augment_size),
                                              derive_stream_seed(coords(i + 1, t), "cap"));
                record.new_tokens[i] = capped.token_total();
                write_conllu_file(capped, opts.run_dir + "/iter-" + std::to_string(t) +
                                              "/new-data-" + std::to_string(i + 1) + ".conllu");
                history[i].push_back(std::move(capped));

                AssembledTrainingSet assembled = assemble_training_set(
                    seed_samples[i].sentences, history[i], config.augment_size, config.decay, t,
                    config.oversample, derive_stream_seed(coords(i + 1, t), "assemble"));
                record.history_tokens[i] = assembled.history_tokens;
                train_sets[i] = std::move(assembled.data);
            }

            train_and_score(t, train_sets, record);
            record.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            log.records.push_back(record);
            log.selected_iteration = select_best_iteration(log.records);
            flush();
        }
    } catch (...) {
        // Keep the log through the last complete iteration.
        try {
            flush();
        } catch (...) {
        }
        throw;
    }

    log.selected_iteration = select_best_iteration(log.records);
    flush();
    for (int i = 0; i < 3; ++i)
        result.selected_models[i] =
            load_model_handle(learner_dir(opts.run_dir, log.selected_iteration, i) + "/model");
    result.log = log;
    return result;
}

namespace {

std::vector<Preset> build_grid(const std::string& prefix, double high_decay) {
    const std::string hd = high_decay == 1.0 ? "1" : "0.71";
    std::vector<Preset> grid;
    auto add = [&](const std::string& name, long long A, int T, double d, bool repeat) {
        grid.push_back(Preset{prefix + name, A, T, d, false, repeat});
        grid.push_back(Preset{prefix + name + "-os", A, T, d, true, repeat});
    };
    add("A40-T12-d" + hd, 40000, 12, high_decay, false);
    add("A80-T8-d" + hd, 80000, 8, high_decay, false);
    add("A80-T8-d0.5", 80000, 8, 0.5, false);
    add("A80-T8-d0.5-r2", 80000, 8, 0.5, true);
    add("A160-T4-d0.5", 160000, 4, 0.5, false);
    add("A160-T4-d0.5-r2", 160000, 4, 0.5, true);
    return grid;
}

}  // namespace

const std::vector<Preset>& standard_presets() {
    static const std::vector<Preset> grid = build_grid("", 1.0);
    return grid;
}

const std::vector<Preset>& mbert_presets() {
    static const std::vector<Preset> grid = build_grid("mbert-", 0.71);
    return grid;
}

const Preset* find_preset(const std::string& name) {
    for (const Preset& p : standard_presets())
        if (p.name == name) return &p;
    for (const Preset& p : mbert_presets())
        if (p.name == name) return &p;
    return nullptr;
}

}  // namespace ttt
