#include "ttt/cli_app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ttt/analysis.hpp"
#include "ttt/conllu.hpp"
#include "ttt/ensemble.hpp"
#include "ttt/error.hpp"
#include "ttt/manifest.hpp"
#include "ttt/metrics.hpp"
#include "ttt/tritraining.hpp"

namespace fs = std::filesystem;

namespace ttt {

namespace {

// ---------------------------------------------------------------------------
// Option values for all subcommands.

struct CliState {
    // tritrain
    std::string manifest_path;
    std::string train_path, dev_path, test_path, unlabelled_path;
    std::string out_dir;
    std::string preset;
    bool list_presets = false;
    long long augment_size = -1;
    int iterations = -1;
    double decay = -1;
    bool oversample = false;
    std::string seed_mode;
    std::string agreement_columns;
    std::uint64_t master_seed = 1;
    bool seed_given = false;
    double unlabelled_multiplier = -1;
    bool repeat_run = false;
    int ensemble_repeats = -1;
    std::string learner_kind;
    std::string external_cmd;
    int epochs = -1;
    int beam = -1;
    std::string predicted_columns;
    int workers = 1;

    // eval
    std::string gold_path, pred_path, pred2_path, train_vocab_path, json_path;
    bool universal = false;
    std::string unit = "token";
    std::string mcnemar_mode = "exact";
    bool column_table = false;

    // combine
    std::vector<std::string> combine_inputs;
    std::string combine_output;
    std::string combine_all_dir;
    int combine_repeats = 1;
    std::uint64_t combine_seed = 0;
    std::string combine_gold;
    std::string vote_mode = "exact";

    // simulate
    std::string scores_path;
    int sim_k = 1;
    long long sim_reps = 250000;
    std::uint64_t sim_seed = 0;
    bool with_replacement = false;
    std::string sim_mode = "best-of";
    int hist_bins = 20;
    std::string hist_path;

    // ingest
    std::string ingest_input, ingest_output;
    PoolFilterSpec pool;
    bool no_dedup = false;

    // learner-check
    std::string check_cmd;
    std::string check_dir;
};

void add_tritrain(CLI::App& app, CliState& s) {
    auto* cmd = app.add_subcommand("tritrain", "Run a full tri-training experiment");
    cmd->add_option("--manifest", s.manifest_path,
                    "Experiment manifest (JSON); flags override its values");
    cmd->add_option("--train", s.train_path, "Labelled training data (CoNLL-U)");
    cmd->add_option("--dev", s.dev_path, "Development data (CoNLL-U)");
    cmd->add_option("--unlabelled", s.unlabelled_path,
                    "Unlabelled pool (CoNLL-U, e.g. from the ingest command)");
    cmd->add_option("--test", s.test_path, "Test data (CoNLL-U, recorded only)");
    cmd->add_option("--out", s.out_dir, "Run output directory");
    cmd->add_option("--preset", s.preset, "Named preset, e.g. A80-T8-d0.5 (see --list-presets)");
    cmd->add_flag("--list-presets", s.list_presets, "Print the preset grids and exit");
    cmd->add_option("-A,--augment-size", s.augment_size,
                    "A: token budget of automatically labelled data per learner and iteration");
    cmd->add_option("-T,--iterations", s.iterations, "T: number of tri-training iterations");
    cmd->add_option("-d,--decay", s.decay, "d: weight decay for data from previous iterations");
    cmd->add_flag("-o,--oversample", s.oversample,
                  "Oversample seed data to match the automatically labelled data");
    cmd->add_option("--seed-mode", s.seed_mode,
                    "Seed data sampling: with_replacement | full_copy | two_and_a_half");
    cmd->add_option("--agreement-columns", s.agreement_columns,
                    "Columns compared by the agreement filter (comma list)");
    cmd->add_option("--seed", s.master_seed, "Master seed; all randomness derives from it");
    cmd->add_option("--unlabelled-multiplier", s.unlabelled_multiplier,
                    "|U'| in tokens as a multiple of A");
    cmd->add_flag("--repeat-run", s.repeat_run, "Mark this run as a repeat run (seed derivation)");
    cmd->add_option("--ensemble-repeats", s.ensemble_repeats,
                    "Combiner repeats when scoring the dev ensemble");
    cmd->add_option("--learner", s.learner_kind, "Learner kind: builtin | external");
    cmd->add_option("--external-cmd", s.external_cmd, "External learner command template");
    cmd->add_option("--epochs", s.epochs, "Builtin learner training epochs");
    cmd->add_option("--beam", s.beam, "Builtin learner beam width (1 = greedy)");
    cmd->add_option("--predicted-columns", s.predicted_columns,
                    "Columns the learner predicts (comma list)");
    cmd->add_option("--workers", s.workers,
                    "Concurrent learner jobs; never changes results");
}

void add_eval(CLI::App& app, CliState& s) {
    auto* cmd = app.add_subcommand("eval", "Score predictions against gold");
    cmd->add_option("--gold", s.gold_path, "Gold CoNLL-U file")->required();
    cmd->add_option("--pred", s.pred_path, "Predicted CoNLL-U file")->required();
    cmd->add_option("--train-vocab", s.train_vocab_path,
                    "Training CoNLL-U; enables the OOV/length/label breakdown");
    cmd->add_option("--pred2", s.pred2_path, "Second system; enables the McNemar test");
    cmd->add_flag("--universal", s.universal, "Compare only the universal part of labels");
    cmd->add_option("--unit", s.unit, "McNemar unit: token | sentence");
    cmd->add_option("--mcnemar", s.mcnemar_mode, "McNemar variant: exact | chisquare");
    cmd->add_flag("--columns", s.column_table, "Also print lemma/upos/xpos/feats accuracy");
    cmd->add_option("--json", s.json_path, "Write the structured report to this file");
}

void add_combine(CLI::App& app, CliState& s) {
    auto* cmd = app.add_subcommand("combine", "Combine predicted trees into an ensemble");
    cmd->add_option("inputs", s.combine_inputs, "Predicted CoNLL-U files (2 or more)")
        ->required()
        ->expected(-2);
    cmd->add_option("--output", s.combine_output, "Write the first repeat's combination here");
    cmd->add_option("--all-outputs", s.combine_all_dir,
                    "Directory for every repeat (combined-<r>.conllu)");
    cmd->add_option("--repeats", s.combine_repeats, "Number of combiner repeats");
    cmd->add_option("--seed", s.combine_seed, "Combiner base seed");
    cmd->add_option("--gold", s.combine_gold, "Gold file; prints mean/min/max LAS over repeats");
    cmd->add_option("--vote-mode", s.vote_mode, "Arc votes: exact | head");
}

void add_simulate(CLI::App& app, CliState& s) {
    auto* cmd = app.add_subcommand("simulate", "Best-of-k baseline distribution simulation");
    cmd->add_option("--scores", s.scores_path,
                    "Score table (TSV: model id, dev LAS[, test LAS])")
        ->required();
    cmd->add_option("--k", s.sim_k, "Scores drawn per repetition")->required();
    cmd->add_option("--reps", s.sim_reps, "Number of repetitions");
    cmd->add_option("--seed", s.sim_seed, "Simulation seed");
    cmd->add_flag("--with-replacement", s.with_replacement, "Draw with replacement");
    cmd->add_option("--mode", s.sim_mode, "best-of | expected-test");
    cmd->add_option("--hist-bins", s.hist_bins, "Histogram bin count");
    cmd->add_option("--hist", s.hist_path, "Write histogram TSV here");
}

void add_ingest(CLI::App& app, CliState& s) {
    auto* cmd = app.add_subcommand("ingest", "Filter, de-duplicate and shuffle unlabelled text");
    cmd->add_option("--input", s.ingest_input, "One sentence per line, tokens space-separated ('-' = stdin)")
        ->required();
    cmd->add_option("--output", s.ingest_output, "Output CoNLL-U pool file")->required();
    cmd->add_option("--min-len", s.pool.min_len, "Minimum sentence length in tokens");
    cmd->add_option("--max-len", s.pool.max_len, "Maximum sentence length in tokens");
    cmd->add_option("--max-token-bytes", s.pool.max_token_bytes,
                    "Drop sentences with a longer token (UTF-8 bytes)");
    cmd->add_flag("--no-dedup", s.no_dedup, "Keep exact duplicate sentences");
    cmd->add_option("--keep-fraction", s.pool.keep_fraction,
                    "Randomly keep this fraction of input sentences");
    cmd->add_option("--seed", s.pool.shuffle_seed, "Shuffle/downsampling seed");
}

void add_learner_check(CLI::App& app, CliState& s) {
    auto* cmd =
        app.add_subcommand("learner-check", "Validate an external learner's subprocess contract");
    cmd->add_option("--cmd", s.check_cmd, "External learner command template")->required();
    cmd->add_option("--work", s.check_dir, "Working directory (default: ./learner-check)");
}

void build_app(CLI::App& app, CliState& s) {
    app.require_subcommand(0, 1);
    add_tritrain(app, s);
    add_eval(app, s);
    add_combine(app, s);
    add_simulate(app, s);
    add_ingest(app, s);
    add_learner_check(app, s);
}

// ---------------------------------------------------------------------------
// tritrain

int cmd_tritrain(CLI::App* cmd, CliState& s) {
    if (s.list_presets) {
        std::cout << "standard grid:\n";
        for (const Preset& p : standard_presets())
            std::cout << "  " << p.name << "\tA=" << p.A << " T=" << p.T << " d=" << p.d
                      << " oversample=" << (p.oversample ? "yes" : "no")
                      << (p.repeat_run ? " (repeat run)" : "") << "\n";
        std::cout << "mbert grid:\n";
        for (const Preset& p : mbert_presets())
            std::cout << "  " << p.name << "\tA=" << p.A << " T=" << p.T << " d=" << p.d
                      << " oversample=" << (p.oversample ? "yes" : "no")
                      << (p.repeat_run ? " (repeat run)" : "") << "\n";
        return kExitOk;
    }

    ExperimentManifest manifest;
    if (!s.manifest_path.empty()) manifest = load_manifest(s.manifest_path);

    if (!s.preset.empty()) manifest.preset_id = s.preset;
    if (!manifest.preset_id.empty()) {
        const Preset* preset = find_preset(manifest.preset_id);
        if (preset == nullptr) throw ValidationError("unknown preset '" + manifest.preset_id + "'");
        apply_preset(manifest.config, *preset);
    }

    TriConfig& c = manifest.config;
    if (s.augment_size >= 0) c.augment_size = s.augment_size;
    if (s.iterations >= 0) c.iterations = s.iterations;
    if (s.decay >= 0) c.decay = s.decay;
    if (cmd->count("--oversample") > 0) c.oversample = s.oversample;
    if (!s.seed_mode.empty()) c.seed_mode = parse_seed_mode(s.seed_mode);
    if (!s.agreement_columns.empty()) c.agreement_columns = parse_columns(s.agreement_columns);
    if (cmd->count("--seed") > 0) c.master_seed = s.master_seed;
    if (s.unlabelled_multiplier > 0) c.unlabelled_multiplier = s.unlabelled_multiplier;
    if (cmd->count("--repeat-run") > 0) c.repeat_run = s.repeat_run;
    if (s.ensemble_repeats > 0) c.ensemble_repeats = s.ensemble_repeats;
    if (!s.learner_kind.empty()) {
        if (s.learner_kind == "builtin")
            c.learner.kind = LearnerKind::builtin_perceptron;
        else if (s.learner_kind == "external")
            c.learner.kind = LearnerKind::external;
        else
            throw ValidationError("unknown learner kind '" + s.learner_kind + "'");
    }
    if (!s.external_cmd.empty()) {
        c.learner.external_cmd = s.external_cmd;
        if (s.learner_kind.empty()) c.learner.kind = LearnerKind::external;
    }
    if (s.epochs > 0) c.learner.epochs = s.epochs;
    if (s.beam > 0) c.learner.beam = s.beam;
    if (!s.predicted_columns.empty())
        c.learner.predicted_columns = parse_columns(s.predicted_columns);
    if (c.learner.kind == LearnerKind::external &&
        !c.learner.predicted_columns.contains(Column::lemma) &&
        cmd->count("--predicted-columns") == 0 && s.manifest_path.empty())
        c.learner.predicted_columns = ColumnSet::all();

    if (!s.train_path.empty()) manifest.train_path = s.train_path;
    if (!s.dev_path.empty()) manifest.dev_path = s.dev_path;
    if (!s.test_path.empty()) manifest.test_path = s.test_path;
    if (!s.unlabelled_path.empty()) manifest.unlabelled_path = s.unlabelled_path;
    if (!s.out_dir.empty()) manifest.output_dir = s.out_dir;

    if (manifest.train_path.empty() || manifest.dev_path.empty() ||
        manifest.unlabelled_path.empty() || manifest.output_dir.empty())
        throw ValidationError("tritrain needs --train, --dev, --unlabelled and --out");
    for (const std::string* p :
         {&manifest.train_path, &manifest.dev_path, &manifest.unlabelled_path}) {
        if (!fs::exists(*p)) throw ValidationError("data path does not exist: " + *p);
    }
    if (!manifest.test_path.empty() && !fs::exists(manifest.test_path))
        throw ValidationError("data path does not exist: " + manifest.test_path);

    validate(manifest.config);
    fs::create_directories(manifest.output_dir);
    save_manifest(manifest, manifest.output_dir + "/manifest.json");

    const Corpus train = read_conllu_file(manifest.train_path);
    const Corpus dev = read_conllu_file(manifest.dev_path);
    Corpus unlabelled = read_conllu_file(manifest.unlabelled_path);
    unlabelled.origin = Origin::unlabelled;

    RunOptions opts;
    opts.run_dir = manifest.output_dir;
    opts.workers = s.workers;
    const RunResult result = run_tritraining(manifest.config, train, unlabelled, dev, opts);

    std::cout << "selected iteration " << result.log.selected_iteration << " with ensemble dev LAS ";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f",
                  result.log.records[static_cast<std::size_t>(result.log.selected_iteration)]
                      .ens_mean);
    std::cout << buf << "\n";
    std::cout << "run log: " << manifest.output_dir << "/run-log.tsv\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(CliState& s) {
    const Corpus gold = read_conllu_file(s.gold_path);
    const Corpus pred = read_conllu_file(s.pred_path);
    EvalOptions opts;
    opts.universal_deprel = s.universal;
    const EvalReport report = evaluate(gold, pred, opts);
    std::cout << render_eval(report);

    BreakdownReport bd;
    bool have_bd = false;
    if (!s.train_vocab_path.empty()) {
        const Corpus train = read_conllu_file(s.train_vocab_path);
        bd = breakdown(gold, pred, training_vocabulary(train), opts);
        have_bd = true;
        std::cout << "\n" << render_breakdown_tsv(bd);
    }

    SignificanceResult sig;
    bool have_sig = false;
    if (!s.pred2_path.empty()) {
        const Corpus pred2 = read_conllu_file(s.pred2_path);
        const EvalReport report2 = evaluate(gold, pred2, opts);
        const McnemarMode mode =
            s.mcnemar_mode == "chisquare" ? McnemarMode::chisquare : McnemarMode::exact;
        if (s.mcnemar_mode != "exact" && s.mcnemar_mode != "chisquare")
            throw ValidationError("unknown McNemar mode '" + s.mcnemar_mode + "'");
        if (s.unit == "sentence")
            sig = mcnemar(sentence_flags(gold, report.correct_flags),
                          sentence_flags(gold, report2.correct_flags), mode);
        else if (s.unit == "token")
            sig = mcnemar(report.correct_flags, report2.correct_flags, mode);
        else
            throw ValidationError("unknown unit '" + s.unit + "'");
        have_sig = true;
        std::cout << "\n" << render_significance(sig);
    }

    if (s.column_table) {
        std::cout << "\ncolumn\taccuracy\n";
        for (const auto& [name, acc] : column_accuracy(gold, pred)) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.2f", acc);
            std::cout << name << "\t" << buf << "\n";
        }
    }

    if (!s.json_path.empty()) {
        std::ofstream out(s.json_path, std::ios::binary);
        if (!out) throw DataError("cannot write " + s.json_path);
        out << report_json(report, have_bd ? &bd : nullptr, have_sig ? &sig : nullptr);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// combine

int cmd_combine(CliState& s) {
    std::vector<Corpus> systems;
    systems.reserve(s.combine_inputs.size());
    for (const std::string& path : s.combine_inputs) systems.push_back(read_conllu_file(path));

    CombinerConfig config;
    config.repeats = s.combine_repeats;
    config.base_seed = s.combine_seed;
    if (s.vote_mode == "head")
        config.mode = VoteMode::head_only;
    else if (s.vote_mode != "exact")
        throw ValidationError("unknown vote mode '" + s.vote_mode + "'");

    const std::vector<Corpus> combined = combine_corpora(systems, config);
    if (!s.combine_output.empty()) write_conllu_file(combined[0], s.combine_output);
    if (!s.combine_all_dir.empty()) {
        fs::create_directories(s.combine_all_dir);
        for (std::size_t r = 0; r < combined.size(); ++r)
            write_conllu_file(combined[r],
                              s.combine_all_dir + "/combined-" + std::to_string(r) + ".conllu");
    }

    if (!s.combine_gold.empty()) {
        const Corpus gold = read_conllu_file(s.combine_gold);
        double sum = 0, mn = 0, mx = 0;
        for (std::size_t r = 0; r < combined.size(); ++r) {
            const double las = evaluate(gold, combined[r]).las;
            sum += las;
            mn = r == 0 ? las : std::min(mn, las);
            mx = r == 0 ? las : std::max(mx, las);
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "repeats %d\nmean %.4f\nmin %.4f\nmax %.4f\n",
                      config.repeats, sum / static_cast<double>(combined.size()), mn, mx);
        std::cout << buf;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct ScoreTable {
    std::vector<std::string> ids;
    std::vector<double> dev;
    std::vector<double> test;
    bool has_test = false;
};

ScoreTable read_score_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open score table " + path);
    ScoreTable table;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string id;
        double dev;
        if (!(row >> id >> dev)) throw ParseError("expected 'id<TAB>dev[<TAB>test]'", line_no);
        double test;
        if (row >> test) {
            table.test.push_back(test);
            table.has_test = true;
        }
        table.ids.push_back(id);
        table.dev.push_back(dev);
    }
    if (table.ids.empty()) throw DataError("score table " + path + " is empty");
    if (table.has_test && table.test.size() != table.dev.size())
        throw DataError("score table mixes rows with and without test scores");
    return table;
}

int cmd_simulate(CliState& s) {
    const ScoreTable table = read_score_table(s.scores_path);
    char buf[64];
    if (s.sim_mode == "expected-test") {
        if (!table.has_test)
            throw ValidationError("expected-test mode needs a third (test) score column");
        const double expectation = expected_test_best_of(table.dev, table.test, s.sim_k,
                                                         s.sim_reps, s.sim_seed,
                                                         s.with_replacement);
        std::cout << "pool " << table.dev.size() << "\nk " << s.sim_k << "\nreps " << s.sim_reps
                  << "\n";
        std::snprintf(buf, sizeof(buf), "%.6f", expectation);
        std::cout << "expected_test_las " << buf << "\n";
        return kExitOk;
    }
    if (s.sim_mode != "best-of") throw ValidationError("unknown mode '" + s.sim_mode + "'");

    const ScoreDistribution dist =
        simulate_best_of(table.dev, s.sim_k, s.sim_reps, s.sim_seed, s.with_replacement);
    const DistributionSummary summary = dist.summary();
    std::cout << "pool " << table.dev.size() << "\nk " << s.sim_k << "\nreps " << s.sim_reps
              << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", summary.mean);
    std::cout << "mean " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", summary.sd);
    std::cout << "sd " << buf << "\n";
    static constexpr const char* kNames[5] = {"p5", "p25", "p50", "p75", "p95"};
    for (int i = 0; i < 5; ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f", summary.percentiles[static_cast<std::size_t>(i)]);
        std::cout << kNames[i] << " " << buf << "\n";
    }
    if (!s.hist_path.empty()) {
        std::ofstream out(s.hist_path, std::ios::binary);
        if (!out) throw DataError("cannot write " + s.hist_path);
        out << "bin_lo\tbin_hi\tcount\n";
        for (const HistogramBin& b : histogram(dist.samples, s.hist_bins)) {
            std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t", b.lo, b.hi);
            out << buf << b.count << "\n";
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// ingest

int cmd_ingest(CliState& s) {
    s.pool.dedup = !s.no_dedup;
    Corpus pool;
    if (s.ingest_input == "-") {
        pool = ingest_unlabelled(std::cin, s.pool);
    } else {
        std::ifstream in(s.ingest_input, std::ios::binary);
        if (!in) throw DataError("cannot open " + s.ingest_input);
        pool = ingest_unlabelled(in, s.pool);
    }
    write_conllu_file(pool, s.ingest_output);
    std::cout << "sentences " << pool.sentences.size() << "\ntokens " << pool.token_total()
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// learner-check

const char* kCheckFixture =
    "1\tthe\t_\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tcat\t_\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
    "3\tsleeps\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "4\t.\t_\tPUNCT\t_\t_\t3\tpunct\t_\t_\n"
    "\n"
    "1\tbirds\t_\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tsing\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n"
    "1\ta\t_\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tdog\t_\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
    "3\tbarks\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "4\tloudly\t_\tADV\t_\t_\t3\tadvmod\t_\t_\n"
    "5\t.\t_\tPUNCT\t_\t_\t3\tpunct\t_\t_\n"
    "\n";

int cmd_learner_check(CliState& s) {
    const std::string work = s.check_dir.empty() ? std::string("learner-check") : s.check_dir;
    fs::create_directories(work);
    const Corpus fixture = parse_conllu(std::string(kCheckFixture));

    LearnerSpec spec;
    spec.kind = LearnerKind::external;
    spec.external_cmd = s.check_cmd;
    spec.predicted_columns = ColumnSet::all();

    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << "check " << name << ": " << (ok ? "ok" : "FAIL") << detail << "\n";
        if (!ok) ++failures;
    };

    ModelHandle model;
    try {
        model = train_learner(spec, fixture, 42, work + "/model-check");
        report("train contract", true);
    } catch (const std::exception& e) {
        report("train contract", false, std::string(" (") + e.what() + ")");
        return kExitLearner;
    }

    Corpus first, second;
    try {
        first = predict(model, fixture);
        report("predict contract", true);
    } catch (const std::exception& e) {
        report("predict contract", false, std::string(" (") + e.what() + ")");
        return kExitLearner;
    }

    bool valid = true;
    for (const Sentence& sent : first.sentences) valid = valid && is_valid_tree(sent);
    report("output trees valid", valid);

    try {
        second = predict(model, fixture);
        report("predict deterministic", write_conllu(first) == write_conllu(second));
    } catch (const std::exception& e) {
        report("predict deterministic", false, std::string(" (") + e.what() + ")");
        ++failures;
    }

    return failures == 0 ? kExitOk : kExitLearner;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CliState state;
    CLI::App app{"Tri-training toolkit for dependency parsing"};
    build_app(app, state);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand("tritrain"))
            return cmd_tritrain(app.get_subcommand("tritrain"), state);
        if (app.got_subcommand("eval")) return cmd_eval(state);
        if (app.got_subcommand("combine")) return cmd_combine(state);
        if (app.got_subcommand("simulate")) return cmd_simulate(state);
        if (app.got_subcommand("ingest")) return cmd_ingest(state);
        if (app.got_subcommand("learner-check")) return cmd_learner_check(state);
        std::cout << app.help();
        return kExitOk;
    } catch (const LearnerError& e) {
        std::cerr << "learner error: " << e.what() << "\n";
        return kExitLearner;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

std::string cli_help_text() {
    CliState state;
    CLI::App app{"Tri-training toolkit for dependency parsing"};
    build_app(app, state);
    std::string text = app.help("", CLI::AppFormatMode::All);
    for (const CLI::App* sub : app.get_subcommands(nullptr)) text += sub->help();
    return text;
}

std::vector<std::string> cli_all_flags() {
    CliState state;
    CLI::App app{"Tri-training toolkit for dependency parsing"};
    build_app(app, state);
    std::vector<std::string> flags;
    for (const CLI::App* sub : app.get_subcommands(nullptr))
        for (const CLI::Option* opt : sub->get_options())
            if (!opt->get_lnames().empty()) flags.push_back("--" + opt->get_lnames()[0]);
    return flags;
}

const std::map<std::string, std::string>& tritrain_flag_config_keys() {
    static const std::map<std::string, std::string> mapping = {
        {"--augment-size", "A"},
        {"--iterations", "T"},
        {"--decay", "d"},
        {"--oversample", "o"},
        {"--seed-mode", "seed_mode"},
        {"--agreement-columns", "agreement_columns"},
        {"--seed", "master_seed"},
        {"--unlabelled-multiplier", "unlabelled_multiplier"},
        {"--repeat-run", "repeat_run"},
        {"--ensemble-repeats", "ensemble_repeats"},
        {"--learner", "learner.kind"},
        {"--external-cmd", "learner.external_cmd"},
        {"--epochs", "learner.epochs"},
        {"--beam", "learner.beam"},
        {"--predicted-columns", "learner.predicted_columns"},
        {"--train", "data.train"},
        {"--dev", "data.dev"},
        {"--test", "data.test"},
        {"--unlabelled", "data.unlabelled"},
        {"--out", "output_dir"},
        {"--preset", "preset"},
    };
    return mapping;
}

}  // namespace ttt
