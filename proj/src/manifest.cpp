#include "ttt/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "ttt/error.hpp"

namespace ttt {

namespace {

using nlohmann::json;

json columns_json(ColumnSet set) {
    json arr = json::array();
    for (Column c : columns_in_order(set)) arr.push_back(column_name(c));
    return arr;
}

ColumnSet columns_from_json(const json& arr) {
    ColumnSet set;
    for (const auto& v : arr) {
        ColumnSet one = parse_columns(v.get<std::string>());
        set.bits |= one.bits;
    }
    return set;
}

}  // namespace

ExperimentManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open manifest " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("manifest " + path + " is not valid JSON: " + e.what());
    }
    ExperimentManifest m;
    TriConfig& c = m.config;
    try {
        if (j.contains("A")) c.augment_size = j["A"].get<long long>();
        if (j.contains("T")) c.iterations = j["T"].get<int>();
        if (j.contains("d")) c.decay = j["d"].get<double>();
        if (j.contains("o")) c.oversample = j["o"].get<bool>();
        if (j.contains("seed_mode")) c.seed_mode = parse_seed_mode(j["seed_mode"].get<std::string>());
        if (j.contains("agreement_columns")) c.agreement_columns = columns_from_json(j["agreement_columns"]);
        if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("unlabelled_multiplier"))
            c.unlabelled_multiplier = j["unlabelled_multiplier"].get<double>();
        if (j.contains("repeat_run")) c.repeat_run = j["repeat_run"].get<bool>();
        if (j.contains("ensemble_repeats")) c.ensemble_repeats = j["ensemble_repeats"].get<int>();
        if (j.contains("learner")) {
            const json& l = j["learner"];
            if (l.contains("kind")) {
                const std::string kind = l["kind"].get<std::string>();
                if (kind == "builtin_perceptron")
                    c.learner.kind = LearnerKind::builtin_perceptron;
                else if (kind == "external")
                    c.learner.kind = LearnerKind::external;
                else
                    throw DataError("unknown learner kind '" + kind + "'");
            }
            if (l.contains("epochs")) c.learner.epochs = l["epochs"].get<int>();
            if (l.contains("beam")) c.learner.beam = l["beam"].get<int>();
            if (l.contains("external_cmd")) c.learner.external_cmd = l["external_cmd"].get<std::string>();
            if (l.contains("predicted_columns"))
                c.learner.predicted_columns = columns_from_json(l["predicted_columns"]);
        }
        if (j.contains("data")) {
            const json& d = j["data"];
            if (d.contains("train")) m.train_path = d["train"].get<std::string>();
            if (d.contains("dev")) m.dev_path = d["dev"].get<std::string>();
            if (d.contains("test")) m.test_path = d["test"].get<std::string>();
            if (d.contains("unlabelled")) m.unlabelled_path = d["unlabelled"].get<std::string>();
        }
        if (j.contains("preset")) m.preset_id = j["preset"].get<std::string>();
        if (j.contains("output_dir")) m.output_dir = j["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw DataError("manifest " + path + ": " + e.what());
    }
    return m;
}

void save_manifest(const ExperimentManifest& m, const std::string& path) {
    const TriConfig& c = m.config;
    json j;
    j["A"] = c.augment_size;
    j["T"] = c.iterations;
    j["d"] = c.decay;
    j["o"] = c.oversample;
    j["seed_mode"] = seed_mode_name(c.seed_mode);
    j["agreement_columns"] = columns_json(effective_agreement_columns(c));
    j["master_seed"] = c.master_seed;
    j["unlabelled_multiplier"] = c.unlabelled_multiplier;
    j["repeat_run"] = c.repeat_run;
    j["ensemble_repeats"] = c.ensemble_repeats;
    j["learner"] = {
        {"kind", c.learner.kind == LearnerKind::external ? "external" : "builtin_perceptron"},
        {"epochs", c.learner.epochs},
        {"beam", c.learner.beam},
        {"external_cmd", c.learner.external_cmd},
        {"predicted_columns", columns_json(c.learner.predicted_columns)},
    };
    j["data"] = {
        {"train", m.train_path},
        {"dev", m.dev_path},
        {"test", m.test_path},
        {"unlabelled", m.unlabelled_path},
    };
    j["preset"] = m.preset_id;
    j["output_dir"] = m.output_dir;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest " + path);
    out << j.dump(2) << "\n";
}

void apply_preset(TriConfig& config, const Preset& preset) {
    config.augment_size = preset.A;
    config.iterations = preset.T;
    config.decay = preset.d;
    config.oversample = preset.oversample;
    config.repeat_run = preset.repeat_run;
}

}  // namespace ttt
