#pragma once

#include <string>

#include "ttt/tritraining.hpp"

namespace ttt {

// Experiment description consumed by the tritrain command: the full
// TriConfig plus data paths, an optional preset name and the output
// directory. Serialized as JSON whose keys mirror the TriConfig field
// names (documented in the README).
struct ExperimentManifest {
    TriConfig config;
    std::string train_path;
    std::string dev_path;
    std::string test_path;  // optional
    std::string unlabelled_path;
    std::string preset_id;  // optional
    std::string output_dir;
};

ExperimentManifest load_manifest(const std::string& path);
void save_manifest(const ExperimentManifest& manifest, const std::string& path);

// Applies a named preset's (A, T, d, o) tuple and repeat flag.
void apply_preset(TriConfig& config, const Preset& preset);

}  // namespace ttt
