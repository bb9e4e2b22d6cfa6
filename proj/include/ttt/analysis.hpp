#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ttt {

struct ScoredModel {
    std::string id;
    double dev_las = 0;
    double test_las = -1;  // < 0 when absent
};

struct ScoredModelPool {
    std::array<std::vector<ScoredModel>, 3> learners;
    int bucket_count = 16;
};

struct EnsembleEnumeration {
    int bucket_count_used = 0;
    // One entry per bucket combination; indices into the corresponding
    // learner's (original) model list.
    std::vector<std::array<int, 3>> triples;
};

// Sorts each learner's models by dev LAS, partitions them into contiguous
// buckets differing in size by at most one, enumerates all bucket_count^3
// bucket combinations and samples one model per bucket. When a learner has
// fewer models than bucket_count the count is lowered (with a warning on
// stderr).
EnsembleEnumeration enumerate_bucket_ensembles(const ScoredModelPool& pool, std::uint64_t seed);

struct DistributionSummary {
    double mean = 0;
    double sd = 0;
    std::array<double, 5> percentiles = {0, 0, 0, 0, 0};  // 5, 25, 50, 75, 95
};

struct ScoreDistribution {
    std::vector<double> samples;
    DistributionSummary summary() const;
};

// Each repetition draws k scores (without replacement by default) and
// records the maximum.
ScoreDistribution simulate_best_of(const std::vector<double>& scores, int k, long long reps,
                                   std::uint64_t seed, bool with_replacement = false);

// Each repetition samples k indices, picks the best model by dev score
// (ties to the lowest index) and accumulates its test score; returns the
// mean. k=1 is the exact expectation: the arithmetic mean of test scores.
double expected_test_best_of(const std::vector<double>& dev_scores,
                             const std::vector<double>& test_scores, int k, long long reps,
                             std::uint64_t seed, bool with_replacement = false);

struct HistogramBin {
    double lo = 0, hi = 0;
    long long count = 0;
};
std::vector<HistogramBin> histogram(const std::vector<double>& samples, int bins);

}  // namespace ttt
