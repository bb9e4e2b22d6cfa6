#include "ttt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "ttt/error.hpp"
#include "ttt/rng.hpp"

namespace ttt {

EnsembleEnumeration enumerate_bucket_ensembles(const ScoredModelPool& pool, std::uint64_t seed) {
    if (pool.bucket_count < 1) throw ValidationError("bucket count must be >= 1");
    int buckets = pool.bucket_count;
    for (const auto& models : pool.learners) {
        if (models.empty()) throw ValidationError("model pool has an empty learner list");
        buckets = std::min(buckets, static_cast<int>(models.size()));
    }
    if (buckets < pool.bucket_count)
        std::cerr << "warning: lowering bucket count from " << pool.bucket_count << " to "
                  << buckets << " (smallest learner pool)\n";

    // Per learner: indices sorted by dev LAS (stable, so ties keep original
    // order), then split into contiguous buckets with sizes differing by <=1.
    std::array<std::vector<std::vector<int>>, 3> bucketed;
    for (int l = 0; l < 3; ++l) {
        const auto& models = pool.learners[l];
        std::vector<int> order(models.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return models[static_cast<std::size_t>(a)].dev_las <
                   models[static_cast<std::size_t>(b)].dev_las;
        });
        const auto n = static_cast<int>(models.size());
        const int base = n / buckets;
        const int rem = n % buckets;
        int pos = 0;
        for (int b = 0; b < buckets; ++b) {
            const int size = base + (b < rem ? 1 : 0);
            bucketed[l].emplace_back(order.begin() + pos, order.begin() + pos + size);
            pos += size;
        }
    }

    Rng rng(seed);
    EnsembleEnumeration out;
    out.bucket_count_used = buckets;
    out.triples.reserve(static_cast<std::size_t>(buckets) * buckets * buckets);
    for (int b1 = 0; b1 < buckets; ++b1)
        for (int b2 = 0; b2 < buckets; ++b2)
            for (int b3 = 0; b3 < buckets; ++b3) {
                std::array<int, 3> triple;
                triple[0] = bucketed[0][b1][rng.index(bucketed[0][b1].size())];
                triple[1] = bucketed[1][b2][rng.index(bucketed[1][b2].size())];
                triple[2] = bucketed[2][b3][rng.index(bucketed[2][b3].size())];
                out.triples.push_back(triple);
            }
    return out;
}

DistributionSummary ScoreDistribution::summary() const {
    DistributionSummary s;
    if (samples.empty()) return s;
    const auto n = static_cast<double>(samples.size());
    double sum = 0;
    for (double v : samples) sum += v;
    s.mean = sum / n;
    double ss = 0;
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.sd = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const std::array<double, 5> qs = {0.05, 0.25, 0.50, 0.75, 0.95};
    for (std::size_t i = 0; i < qs.size(); ++i) {
        // Linear interpolation between closest ranks.
        const double pos = qs[i] * (n - 1.0);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        s.percentiles[i] = sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    }
    return s;
}

namespace {

// Draws k distinct indices from [0, n) into prefix positions of `arr`,
// restoring the array afterwards (partial Fisher-Yates with undo).
template <typename Fn>
void with_sample_without_replacement(std::vector<int>& arr, int k, Rng& rng, Fn&& fn) {
    const auto n = static_cast<std::uint64_t>(arr.size());
    std::vector<std::pair<int, int>> swaps;
    swaps.reserve(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        const auto r = static_cast<int>(j + static_cast<int>(rng.below(n - static_cast<std::uint64_t>(j))));
        std::swap(arr[static_cast<std::size_t>(j)], arr[static_cast<std::size_t>(r)]);
        swaps.emplace_back(j, r);
    }
    fn();
    for (auto it = swaps.rbegin(); it != swaps.rend(); ++it)
        std::swap(arr[static_cast<std::size_t>(it->first)], arr[static_cast<std::size_t>(it->second)]);
}

}  // namespace

ScoreDistribution simulate_best_of(const std::vector<double>& scores, int k, long long reps,
                                   std::uint64_t seed, bool with_replacement) {
    if (scores.empty()) throw ValidationError("score pool is empty");
    if (k < 1) throw ValidationError("k must be >= 1");
    if (!with_replacement && k > static_cast<int>(scores.size()))
        throw ValidationError("k exceeds the score pool size");
    if (reps < 1) throw ValidationError("reps must be >= 1");

    Rng rng(seed);
    ScoreDistribution dist;
    dist.samples.reserve(static_cast<std::size_t>(reps));
    if (with_replacement) {
        for (long long r = 0; r < reps; ++r) {
            double best = scores[rng.index(scores.size())];
            for (int j = 1; j < k; ++j) best = std::max(best, scores[rng.index(scores.size())]);
            dist.samples.push_back(best);
        }
        return dist;
    }
    std::vector<int> indices(scores.size());
    std::iota(indices.begin(), indices.end(), 0);
    for (long long r = 0; r < reps; ++r) {
        with_sample_without_replacement(indices, k, rng, [&] {
            double best = scores[static_cast<std::size_t>(indices[0])];
            for (int j = 1; j < k; ++j)
                best = std::max(best, scores[static_cast<std::size_t>(indices[j])]);
            dist.samples.push_back(best);
        });
    }
    return dist;
}

double expected_test_best_of(const std::vector<double>& dev_scores,
                             const std::vector<double>& test_scores, int k, long long reps,
                             std::uint64_t seed, bool with_replacement) {
    if (dev_scores.size() != test_scores.size())
        throw ValidationError("dev and test score lists must be aligned");
    if (dev_scores.empty()) throw ValidationError("score pool is empty");
    if (k < 1) throw ValidationError("k must be >= 1");
    if (!with_replacement && k > static_cast<int>(dev_scores.size()))
        throw ValidationError("k exceeds the score pool size");
    if (reps < 1) throw ValidationError("reps must be >= 1");

    if (k == 1) {
        // A single uniform draw: the expectation is exactly the mean.
        double sum = 0;
        for (double v : test_scores) sum += v;
        return sum / static_cast<double>(test_scores.size());
    }

    Rng rng(seed);
    double total = 0;
    auto best_index = [&](const std::vector<int>& idx) {
        int best = idx[0];
        for (int j = 1; j < k; ++j) {
            const int cand = idx[static_cast<std::size_t>(j)];
            const double cs = dev_scores[static_cast<std::size_t>(cand)];
            const double bs = dev_scores[static_cast<std::size_t>(best)];
            if (cs > bs || (cs == bs && cand < best)) best = cand;
        }
        return best;
    };
    if (with_replacement) {
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (long long r = 0; r < reps; ++r) {
            for (int j = 0; j < k; ++j) idx[static_cast<std::size_t>(j)] = static_cast<int>(rng.index(dev_scores.size()));
            total += test_scores[static_cast<std::size_t>(best_index(idx))];
        }
        return total / static_cast<double>(reps);
    }
    std::vector<int> indices(dev_scores.size());
    std::iota(indices.begin(), indices.end(), 0);
    for (long long r = 0; r < reps; ++r) {
        with_sample_without_replacement(indices, k, rng, [&] {
            total += test_scores[static_cast<std::size_t>(best_index(indices))];
        });
    }
    return total / static_cast<double>(reps);
}

std::vector<HistogramBin> histogram(const std::vector<double>& samples, int bins) {
    if (bins < 1) throw ValidationError("histogram needs at least one bin");
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    if (samples.empty()) return out;
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *mn, hi = *mx;
    const double width = hi > lo ? (hi - lo) / bins : 1.0;
    for (int b = 0; b < bins; ++b) {
        out[static_cast<std::size_t>(b)].lo = lo + b * width;
        out[static_cast<std::size_t>(b)].hi = lo + (b + 1) * width;
    }
    for (double v : samples) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        out[static_cast<std::size_t>(b)].count++;
    }
    return out;
}

}  // namespace ttt
