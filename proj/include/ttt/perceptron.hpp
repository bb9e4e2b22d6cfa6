#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ttt {

// Interns feature strings to dense ids in first-encounter order, which is
// deterministic for a fixed training sequence.
class FeatureMap {
public:
    std::uint32_t get_or_add(std::string_view name);
    // -1 when unseen (prediction-time lookups never extend the map).
    int find(std::string_view name) const;
    std::size_t size() const { return names_.size(); }
    const std::string& name(std::uint32_t id) const { return names_[id]; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
    std::vector<std::string> names_;
};

// Multiclass averaged perceptron with integer weights. Scores, updates and
// the averaged weights are all exact 64-bit integers, so training and
// prediction are bit-reproducible regardless of summation order.
class AveragedPerceptron {
public:
    explicit AveragedPerceptron(int n_actions) : n_actions_(n_actions) {}

    int n_actions() const { return n_actions_; }

    // Adds each active feature's weight row into `scores` (size n_actions).
    void score(const std::vector<std::uint32_t>& feats, std::vector<long long>& scores) const;

    // Standard +1 gold / -1 predicted update with lazy averaging.
    void update(const std::vector<std::uint32_t>& feats, int gold, int predicted);

    void tick() { ++step_; }

    // Folds the averaging accumulators into the weights. Call once after the
    // last epoch; afterwards score() uses the averaged weights.
    void finalize();

    void ensure_rows(std::size_t n_features);

    void save(std::ostream& out) const;
    void load(std::istream& in, std::size_t n_features);

private:
    struct Cell {
        int action = 0;
        long long weight = 0;
        long long accum = 0;
        long long last_step = 0;
    };
    std::vector<std::vector<Cell>> rows_;
    int n_actions_;
    long long step_ = 1;

    Cell& cell(std::uint32_t feature, int action);
};

}  // namespace ttt
