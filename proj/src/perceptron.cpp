#include "ttt/perceptron.hpp"

#include <istream>
#include <ostream>

#include "ttt/error.hpp"

namespace ttt {

std::uint32_t FeatureMap::get_or_add(std::string_view name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
}

int FeatureMap::find(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : static_cast<int>(it->second);
}

void AveragedPerceptron::ensure_rows(std::size_t n_features) {
    if (rows_.size() < n_features) rows_.resize(n_features);
}

void AveragedPerceptron::score(const std::vector<std::uint32_t>& feats,
                               std::vector<long long>& scores) const {
    scores.assign(static_cast<std::size_t>(n_actions_), 0);
    for (std::uint32_t f : feats) {
        if (f >= rows_.size()) continue;
        for (const Cell& c : rows_[f]) scores[c.action] += c.weight;
    }
}

AveragedPerceptron::Cell& AveragedPerceptron::cell(std::uint32_t feature, int action) {
    ensure_rows(feature + 1);
    for (Cell& c : rows_[feature])
        if (c.action == action) return c;
    rows_[feature].push_back(Cell{action, 0, 0, 0});
    return rows_[feature].back();
}

void AveragedPerceptron::update(const std::vector<std::uint32_t>& feats, int gold, int predicted) {
    if (gold == predicted) return;
    for (std::uint32_t f : feats) {
        Cell& g = cell(f, gold);
        g.accum += g.weight * (step_ - g.last_step);
        g.weight += 1;
        g.last_step = step_;
        Cell& p = cell(f, predicted);
        p.accum += p.weight * (step_ - p.last_step);
        p.weight -= 1;
        p.last_step = step_;
    }
}

void AveragedPerceptron::finalize() {
    for (auto& row : rows_)
        for (Cell& c : row) {
            c.accum += c.weight * (step_ - c.last_step);
            c.weight = c.accum;
            c.last_step = step_;
        }
}

void AveragedPerceptron::save(std::ostream& out) const {
    long long n_cells = 0;
    for (const auto& row : rows_)
        for (const Cell& c : row)
            if (c.weight != 0) ++n_cells;
    out << "cells " << n_cells << "\n";
    for (std::size_t f = 0; f < rows_.size(); ++f)
        for (const Cell& c : rows_[f])
            if (c.weight != 0) out << f << ' ' << c.action << ' ' << c.weight << "\n";
}

void AveragedPerceptron::load(std::istream& in, std::size_t n_features) {
    std::string tag;
    long long n_cells = 0;
    if (!(in >> tag >> n_cells) || tag != "cells")
        throw DataError("corrupt model: missing weight cell header");
    rows_.assign(n_features, {});
    for (long long i = 0; i < n_cells; ++i) {
        std::uint64_t f;
        int action;
        long long w;
        if (!(in >> f >> action >> w) || f >= n_features || action < 0 || action >= n_actions_)
            throw DataError("corrupt model: bad weight cell");
        rows_[f].push_back(Cell{action, w, 0, 0});
    }
}

}  // namespace ttt
