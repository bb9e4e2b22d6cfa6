#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ttt {

// The CoNLL-U annotation columns a learner can predict and the agreement
// test can compare.
enum class Column : std::uint8_t { lemma = 0, upos, xpos, feats, head, deprel };

struct ColumnSet {
    std::uint8_t bits = 0;

    static ColumnSet of(std::initializer_list<Column> cols) {
        ColumnSet s;
        for (Column c : cols) s.insert(c);
        return s;
    }
    static ColumnSet all() {
        return of({Column::lemma, Column::upos, Column::xpos, Column::feats, Column::head,
                   Column::deprel});
    }

    void insert(Column c) { bits |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(c)); }
    bool contains(Column c) const {
        return bits & static_cast<std::uint8_t>(1u << static_cast<unsigned>(c));
    }
    bool contains_all(ColumnSet other) const { return (bits & other.bits) == other.bits; }
    bool empty() const { return bits == 0; }

    bool operator==(const ColumnSet&) const = default;
};

const char* column_name(Column c);

// Comma-separated list, e.g. "upos,head,deprel". Unknown names raise
// ValidationError.
ColumnSet parse_columns(const std::string& list);
std::string columns_to_string(ColumnSet set);
std::vector<Column> columns_in_order(ColumnSet set);

}  // namespace ttt
