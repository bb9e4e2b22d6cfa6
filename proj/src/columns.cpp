#include "ttt/columns.hpp"

#include <array>

#include "ttt/error.hpp"

namespace ttt {

namespace {
constexpr std::array<const char*, 6> kNames = {"lemma", "upos", "xpos",
                                               "feats", "head", "deprel"};
}

const char* column_name(Column c) { return kNames[static_cast<std::size_t>(c)]; }

ColumnSet parse_columns(const std::string& list) {
    ColumnSet set;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t comma = list.find(',', start);
        if (comma == std::string::npos) comma = list.size();
        std::string name = list.substr(start, comma - start);
        if (!name.empty()) {
            bool known = false;
            for (std::size_t i = 0; i < kNames.size(); ++i)
                if (name == kNames[i]) {
                    set.insert(static_cast<Column>(i));
                    known = true;
                    break;
                }
            if (!known) throw ValidationError("unknown column name '" + name + "'");
        }
        start = comma + 1;
    }
    return set;
}

std::string columns_to_string(ColumnSet set) {
    std::string out;
    for (Column c : columns_in_order(set)) {
        if (!out.empty()) out += ',';
        out += column_name(c);
    }
    return out;
}

std::vector<Column> columns_in_order(ColumnSet set) {
    std::vector<Column> out;
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (set.contains(static_cast<Column>(i))) out.push_back(static_cast<Column>(i));
    return out;
}

}  // namespace ttt
