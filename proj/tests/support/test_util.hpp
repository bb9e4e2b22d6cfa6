#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ttt/conllu.hpp"
#include "ttt/rng.hpp"

namespace ttt::testutil {

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned long> counter{0};
        path_ = (std::filesystem::temp_directory_path() /
                 ("ttt-" + tag + "-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter.fetch_add(1))))
                    .string();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

// Random valid single-root tree (not necessarily projective): a root token
// is drawn, then every other token attaches to an already-attached node.
inline Sentence random_tree(Rng& rng, int n, const std::vector<std::string>& labels) {
    Sentence s;
    for (int i = 1; i <= n; ++i) {
        Token t;
        t.id = i;
        t.form = "w" + std::to_string(i);
        t.upos = "X";
        s.tokens.push_back(std::move(t));
    }
    const int root = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    s.tokens[static_cast<std::size_t>(root) - 1].head = 0;
    s.tokens[static_cast<std::size_t>(root) - 1].deprel = "root";
    std::vector<int> attached = {root};
    std::vector<std::size_t> order = rng.permutation(static_cast<std::size_t>(n));
    for (std::size_t idx : order) {
        const int tok = static_cast<int>(idx) + 1;
        if (tok == root) continue;
        const int parent = attached[rng.index(attached.size())];
        s.tokens[idx].head = parent;
        s.tokens[idx].deprel = labels[rng.index(labels.size())];
        attached.push_back(tok);
    }
    return s;
}

// Brute-force projectivity: no two arcs (root arcs included) may cross.
inline bool crossing_free(const Sentence& s) {
    struct Arc {
        int lo, hi;
    };
    std::vector<Arc> arcs;
    for (const Token& t : s.tokens)
        arcs.push_back({std::min(t.head, t.id), std::max(t.head, t.id)});
    for (std::size_t a = 0; a < arcs.size(); ++a)
        for (std::size_t b = a + 1; b < arcs.size(); ++b) {
            const Arc &x = arcs[a], &y = arcs[b];
            if ((x.lo < y.lo && y.lo < x.hi && x.hi < y.hi) ||
                (y.lo < x.lo && x.lo < y.hi && y.hi < x.hi))
                return false;
        }
    return true;
}

inline std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v != nullptr ? std::string(v) : fallback;
}

// Runs a command line, returns its exit status (-1 on spawn failure).
int run_command(const std::string& command, const std::string& capture_path = "");

}  // namespace ttt::testutil
