#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace horseshoe {

// Transition structure of the nine-rectangle scheme. Rectangles are numbered
// 1..9 row-major from the top-left; row 1 is the top row.
inline int rect_row(int id) { return (id - 1) / 3 + 1; }
inline int rect_col(int id) { return (id - 1) % 3 + 1; }
// Each horizontal stripe maps onto one column strip: top->3, middle->2, bottom->1.
inline int target_col(int row) { return 4 - row; }
inline bool admissible_pair(int i, int j) { return rect_col(j) == target_col(rect_row(i)); }

// A finite window of an itinerary over symbols 1..9. Symbols are stored in
// time order; time t ranges over [-back, +fwd] with the current symbol at t=0.
struct SymbolWord {
    std::vector<int> s;
    int back = 0;

    SymbolWord() = default;
    SymbolWord(std::vector<int> syms, int n_back) : s(std::move(syms)), back(n_back) {
        if (back < 0 || back >= static_cast<int>(s.size()) + (s.empty() ? 0 : 1))
            throw std::invalid_argument("SymbolWord: bad split index");
    }

    int size() const { return static_cast<int>(s.size()); }
    int fwd() const { return size() - back - 1; }
    int sym(int t) const { return s.at(static_cast<size_t>(back + t)); }
    bool has(int t) const { return back + t >= 0 && back + t < size(); }

    bool admissible() const {
        for (int i = 0; i + 1 < size(); ++i)
            if (!admissible_pair(s[i], s[i + 1])) return false;
        for (int v : s)
            if (v < 1 || v > 9) return false;
        return true;
    }

    // Digit string with a '.' preceding the current symbol, e.g. "777.4816".
    std::string str() const {
        std::string out;
        out.reserve(static_cast<size_t>(size()) + 1);
        for (int i = 0; i < size(); ++i) {
            if (i == back) out.push_back('.');
            out.push_back(static_cast<char>('0' + s[static_cast<size_t>(i)]));
        }
        return out;
    }

    static SymbolWord parse(const std::string& text) {
        std::vector<int> syms;
        int nb = -1;
        for (char c : text) {
            if (c == '.') {
                if (nb >= 0) throw std::invalid_argument("SymbolWord: two dots");
                nb = static_cast<int>(syms.size());
                continue;
            }
            if (c < '1' || c > '9') throw std::invalid_argument("SymbolWord: bad digit");
            syms.push_back(c - '0');
        }
        if (nb < 0) nb = 0;
        return SymbolWord(std::move(syms), nb);
    }

    // Window restricted to times [t0, t1].
    SymbolWord window(int t0, int t1) const {
        std::vector<int> out;
        for (int t = t0; t <= t1; ++t) out.push_back(sym(t));
        return SymbolWord(std::move(out), -t0);
    }
};

}  // namespace horseshoe
