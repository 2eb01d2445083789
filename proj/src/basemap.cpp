#include "horseshoe/basemap.hpp"

#include <cmath>

namespace horseshoe {

int itinerary_symbol(ItineraryKind kind, int j) {
    static const int periodic[3] = {8, 1, 6};
    if (kind == ItineraryKind::Periodic816) return periodic[j % 3];
    // Aperiodic chaining of the admissible blocks (8,1,6) and (8,1,3,6),
    // driven by the binary digits of sqrt(2)-1. Avoids 4 and 7, hits {5,6}
    // and {1,2,3} once per block.
    static const int b0[3] = {8, 1, 6};
    static const int b1[4] = {8, 1, 3, 6};
    double frac = std::sqrt(2.0) - 1.0;
    int pos = 0;
    for (int block = 0;; ++block) {
        frac *= 2.0;
        bool bit = frac >= 1.0;
        if (bit) frac -= 1.0;
        int len = bit ? 4 : 3;
        if (j < pos + len) return bit ? b1[j - pos] : b0[j - pos];
        pos += len;
        if (block > j + 4) break; // unreachable
    }
    return 6;
}

BaseMap::BaseMap(const ParamSet& p) : p_(p) {
    const double l0 = p.l0, d = p.d, lam = p.lambda, sig = p.sigma, rho = p.rho;
    // Row 1 (top): fixes (1,1); expansion rho.
    branches_[0] = Branch{1, target_col(1), lam, 1.0 - lam, rho, 1.0 - rho};
    // Row 2 (middle): reverses horizontal orientation, right edge of the image
    // strip at 2*l0+d; vertical centered on 1/2; expansion sigma.
    branches_[1] = Branch{2, target_col(2), -lam, 2.0 * l0 + d, sig, 0.5 * (1.0 - sig)};
    // Row 3 (bottom): fixes (0,0); expansion sigma.
    branches_[2] = Branch{3, target_col(3), lam, 0.0, sig, 0.0};
}

Interval BaseMap::row_iv(int row) const {
    const double l0 = p_.l0, d = p_.d;
    switch (row) {
        case 1: return {1.0 - l0, 1.0};
        case 2: return {l0 + d, 2.0 * l0 + d};
        case 3: return {0.0, l0};
        default: return Interval::empty();
    }
}

Interval BaseMap::col_iv(int col) const {
    const double l0 = p_.l0, d = p_.d;
    switch (col) {
        case 1: return {0.0, l0};
        case 2: return {l0 + d, 2.0 * l0 + d};
        case 3: return {1.0 - l0, 1.0};
        default: return Interval::empty();
    }
}

std::optional<int> BaseMap::row_of_y(double y) const {
    for (int r = 1; r <= 3; ++r)
        if (row_iv(r).contains(y)) return r;
    return std::nullopt;
}

std::optional<int> BaseMap::col_of_x(double x) const {
    for (int c = 1; c <= 3; ++c)
        if (col_iv(c).contains(x)) return c;
    return std::nullopt;
}

PointOrEscaped BaseMap::apply(const Vec2& p) const {
    auto row = row_of_y(p.y);
    if (!row) return Escaped{};
    return branch(*row).apply(p);
}

PointOrEscaped BaseMap::inverse(const Vec2& p) const {
    auto col = col_of_x(p.x);
    if (!col) return Escaped{};
    // Each column strip is the image of exactly one stripe.
    for (int r = 1; r <= 3; ++r) {
        const Branch& br = branch(r);
        if (br.target_strip != *col) continue;
        Vec2 q = br.inverse(p);
        if (!row_iv(r).contains(q.y)) return Escaped{};
        return q;
    }
    return Escaped{};
}

std::optional<int> BaseMap::rectangle_of(const Vec2& p) const {
    auto row = row_of_y(p.y);
    auto col = col_of_x(p.x);
    if (!row || !col) return std::nullopt;
    return (*row - 1) * 3 + *col;
}

static Interval pre_y(const Branch& br, const Interval& img) {
    return img.affine(1.0 / br.ay, -br.by / br.ay);
}

GenRectangle BaseMap::gen_rectangle(const SymbolWord& w) const {
    GenRectangle out;
    out.word = w;
    if (!w.admissible()) return out;
    // Vertical: pull the last cell's row back through the forward rates.
    Interval J = row_iv(rect_row(w.sym(w.fwd())));
    for (int t = w.fwd() - 1; t >= 0; --t) {
        const Branch& br = branch(rect_row(w.sym(t)));
        J = row_iv(br.source_row).intersect(pre_y(br, J));
        if (J.is_empty()) return out;
    }
    // Horizontal: push the earliest cell's column forward.
    Interval I = col_iv(rect_col(w.sym(-w.back)));
    for (int t = -w.back; t < 0; ++t) {
        const Branch& br = branch(rect_row(w.sym(t)));
        I = I.affine(br.ax, br.bx).intersect(col_iv(rect_col(w.sym(t + 1))));
        if (I.is_empty()) return out;
    }
    out.box = {I, J};
    out.empty = false;
    return out;
}

GenRectangle BaseMap::survival_rectangle(const SymbolWord& w) const {
    GenRectangle out;
    out.word = w;
    if (!w.admissible()) return out;
    std::vector<int> fwd_syms;
    for (int t = 0; t <= w.fwd(); ++t) fwd_syms.push_back(w.sym(t));
    Interval J = forward_band(fwd_syms, w.fwd());
    std::vector<int> past;
    for (int t = -w.back; t <= -1; ++t) past.push_back(w.sym(t));
    Interval I = backward_strip(past);
    out.box = {I, J};
    out.empty = out.box.is_empty();
    return out;
}

Interval BaseMap::forward_band(const std::vector<int>& symbols, int k) const {
    Interval J{0.0, 1.0};
    for (int t = k - 1; t >= 0; --t) {
        const Branch& br = branch(rect_row(symbols.at(static_cast<size_t>(t))));
        J = row_iv(br.source_row).intersect(pre_y(br, J));
        if (J.is_empty()) break;
    }
    return J;
}

Interval BaseMap::backward_strip(const std::vector<int>& past) const {
    Interval I{0.0, 1.0};
    for (int sym : past) {
        const Branch& br = branch(rect_row(sym));
        I = I.affine(br.ax, br.bx);
    }
    return I;
}

std::array<std::array<int, 9>, 9> BaseMap::transition_matrix() {
    std::array<std::array<int, 9>, 9> A{};
    for (int i = 1; i <= 9; ++i)
        for (int j = 1; j <= 9; ++j) A[i - 1][j - 1] = admissible_pair(i, j) ? 1 : 0;
    return A;
}

std::array<int, 3> BaseMap::successors(int id) {
    int col = target_col(rect_row(id));
    return {col, 3 + col, 6 + col};
}

std::array<int, 3> BaseMap::predecessors(int id) {
    // Predecessors of j form the full stripe whose target column is col(j).
    int row = 4 - rect_col(id);
    return {(row - 1) * 3 + 1, (row - 1) * 3 + 2, (row - 1) * 3 + 3};
}

}  // namespace horseshoe
