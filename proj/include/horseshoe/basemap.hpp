#pragma once

#include <array>
#include <optional>
#include <variant>

#include "horseshoe/geometry.hpp"
#include "horseshoe/params.hpp"
#include "horseshoe/words.hpp"

namespace horseshoe {

// Result of applying the map to a point that leaves the domain.
struct Escaped {};
using PointOrEscaped = std::variant<Vec2, Escaped>;

inline bool escaped(const PointOrEscaped& r) { return std::holds_alternative<Escaped>(r); }
inline const Vec2& as_pt(const PointOrEscaped& r) { return std::get<Vec2>(r); }

// One affine branch of the unperturbed horseshoe: x' = ax*x + bx, y' = ay*y + by.
struct Branch {
    int source_row = 0;   // 1 top, 2 middle, 3 bottom
    int target_strip = 0; // column index of the image strip
    double ax = 0.0, bx = 0.0;
    double ay = 0.0, by = 0.0;
    double rate() const { return std::abs(ay); }
    Vec2 apply(const Vec2& p) const { return {ax * p.x + bx, ay * p.y + by}; }
    Vec2 inverse(const Vec2& p) const { return {(p.x - bx) / ax, (p.y - by) / ay}; }
};

struct GenRectangle {
    SymbolWord word;
    Box box;
    bool empty = true;
};

// The unperturbed piecewise-affine horseshoe F0 on the 3x3 grid.
class BaseMap {
  public:
    explicit BaseMap(const ParamSet& p);

    const ParamSet& params() const { return p_; }
    const Branch& branch(int row) const { return branches_[static_cast<size_t>(row - 1)]; }

    Interval row_iv(int row) const;    // vertical extent of a grid row (1=top)
    Interval col_iv(int col) const;    // horizontal extent of a grid column
    Interval cell_x(int id) const { return col_iv(rect_col(id)); }
    Interval cell_y(int id) const { return row_iv(rect_row(id)); }
    Box cell(int id) const { return {cell_x(id), cell_y(id)}; }

    std::optional<int> row_of_y(double y) const;
    std::optional<int> col_of_x(double x) const;

    PointOrEscaped apply(const Vec2& p) const;
    PointOrEscaped inverse(const Vec2& p) const;
    std::optional<int> rectangle_of(const Vec2& p) const;

    double rate_of_symbol(int id) const { return branch(rect_row(id)).rate(); }

    // Exact bounding box of the set of points sharing the word's itinerary,
    // cell-based: every symbol constrains the full grid cell. Horizontal size
    // lambda^back * l0, vertical size l0 * prod(rates of the first fwd symbols)^-1.
    GenRectangle gen_rectangle(const SymbolWord& w) const;

    // Generation rectangle in the survival sense: backward/forward iterates only
    // need to stay in the square, so the deepest constraints are the full square.
    // Matches the stripes H^k / bands V^n used by the critical-frame conditions.
    GenRectangle survival_rectangle(const SymbolWord& w) const;

    // Vertical interval of the depth-k forward survival stripe of an itinerary
    // (rows of symbols at positions 0..k-1, then the full square).
    Interval forward_band(const std::vector<int>& symbols, int k) const;
    // Horizontal interval of the depth-n backward survival strip of the past
    // (symbols at positions -n..-1, earliest first).
    Interval backward_strip(const std::vector<int>& past) const;

    static std::array<std::array<int, 9>, 9> transition_matrix();
    static std::array<int, 3> successors(int id);
    static std::array<int, 3> predecessors(int id);

  private:
    ParamSet p_;
    std::array<Branch, 3> branches_;
};

}  // namespace horseshoe
