#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace horseshoe {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm_inf() const { return std::max(std::abs(x), std::abs(y)); }
    double norm2() const { return std::hypot(x, y); }
};

inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << "(" << v.x << ", " << v.y << ")";
}

// Closed interval [lo, hi]; empty when lo > hi.
struct Interval {
    double lo = 1.0;
    double hi = 0.0;

    static Interval of(double a, double b) { return a <= b ? Interval{a, b} : Interval{b, a}; }
    static Interval empty() { return Interval{1.0, 0.0}; }
    static Interval point(double a) { return {a, a}; }

    bool is_empty() const { return lo > hi; }
    double len() const { return is_empty() ? 0.0 : hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
    bool contains(double v) const { return v >= lo && v <= hi; }
    bool contains(const Interval& o) const { return !o.is_empty() && o.lo >= lo && o.hi <= hi; }
    bool intersects(const Interval& o) const {
        return !is_empty() && !o.is_empty() && lo <= o.hi && o.lo <= hi;
    }
    Interval intersect(const Interval& o) const {
        if (!intersects(o)) return empty();
        return {std::max(lo, o.lo), std::min(hi, o.hi)};
    }
    Interval hull(const Interval& o) const {
        if (is_empty()) return o;
        if (o.is_empty()) return *this;
        return {std::min(lo, o.lo), std::max(hi, o.hi)};
    }
    Interval pad(double e) const { return is_empty() ? *this : Interval{lo - e, hi + e}; }
    // Image under the affine map t -> a*t + b (a may be negative).
    Interval affine(double a, double b) const {
        if (is_empty()) return empty();
        return of(a * lo + b, a * hi + b);
    }
    // Distance from v to the nearest endpoint, negative when v is outside.
    double margin_of(double v) const { return std::min(v - lo, hi - v); }
};

struct Box {
    Interval x;
    Interval y;

    bool is_empty() const { return x.is_empty() || y.is_empty(); }
    bool contains(const Vec2& p) const { return x.contains(p.x) && y.contains(p.y); }
    bool contains(const Box& b) const { return x.contains(b.x) && y.contains(b.y); }
    bool intersects(const Box& b) const { return x.intersects(b.x) && y.intersects(b.y); }
    Box intersect(const Box& b) const { return {x.intersect(b.x), y.intersect(b.y)}; }
    Box hull(const Box& b) const { return {x.hull(b.x), y.hull(b.y)}; }
    Vec2 center() const { return {x.center(), y.center()}; }
    double diam_inf() const { return std::max(x.len(), y.len()); }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Quintic smoothstep on [0,1]: s(0)=0, s(1)=1, s'=s''=0 at both ends.
inline double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

}  // namespace horseshoe
