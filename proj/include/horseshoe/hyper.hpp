#pragma once

#include "horseshoe/cones.hpp"
#include "horseshoe/symbolic.hpp"

namespace horseshoe {

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Vec2 mat_apply(const Mat2& m, const Vec2& v) {
    return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
}

struct GrowthRecord {
    int m1 = 0, m2 = 0;                 // orbit window [m1, m2]
    std::vector<double> factors;        // per-step sup-norm growth of the tracked vector
    bool complete = false;
    double log_total() const {
        double s = 0.0;
        for (double f : factors) s += std::log(f);
        return s;
    }
};

struct DirectionEstimate {
    Vec2 dir{0.0, 1.0};
    double residual = 0.0;  // angle change under one more refinement block
    int depth = 0;
};

// A critical tube harvested from a decoded orbit: times t in
// [center - n, center + m] with F^{t}(word origin) the orbit points.
struct TubeSegment {
    int center = 0;  // time of the critical-rectangle visit
    int n = 0;       // entry length n_minus
    int m = 0;       // exit length n_plus
};

std::vector<TubeSegment> harvest_tubes(const CriticalFrame& f, const DecodedOrbit& orbit);

// Lemma-style expansion certificate over one tube: sup-norm growth of v from
// F^{-n}(M) to F^{m+1}... i.e. across n+1+m derivative steps, compared against
// rho^{(n+1+m)/5}. Exact inequality, no tolerance.
bool tube_expansion_check(const CriticalFrame& f, const DecodedOrbit& orbit,
                          const TubeSegment& tube, const Vec2& v);

// Whether the window [t0, t0+n] of the orbit contains a whole number of tubes.
bool window_complete(const CriticalFrame& f, const DecodedOrbit& orbit, int t0, int n);

// Growth factor of v over a complete window; throws if the window is incomplete.
double complete_piece_growth(const CriticalFrame& f, const DecodedOrbit& orbit, int t0,
                             int n, const Vec2& v);

// Finite-time unstable exponent along a decoded word orbit (vector renormalized
// each step, started in the unstable cone).
double lyapunov_unstable(const CriticalFrame& f, const DecodedOrbit& orbit, int t0,
                         int n_steps, double theta = 0.0, Vec2 v0 = {0.0, 1.0});
// Same along an explicitly iterated point orbit (exact fixed/periodic points).
double lyapunov_unstable_pointwise(const CriticalFrame& f, const Vec2& start, int n_steps,
                                   double theta = 0.0, Vec2 v0 = {0.0, 1.0});

// Unstable direction by pushing the cone frame along the backward orbit
// points orbit[t0-depth .. t0]; stable by pulling along the forward orbit.
DirectionEstimate unstable_direction(const CriticalFrame& f, const std::vector<Vec2>& pts,
                                     double theta = 0.0);
DirectionEstimate stable_direction(const CriticalFrame& f, const std::vector<Vec2>& pts,
                                   double theta = 0.0);

struct DoublingResult {
    bool ok = false;
    int N = 0;
    Vec2 witness{};
};

// Smallest N <= cap such that every sampled point's cone boundary vectors
// double in sup-norm within N steps of DF_theta. theta = 0 reports the
// failure witness near the critical value.
DoublingResult uniform_doubling_time(const CriticalFrame& f, double theta,
                                     const std::vector<DecodedOrbit>& samples);

int doubling_cap(const ParamSet& p, double theta);

}  // namespace horseshoe
