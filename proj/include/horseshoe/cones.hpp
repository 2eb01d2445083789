#pragma once

#include "horseshoe/critmap.hpp"

namespace horseshoe {

enum class TubePhase { Free, PreCritical, AtCritical, PostCritical };

struct TubeContext {
    TubePhase phase = TubePhase::Free;
    // Tube extents at the anchoring critical-rectangle point. -1 encodes
    // "infinite" (x = 0, resp. vanishing vertical drift).
    int n_minus = 0;
    int n_plus = 0;
    int offset = 0;          // steps from the anchor (backward for pre, forward for post)
    Vec2 anchor_offsets{};   // (x, y) offsets of the anchor inside the critical rectangle
};

struct Cone {
    bool vertical_line = false;  // degenerate unstable cone at x = 0
    double slope = 0.0;          // |v_y| >= slope * |v_x| for unstable cones
    bool unstable = true;        // stable cones are the closed complement
};

// n_minus = sup{k : x <= d lambda^k} and n_plus = sup{k : R_k |bx + cy(y^2+x)| <= d}
// for a point of the critical rectangle given by offsets (x, y).
int tube_n_minus(const ParamSet& p, double x);
int tube_n_plus(const CriticalFrame& f, double x, double y);

TubeContext tube_context(const CriticalFrame& f, const Vec2& pt);

// Slope A d / (3 c beta_max) of the cone field away from every tube.
double free_cone_slope(const ParamSet& p);

Cone unstable_cone(const CriticalFrame& f, const Vec2& pt, const TubeContext& ctx,
                   double theta = 0.0);
Cone stable_cone(const CriticalFrame& f, const Vec2& pt, const TubeContext& ctx,
                 double theta = 0.0);

// Scale-free containment margin in (-1, 1): positive iff the image of every
// cone boundary vector lies strictly inside the image point's cone.
double check_unstable_invariance(const CriticalFrame& f, const Vec2& pt, double theta = 0.0);
// Same contract backward: DF^{-1}(C^s(M)) inside C^s(F^{-1}(M)).
double check_stable_invariance(const CriticalFrame& f, const Vec2& pt, double theta = 0.0);

}  // namespace horseshoe
