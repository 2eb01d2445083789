#include "horseshoe/cones.hpp"

#include <cmath>
#include <stdexcept>

namespace horseshoe {

namespace {

constexpr int kTubeCap = 400;
constexpr int kForwardSearchCap = 25;

bool on_critical_orbit(const CriticalFrame& f, const Vec2& pt) {
    auto orbit = f.critical_orbit(60, 60);
    for (const auto& op : orbit) {
        double scale = std::max({1.0, std::abs(op.pos.x), std::abs(op.pos.y)});
        if ((pt - op.pos).norm_inf() <= 1e-13 * scale) return true;
    }
    return false;
}

double rate_at(const CriticalFrame& f, const Vec2& pt) {
    auto row = f.base().row_of_y(pt.y);
    return row ? f.base().branch(*row).rate() : f.params().sigma;
}

}  // namespace

int tube_n_minus(const ParamSet& p, double x) {
    if (x <= 0.0) return -1;
    if (x > p.d * p.lambda) return 0;
    return static_cast<int>(std::floor(std::log(p.d / x) / std::log(1.0 / p.lambda)));
}

int tube_n_plus(const CriticalFrame& f, double x, double y) {
    const ParamSet& p = f.params();
    double w = std::abs(p.b * x + p.c * y * (y * y + x));
    if (w == 0.0) return -1;
    double R = 1.0;
    int k = 0;
    while (k < kTubeCap) {
        double rate = symbol_rate(p, itinerary_symbol(p.itinerary, k));
        if (R * rate * w > p.d) break;
        R *= rate;
        ++k;
    }
    return k;
}

TubeContext tube_context(const CriticalFrame& f, const Vec2& pt) {
    TubeContext ctx;
    if (f.crit_rect().contains(pt)) {
        ctx.phase = TubePhase::AtCritical;
        ctx.anchor_offsets = {pt.x, pt.y - f.params().xi2};
        ctx.n_minus = tube_n_minus(f.params(), pt.x);
        ctx.n_plus = tube_n_plus(f, ctx.anchor_offsets.x, ctx.anchor_offsets.y);
        return ctx;
    }
    // Post-critical: pt = F^j(M) for an M in the critical rectangle, j <= n_plus(M).
    {
        Vec2 z = pt;
        for (int j = 1; j <= kTubeCap; ++j) {
            auto prev = f.inverse(z);
            if (escaped(prev)) break;
            z = as_pt(prev);
            if (f.crit_rect().contains(z)) {
                Vec2 off{z.x, z.y - f.params().xi2};
                int np = tube_n_plus(f, off.x, off.y);
                if (np < 0 || j <= np) {
                    ctx.phase = TubePhase::PostCritical;
                    ctx.offset = j;
                    ctx.anchor_offsets = off;
                    ctx.n_minus = tube_n_minus(f.params(), off.x);
                    ctx.n_plus = np;
                    return ctx;
                }
                break;
            }
            if (!Box{{0.0, 1.0}, {0.0, 1.0}}.contains(z)) break;
        }
    }
    // Pre-critical: F^j(pt) in the critical rectangle with j <= n_minus there.
    {
        Vec2 z = pt;
        for (int j = 1; j <= kForwardSearchCap; ++j) {
            auto next = f.apply(z);
            if (escaped(next)) break;
            z = as_pt(next);
            if (!Box{{0.0, 1.0}, {0.0, 1.0}}.contains(z)) break;
            if (f.crit_rect().contains(z)) {
                Vec2 off{z.x, z.y - f.params().xi2};
                int nm = tube_n_minus(f.params(), off.x);
                if (nm < 0 || j <= nm) {
                    ctx.phase = TubePhase::PreCritical;
                    ctx.offset = j;
                    ctx.anchor_offsets = off;
                    ctx.n_minus = nm;
                    ctx.n_plus = tube_n_plus(f, off.x, off.y);
                    return ctx;
                }
                break;
            }
        }
    }
    ctx.phase = TubePhase::Free;
    return ctx;
}

double free_cone_slope(const ParamSet& p) {
    return p.A * p.d / (3.0 * p.c * p.beta_max);
}

Cone unstable_cone(const CriticalFrame& f, const Vec2& pt, const TubeContext& ctx,
                   double theta) {
    const ParamSet& p = f.params();
    if (on_critical_orbit(f, pt)) throw std::domain_error("cone undefined on the critical orbit");
    Cone cone;
    const double s_free = free_cone_slope(p);
    switch (ctx.phase) {
        case TubePhase::Free:
            cone.slope = s_free;
            return cone;
        case TubePhase::AtCritical: {
            if (ctx.n_minus < 0) {
                cone.vertical_line = true;
                return cone;
            }
            cone.slope = std::pow(p.sigma / p.lambda, ctx.n_minus) * s_free;
            return cone;
        }
        case TubePhase::PostCritical: {
            double x = ctx.anchor_offsets.x, y = ctx.anchor_offsets.y;
            double s = p.A * (3.0 * y * y + x + theta);
            // Push through the j-1 affine steps after F(anchor).
            Vec2 z = f.f_xi() + Vec2{-p.eps1 * y,
                                     p.b * x - p.c * y * (y * y + x + theta)};
            for (int i = 1; i < ctx.offset; ++i) {
                s *= rate_at(f, z) / p.lambda;
                auto next = f.apply(z, theta);
                if (escaped(next)) break;
                z = as_pt(next);
            }
            cone.slope = s;
            return cone;
        }
        case TubePhase::PreCritical: {
            double base = ctx.n_minus < 0
                              ? kInf
                              : std::pow(p.sigma / p.lambda, ctx.n_minus) * s_free;
            if (ctx.n_minus < 0) {
                cone.vertical_line = true;
                return cone;
            }
            // Pull back through the offset steps along the actual path.
            Vec2 z = pt;
            double s = base;
            for (int i = 0; i < ctx.offset; ++i) {
                s /= rate_at(f, z) / p.lambda;
                auto next = f.apply(z, theta);
                if (escaped(next)) break;
                z = as_pt(next);
            }
            cone.slope = s;
            return cone;
        }
    }
    return cone;
}

Cone stable_cone(const CriticalFrame& f, const Vec2& pt, const TubeContext& ctx,
                 double theta) {
    Cone c = unstable_cone(f, pt, ctx, theta);
    c.unstable = false;
    return c;
}

namespace {

double inside_unstable_margin(const Vec2& w, const Cone& req) {
    double ay = std::abs(w.y), ax = std::abs(w.x);
    if (req.vertical_line) return (0.0 - ax) / std::max(ax + ay, 1e-300);
    double num = ay - req.slope * ax;
    double den = ay + req.slope * ax;
    return num / std::max(den, 1e-300);
}

double inside_stable_margin(const Vec2& w, const Cone& req) {
    double ay = std::abs(w.y), ax = std::abs(w.x);
    if (req.vertical_line) return (ax - 0.0) / std::max(ax + ay, 1e-300);
    double num = req.slope * ax - ay;
    double den = req.slope * ax + ay;
    return num / std::max(den, 1e-300);
}

std::vector<Vec2> cone_boundary(const Cone& c) {
    if (c.vertical_line) return {{0.0, 1.0}};
    return {{1.0, c.slope}, {1.0, -c.slope}};
}

}  // namespace

double check_unstable_invariance(const CriticalFrame& f, const Vec2& pt, double theta) {
    TubeContext ctx = tube_context(f, pt);
    Cone cone = unstable_cone(f, pt, ctx, theta);
    auto img = f.apply(pt, theta);
    if (escaped(img)) throw std::domain_error("image escaped");
    Vec2 q = as_pt(img);
    TubeContext ctx2 = tube_context(f, q);
    Cone req = unstable_cone(f, q, ctx2, theta);
    auto J = f.jacobian(pt, theta);
    double m = 1.0;
    for (const Vec2& v : cone_boundary(cone)) {
        Vec2 w{J[0][0] * v.x + J[0][1] * v.y, J[1][0] * v.x + J[1][1] * v.y};
        m = std::min(m, inside_unstable_margin(w, req));
    }
    return m;
}

double check_stable_invariance(const CriticalFrame& f, const Vec2& pt, double theta) {
    TubeContext ctx = tube_context(f, pt);
    Cone cone = stable_cone(f, pt, ctx, theta);
    auto pre = f.inverse(pt, theta);
    if (escaped(pre)) throw std::domain_error("preimage escaped");
    Vec2 q = as_pt(pre);
    TubeContext ctx2 = tube_context(f, q);
    Cone req = stable_cone(f, q, ctx2, theta);
    auto J = f.jacobian(q, theta);
    double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0.0) throw std::domain_error("singular derivative");
    double m = 1.0;
    for (const Vec2& v : cone_boundary(cone)) {
        // w = DF^{-1} v at the preimage.
        Vec2 w{(v.x * J[1][1] - v.y * J[0][1]) / det,
               (v.y * J[0][0] - v.x * J[1][0]) / det};
        m = std::min(m, inside_stable_margin(w, req));
    }
    return m;
}

}  // namespace horseshoe
