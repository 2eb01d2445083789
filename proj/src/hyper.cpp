#include "horseshoe/hyper.hpp"

#include <cmath>
#include <stdexcept>

namespace horseshoe {

std::vector<TubeSegment> harvest_tubes(const CriticalFrame& f, const DecodedOrbit& orbit) {
    std::vector<TubeSegment> tubes;
    const SymbolWord& w = orbit.word();
    for (int t = -w.back; t <= w.fwd(); ++t) {
        Vec2 pt = orbit.point(t);
        if (!f.crit_rect().contains(pt)) continue;
        double x = pt.x, y = pt.y - f.params().xi2;
        TubeSegment tube;
        tube.center = t;
        tube.n = tube_n_minus(f.params(), x);
        tube.m = tube_n_plus(f, x, y);
        if (tube.n < 0 || tube.m < 0) continue;  // infinite tube: skip
        if (t - tube.n < -w.back || t + tube.m + 1 > w.fwd()) continue;
        tubes.push_back(tube);
    }
    return tubes;
}

bool tube_expansion_check(const CriticalFrame& f, const DecodedOrbit& orbit,
                          const TubeSegment& tube, const Vec2& v) {
    int steps = tube.n + 1 + tube.m;
    Vec2 w = v;
    double logg = 0.0;
    for (int i = 0; i < steps; ++i) {
        int t = tube.center - tube.n + i;
        Mat2 J = f.jacobian(orbit.point(t), f.params().theta);
        Vec2 nw = mat_apply(J, w);
        double g = nw.norm_inf() / w.norm_inf();
        logg += std::log(g);
        w = {nw.x / nw.norm_inf(), nw.y / nw.norm_inf()};
    }
    return logg >= (steps / 5.0) * std::log(f.params().rho);
}

bool window_complete(const CriticalFrame& f, const DecodedOrbit& orbit, int t0, int n) {
    for (int j = 0; j <= n; ++j) {
        Vec2 pt = orbit.point(t0 + j);
        TubeContext ctx = tube_context(f, pt);
        switch (ctx.phase) {
            case TubePhase::AtCritical:
                if (ctx.n_minus < 0 || ctx.n_plus < 0) return false;
                if (j - ctx.n_minus < 0 || j + ctx.n_plus > n) return false;
                break;
            case TubePhase::PostCritical:
                if (j == 0) return false;  // tube started before the window
                break;
            case TubePhase::PreCritical:
                if (j == n) return false;  // tube completes after the window
                break;
            case TubePhase::Free:
                break;
        }
    }
    return true;
}

double complete_piece_growth(const CriticalFrame& f, const DecodedOrbit& orbit, int t0,
                             int n, const Vec2& v) {
    if (!window_complete(f, orbit, t0, n))
        throw std::domain_error("growth window is not complete");
    Vec2 w = v;
    double logg = 0.0;
    for (int j = 0; j <= n; ++j) {
        Mat2 J = f.jacobian(orbit.point(t0 + j), f.params().theta);
        Vec2 nw = mat_apply(J, w);
        logg += std::log(nw.norm_inf() / w.norm_inf());
        w = {nw.x / nw.norm_inf(), nw.y / nw.norm_inf()};
    }
    return logg;
}

double lyapunov_unstable(const CriticalFrame& f, const DecodedOrbit& orbit, int t0,
                         int n_steps, double theta, Vec2 v0) {
    Vec2 w = v0;
    double logg = 0.0;
    for (int j = 0; j < n_steps; ++j) {
        Mat2 J = f.jacobian(orbit.point(t0 + j), theta);
        Vec2 nw = mat_apply(J, w);
        double nrm = nw.norm_inf();
        if (nrm == 0.0 || !std::isfinite(nrm)) throw std::domain_error("degenerate growth");
        logg += std::log(nrm / w.norm_inf());
        w = {nw.x / nrm, nw.y / nrm};
    }
    return logg / n_steps;
}

double lyapunov_unstable_pointwise(const CriticalFrame& f, const Vec2& start, int n_steps,
                                   double theta, Vec2 v0) {
    Vec2 z = start;
    Vec2 w = v0;
    double logg = 0.0;
    for (int j = 0; j < n_steps; ++j) {
        Mat2 J = f.jacobian(z, theta);
        Vec2 nw = mat_apply(J, w);
        double nrm = nw.norm_inf();
        logg += std::log(nrm / w.norm_inf());
        w = {nw.x / nrm, nw.y / nrm};
        auto next = f.apply(z, theta);
        if (escaped(next)) throw std::domain_error("orbit escaped");
        z = as_pt(next);
    }
    return logg / n_steps;
}

namespace {

double angle_of(const Vec2& v) { return std::atan2(v.y, v.x); }

double angle_diff(const Vec2& a, const Vec2& b) {
    double d = std::abs(angle_of(a) - angle_of(b));
    while (d > 3.14159265358979323846 / 2) d = std::abs(d - 3.14159265358979323846);
    return d;
}

Vec2 push_frame(const CriticalFrame& f, const std::vector<Vec2>& pts, size_t from,
                double theta) {
    // Push both boundary vectors of the cone at pts[from] to the end; return
    // the (normalized) contracted direction.
    TubeContext ctx = tube_context(f, pts[from]);
    Cone cone = unstable_cone(f, pts[from], ctx, theta);
    Vec2 v = cone.vertical_line ? Vec2{0.0, 1.0} : Vec2{1.0, cone.slope};
    for (size_t i = from; i + 1 < pts.size(); ++i) {
        Mat2 J = f.jacobian(pts[i], theta);
        v = mat_apply(J, v);
        double n = v.norm_inf();
        v = {v.x / n, v.y / n};
    }
    double n2 = v.norm2();
    return {v.x / n2, v.y / n2};
}

Vec2 pull_frame(const CriticalFrame& f, const std::vector<Vec2>& pts, size_t upto,
                double theta) {
    TubeContext ctx = tube_context(f, pts[upto]);
    Cone cone = stable_cone(f, pts[upto], ctx, theta);
    Vec2 v = cone.vertical_line ? Vec2{1.0, 0.0} : Vec2{1.0, cone.slope};
    for (size_t i = upto; i > 0; --i) {
        Mat2 J = f.jacobian(pts[i - 1], theta);
        double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        Vec2 w{(v.x * J[1][1] - v.y * J[0][1]) / det,
               (v.y * J[0][0] - v.x * J[1][0]) / det};
        double n = w.norm_inf();
        v = {w.x / n, w.y / n};
    }
    double n2 = v.norm2();
    return {v.x / n2, v.y / n2};
}

}  // namespace

DirectionEstimate unstable_direction(const CriticalFrame& f, const std::vector<Vec2>& pts,
                                     double theta) {
    // pts: backward orbit listed oldest first, the base point last.
    if (pts.size() < 8) throw std::invalid_argument("unstable_direction: depth too small");
    DirectionEstimate est;
    Vec2 full = push_frame(f, pts, 0, theta);
    Vec2 shallower = push_frame(f, pts, 5, theta);
    est.dir = full;
    est.residual = angle_diff(full, shallower);
    est.depth = static_cast<int>(pts.size()) - 1;
    return est;
}

DirectionEstimate stable_direction(const CriticalFrame& f, const std::vector<Vec2>& pts,
                                   double theta) {
    // pts: forward orbit, base point first.
    if (pts.size() < 8) throw std::invalid_argument("stable_direction: depth too small");
    DirectionEstimate est;
    Vec2 full = pull_frame(f, pts, pts.size() - 1, theta);
    Vec2 shallower = pull_frame(f, pts, pts.size() - 6, theta);
    est.dir = full;
    est.residual = angle_diff(full, shallower);
    est.depth = static_cast<int>(pts.size()) - 1;
    return est;
}

int doubling_cap(const ParamSet& p, double theta) {
    if (theta <= 0.0) return 200;
    double s = std::min(theta * p.A, 1.0);
    return 10 * static_cast<int>(std::ceil(std::log(2.0) / (s * std::log(p.rho))));
}

DoublingResult uniform_doubling_time(const CriticalFrame& f, double theta,
                                     const std::vector<DecodedOrbit>& samples) {
    const ParamSet& p = f.params();
    DoublingResult res;
    if (theta <= 0.0) {
        // Witness: a point on the post-critical curve whose cone boundary is
        // nearly horizontal; its doubling time along the critical shadow
        // exceeds any cap. Rates along the shadow are exact diagonals.
        int cap = doubling_cap(p, theta);
        double y = p.beta_max;
        for (int i = 0; i < 2000; ++i) {
            double slope = p.A * 3.0 * y * y;  // boundary vector (1, slope)
            double R = slope;
            int n = 0;
            while (n < cap + 1 && R < 2.0) {
                R *= symbol_rate(p, itinerary_symbol(p.itinerary, n));
                ++n;
            }
            if (R < 2.0 || n > cap) {
                res.ok = false;
                res.N = cap;
                res.witness = f.f_xi() + Vec2{-p.eps1 * y, -p.c * y * y * y};
                return res;
            }
            y *= 0.5;
        }
        res.ok = false;
        res.witness = f.f_xi();
        return res;
    }
    int cap = doubling_cap(p, theta);
    int worst = 0;
    for (const auto& orbit : samples) {
        const SymbolWord& w = orbit.word();
        Vec2 pt = orbit.point(0);
        TubeContext ctx = tube_context(f, pt);
        Cone cone = unstable_cone(f, pt, ctx, theta);
        for (const Vec2& v0 : cone.vertical_line
                                  ? std::vector<Vec2>{{0.0, 1.0}}
                                  : std::vector<Vec2>{{1.0, cone.slope}, {1.0, -cone.slope}}) {
            Vec2 v = v0;
            double lognorm = 0.0;
            int n = 0;
            bool doubled = false;
            while (n < std::min(cap, w.fwd())) {
                Mat2 J = f.jacobian(orbit.point(n), theta);
                Vec2 nv = mat_apply(J, v);
                lognorm += std::log(nv.norm_inf() / v.norm_inf());
                v = {nv.x / nv.norm_inf(), nv.y / nv.norm_inf()};
                ++n;
                if (lognorm >= std::log(2.0)) {
                    doubled = true;
                    break;
                }
            }
            if (!doubled) {
                res.ok = false;
                res.N = cap;
                res.witness = pt;
                return res;
            }
            worst = std::max(worst, n);
        }
    }
    res.ok = true;
    res.N = worst;
    return res;
}

}  // namespace horseshoe
