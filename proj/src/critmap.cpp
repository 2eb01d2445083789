#include "horseshoe/critmap.hpp"

#include <cmath>
#include <stdexcept>

namespace horseshoe {

namespace {

constexpr double kPi = 3.14159265358979323846;

double newton_polish(double a3, double a2, double a1, double a0, double x) {
    for (int it = 0; it < 8; ++it) {
        double f = ((a3 * x + a2) * x + a1) * x + a0;
        double df = (3.0 * a3 * x + 2.0 * a2) * x + a1;
        if (df == 0.0) break;
        double step = f / df;
        x -= step;
        if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

// Smoothed ramp with C1 end caps: g(0)=0, g(1)=1, g'(0)=g'(1)=0, max g' ~ 1/(1-c).
double capped_ramp(double s, double c = 0.08) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double r;
    if (s < c)
        r = s * s / (2.0 * c);
    else if (s <= 1.0 - c)
        r = s - c / 2.0;
    else {
        double t = 1.0 - s;
        r = (1.0 - c) - t * t / (2.0 * c);
    }
    return r / (1.0 - c);
}

struct Iv {
    double lo, hi;
    static Iv of(const Interval& i) { return {i.lo, i.hi}; }
    Interval iv() const { return {lo, hi}; }
    Iv operator+(const Iv& o) const { return {lo + o.lo, hi + o.hi}; }
    Iv operator-(const Iv& o) const { return {lo - o.hi, hi - o.lo}; }
    Iv operator*(const Iv& o) const {
        double a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        return {std::min(std::min(a, b), std::min(c, d)),
                std::max(std::max(a, b), std::max(c, d))};
    }
    Iv scale(double s) const { return s >= 0 ? Iv{lo * s, hi * s} : Iv{hi * s, lo * s}; }
    Iv shift(double s) const { return {lo + s, hi + s}; }
    Iv pad_rel() const {
        double e = 4e-16 * std::max({std::abs(lo), std::abs(hi), 1e-300});
        return {lo - e, hi + e};
    }
};

}  // namespace

std::vector<double> solve_cubic_real(double a3, double a2, double a1, double a0) {
    if (a3 == 0.0) throw std::invalid_argument("solve_cubic_real: degree is not 3");
    const double A = a2 / a3, B = a1 / a3, C = a0 / a3;
    const double sq_A = A * A;
    const double p = (B - sq_A / 3.0);
    const double q = (2.0 / 27.0) * A * sq_A - A * B / 3.0 + C;
    const double shift = -A / 3.0;
    const double half_q = q / 2.0;
    const double disc = half_q * half_q + (p / 3.0) * (p / 3.0) * (p / 3.0);
    std::vector<double> roots;
    const double scale = std::max({std::abs(p), std::abs(q), 1.0});
    if (std::abs(disc) <= 1e-30 * scale * scale) {
        if (std::abs(q) <= 1e-30 * scale) {
            roots = {shift};
        } else {
            double u = std::cbrt(-half_q);
            roots = {2.0 * u + shift, -u + shift};
        }
    } else if (disc < 0.0) {
        double phi = std::acos(std::clamp(-half_q / std::sqrt(-(p / 3.0) * (p / 3.0) * (p / 3.0)),
                                          -1.0, 1.0)) / 3.0;
        double t = 2.0 * std::sqrt(-p / 3.0);
        roots = {t * std::cos(phi) + shift, -t * std::cos(phi + kPi / 3.0) + shift,
                 -t * std::cos(phi - kPi / 3.0) + shift};
    } else {
        double sd = std::sqrt(disc);
        double u = std::cbrt(-half_q + sd);
        double v = std::cbrt(-half_q - sd);
        roots = {u + v + shift};
    }
    for (double& r : roots) r = newton_polish(a3, a2, a1, a0, r);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [&](double a, double b) {
                                return std::abs(a - b) <=
                                       1e-12 * std::max({std::abs(a), std::abs(b), 1e-300});
                            }),
                roots.end());
    return roots;
}

CriticalFrame::CriticalFrame(const ParamSet& p) : p_(p), base_(p) {
    const double lam = p.lambda, beta = p.beta_max, alpha = p.alpha_max;
    xprime_ = 2.0 * p.l0 + p.d;

    std::vector<int> xs;
    for (int j = 0; j <= p.k_c + 3; ++j) xs.push_back(xi_symbol(p, j));
    J_ = base_.forward_band(xs, p.k_c);
    std::vector<int> xps;
    for (int j = 0; j <= p.k_c + 2; ++j) xps.push_back(itinerary_symbol(p.itinerary, j));
    Jp_ = base_.forward_band(xps, p.k_c);

    rect_ = Box{{0.0, alpha}, {p.xi2 - beta, p.xi2 + beta}};
    double band_w = std::pow(lam, p.n_c + 2);
    Vb_ = Interval{xprime_ - band_w, xprime_};
    fxi_ = {xprime_ - band_w / 2.0, base_.branch(2).apply({0.0, p.xi2}).y};

    // Collar geometry. Lateral collars live in the backward-escape gap
    // (lambda^{nc+1}, gap_end); vertical collars between the critical
    // rectangle and the nearest sibling band at depth kc+1.
    GlueSpec g;
    g.w1 = 0.35 * alpha;
    double gap_end = std::pow(lam, p.n_c) * (2.0 * p.l0 + p.d - lam);
    double x2 = alpha + g.w1;
    double x3 = std::min(x2 + 0.44 * std::pow(lam, p.n_c), 0.97 * gap_end);
    g.w2 = x3 - x2;
    if (g.w2 <= 0.0) throw std::runtime_error("critical frame: no room for the lateral collar");

    // Vertical room: distance from the rectangle edge to the nearest sibling
    // band of generation kc+1 inside J, and to the edge of J itself.
    double room = kInf;
    {
        Interval ry = rect_.y;
        room = std::min(ry.lo - J_.lo, J_.hi - ry.hi);
        int succ_base = xi_symbol(p, p.k_c);
        for (int srow = 1; srow <= 3; ++srow) {
            int sib = (srow - 1) * 3 + target_col(rect_row(succ_base));
            if (sib == xi_symbol(p, p.k_c + 1)) continue;
            auto xs2 = xs;
            xs2[static_cast<size_t>(p.k_c + 1)] = sib;
            Interval bs = base_.forward_band(xs2, p.k_c + 1);
            if (bs.is_empty()) continue;
            double dist = bs.lo > ry.hi ? bs.lo - ry.hi : ry.lo - bs.hi;
            room = std::min(room, dist);
        }
    }
    double total_h = std::min(0.9 * beta, 0.9 * room);
    g.h1 = total_h / 3.0;
    g.h2 = 2.0 * total_h / 3.0;

    // Horizontal profile mismatch absorbed by the u-stage taper.
    double y3 = beta + g.h1 + g.h2;
    g.delta0 = std::abs(lam * x2 - band_w / 2.0) + p.eps1 * y3;
    g.taper_eps = g.delta0 / (lam * g.w2);
    glue_ = g;
    slab_ = Box{{0.0, x3}, {p.xi2 - y3, p.xi2 + y3}};
}

Zone CriticalFrame::zone_of(const Vec2& pt) const {
    if (!base_.row_of_y(pt.y)) return Zone::Outside;
    if (!slab_.contains(pt)) return Zone::Linear;
    if (rect_.contains(pt)) return Zone::Core;
    return Zone::Glue;
}

Vec2 CriticalFrame::glue_map(const Vec2& pt, double theta) const {
    const double beta = p_.beta_max, alpha = p_.alpha_max, lam = p_.lambda;
    const double x = pt.x;
    const double y = pt.y - p_.xi2;
    const double a = std::abs(y);

    double Tvx = x <= alpha ? 1.0 : 1.0 - smoothstep5((x - alpha) / glue_.w1);
    double Tvy = a <= beta ? 1.0 : 1.0 - smoothstep5((a - beta) / glue_.h1);
    double x2 = alpha + glue_.w1;
    double Tux;
    if (x <= x2) {
        Tux = 1.0;
    } else {
        double s = (x - x2) / glue_.w2;
        double xi = lam * glue_.w2 * capped_ramp(s);
        Tux = std::max(0.0, (1.0 + glue_.taper_eps) * glue_.delta0 / (glue_.delta0 + xi) -
                                glue_.taper_eps);
    }
    double y2 = beta + glue_.h1;
    double Tuy = a <= y2 ? 1.0 : 1.0 - smoothstep5((a - y2) / glue_.h2);

    double Tu = Tux * Tuy;
    double Tv = Tvx * Tvy;

    double u0 = xprime_ - lam * x;
    double v0 = fxi_.y + p_.sigma * y;
    double ucub = fxi_.x - p_.eps1 * y;
    double vcub = fxi_.y + p_.b * x - p_.c * y * (y * y + x + theta);
    return {u0 + Tu * (ucub - u0), v0 + Tv * (vcub - v0)};
}

PointOrEscaped CriticalFrame::apply(const Vec2& pt, double theta) const {
    switch (zone_of(pt)) {
        case Zone::Outside:
            return Escaped{};
        case Zone::Linear:
            return base_.apply(pt);
        case Zone::Core: {
            double x = pt.x, y = pt.y - p_.xi2;
            return Vec2{fxi_.x - p_.eps1 * y,
                        fxi_.y + p_.b * x - p_.c * y * (y * y + x + theta)};
        }
        case Zone::Glue:
            return glue_map(pt, theta);
    }
    return Escaped{};
}

PointOrEscaped CriticalFrame::inverse(const Vec2& q, double theta) const {
    // Cubic core first: the image strip of the core is far thinner than any
    // affine strip, so a hit there is unambiguous.
    {
        double y = -(q.x - fxi_.x) / p_.eps1;
        if (std::abs(y) <= p_.beta_max * (1.0 + 1e-12)) {
            double denom = p_.b - p_.c * y;
            double x = (q.y - fxi_.y + p_.c * y * y * y + p_.c * theta * y) / denom;
            if (x >= -1e-12 * p_.alpha_max && x <= p_.alpha_max * (1.0 + 1e-12)) {
                Vec2 cand{std::clamp(x, 0.0, p_.alpha_max),
                          std::clamp(y, -p_.beta_max, p_.beta_max) + p_.xi2};
                auto img = apply(cand, theta);
                if (!escaped(img) && (as_pt(img) - q).norm_inf() <=
                                         1e-9 * std::max(1.0, q.norm_inf()))
                    return cand;
            }
        }
    }
    // Affine branches: valid when the preimage lands outside the perturbed slab.
    for (int r = 1; r <= 3; ++r) {
        const Branch& br = base_.branch(r);
        Interval strip = Interval{0.0, 1.0}.affine(br.ax, br.bx);
        if (!strip.contains(q.x)) continue;
        Vec2 cand = br.inverse(q);
        if (!base_.row_iv(r).contains(cand.y)) continue;
        if (zone_of(cand) != Zone::Linear) continue;
        return cand;
    }
    // Glue: damped Newton with finite-difference Jacobian from a seed grid.
    const Box& S = slab_;
    double best_err = kInf;
    Vec2 best{};
    for (int i = 0; i <= 6; ++i) {
        for (int j = 0; j <= 10; ++j) {
            Vec2 g{S.x.lo + (S.x.hi - S.x.lo) * i / 6.0,
                   S.y.lo + (S.y.hi - S.y.lo) * j / 10.0};
            Vec2 z = g;
            for (int it = 0; it < 60; ++it) {
                auto fz = apply(z, theta);
                if (escaped(fz)) break;
                Vec2 f = as_pt(fz) - q;
                double err = f.norm_inf();
                if (err < best_err && zone_of(z) != Zone::Outside) {
                    best_err = err;
                    best = z;
                }
                if (err <= 1e-13 * std::max(1.0, q.norm_inf())) break;
                auto Jm = jacobian(z, theta);
                double det = Jm[0][0] * Jm[1][1] - Jm[0][1] * Jm[1][0];
                if (det == 0.0 || !std::isfinite(det)) break;
                Vec2 step{(f.x * Jm[1][1] - f.y * Jm[0][1]) / det,
                          (f.y * Jm[0][0] - f.x * Jm[1][0]) / det};
                z = {std::clamp(z.x - step.x, S.x.lo, S.x.hi),
                     std::clamp(z.y - step.y, S.y.lo, S.y.hi)};
            }
        }
        if (best_err <= 1e-13 * std::max(1.0, q.norm_inf())) break;
    }
    if (best_err <= 1e-10 * std::max(1.0, q.norm_inf())) return best;
    return Escaped{};
}

std::array<std::array<double, 2>, 2> CriticalFrame::jacobian(const Vec2& pt, double theta) const {
    switch (zone_of(pt)) {
        case Zone::Outside:
            throw std::domain_error("jacobian undefined at a gap point");
        case Zone::Linear: {
            const Branch& br = base_.branch(*base_.row_of_y(pt.y));
            return {{{br.ax, 0.0}, {0.0, br.ay}}};
        }
        case Zone::Core: {
            double x = pt.x, y = pt.y - p_.xi2;
            return {{{0.0, -p_.eps1},
                     {p_.b - p_.c * y, -p_.c * (3.0 * y * y + x + theta)}}};
        }
        case Zone::Glue: {
            double hx = std::max(1e-7 * slab_.x.len(), 1e-300);
            double hy = std::max(1e-7 * p_.beta_max, 1e-300);
            auto at = [&](double dx, double dy) { return glue_map({pt.x + dx, pt.y + dy}, theta); };
            Vec2 fxp = at(hx, 0), fxm = at(-hx, 0), fyp = at(0, hy), fym = at(0, -hy);
            return {{{(fxp.x - fxm.x) / (2 * hx), (fyp.x - fym.x) / (2 * hy)},
                     {(fxp.y - fxm.y) / (2 * hx), (fyp.y - fym.y) / (2 * hy)}}};
        }
    }
    throw std::logic_error("unreachable");
}

Vec2 CriticalFrame::local_cubic(double x, double y, double theta) const {
    if (x < 0.0 || x > p_.alpha_max || std::abs(y) > p_.beta_max)
        throw std::domain_error("offsets outside the critical rectangle");
    return {-p_.eps1 * y, p_.b * x - p_.c * y * (y * y + x + theta)};
}

Vec2 CriticalFrame::local_cubic_inverse(double u, double v, double theta) const {
    double y = -u / p_.eps1;
    if (std::abs(y) > p_.beta_max * (1.0 + 1e-12))
        throw std::domain_error("point not in the image of the critical rectangle");
    double denom = p_.b - p_.c * y;
    double x = (v + p_.c * y * y * y + p_.c * theta * y) / denom;
    if (x < -1e-12 * p_.alpha_max || x > p_.alpha_max * (1.0 + 1e-12))
        throw std::domain_error("point not in the image of the critical rectangle");
    return {std::clamp(x, 0.0, p_.alpha_max), y};
}

std::vector<CriticalFrame::OrbitPoint> CriticalFrame::critical_orbit(int n_back,
                                                                     int n_fwd) const {
    std::vector<OrbitPoint> orbit;
    for (int k = -n_back; k <= n_fwd; ++k) {
        OrbitPoint op;
        op.k = k;
        if (k <= 0) {
            double y = p_.xi2;
            for (int j = 0; j < -k; ++j) y /= p_.sigma;
            op.pos = {0.0, y};
        } else {
            double x = fxi_.x;
            for (int j = 1; j < k; ++j) {
                const Branch& br = base_.branch(rect_row(xi_sym(j)));
                x = br.ax * x + br.bx;
            }
            std::vector<int> syms;
            for (int j = k; j <= k + 45; ++j) syms.push_back(xi_sym(j));
            Interval band = base_.forward_band(syms, 40);
            op.pos = {x, band.center()};
        }
        auto r = base_.rectangle_of(op.pos);
        op.rect = r ? *r : 0;
        op.in_crit_rect = rect_.contains(op.pos);
        orbit.push_back(op);
    }
    return orbit;
}

Box CriticalFrame::apply_box(const Box& b, double theta) const {
    Box out{Interval::empty(), Interval::empty()};
    for (int r = 1; r <= 3; ++r) {
        Box part = b.intersect({Interval{0.0, 1.0}, base_.row_iv(r)});
        if (part.is_empty()) continue;
        const Branch& br = base_.branch(r);
        Box lin{part.x.affine(br.ax, br.bx), part.y.affine(br.ay, br.by)};
        if (r != 2 || !part.intersects(slab_)) {
            out = out.hull({lin.x.pad(1e-18 * std::max(1.0, std::abs(lin.x.hi))),
                            lin.y.pad(1e-15 * std::max(1.0, std::abs(lin.y.hi)))});
            continue;
        }
        // Slab part: each glue component lies between the affine value and the
        // cubic value, so the hull of the two interval images is sound.
        Box in_slab = part.intersect(slab_);
        Box outside = part;  // conservative: keep full part for the affine side
        Iv x = Iv::of(in_slab.x);
        Iv y = Iv::of(in_slab.y).shift(-p_.xi2);
        Iv ucub = y.scale(-p_.eps1).shift(fxi_.x).pad_rel();
        Iv vcub = (x.scale(p_.b) -
                   (y * ((y * y) + x + Iv{theta, theta})).scale(p_.c))
                      .shift(fxi_.y)
                      .pad_rel();
        Box lin_slab{in_slab.x.affine(br.ax, br.bx), in_slab.y.affine(br.ay, br.by)};
        Box cub{ucub.iv(), vcub.iv()};
        out = out.hull(lin_slab.hull(cub));
        Box lin_rest{outside.x.affine(br.ax, br.bx), outside.y.affine(br.ay, br.by)};
        if (!(in_slab.contains(part))) out = out.hull(lin_rest);
    }
    return out;
}

Box CriticalFrame::inverse_box(const Box& b, double theta) const {
    Box out{Interval::empty(), Interval::empty()};
    for (int r = 1; r <= 3; ++r) {
        const Branch& br = base_.branch(r);
        Interval strip = Interval{0.0, 1.0}.affine(br.ax, br.bx);
        Box part{b.x.intersect(strip), b.y};
        if (part.is_empty()) continue;
        Box pre{part.x.affine(1.0 / br.ax, -br.bx / br.ax),
                part.y.affine(1.0 / br.ay, -br.by / br.ay)};
        pre.y = pre.y.intersect(base_.row_iv(r));
        if (!pre.is_empty()) {
            if (r == 2 && pre.intersects(slab_)) {
                // preimages inside the slab are recomputed below
                Box clipped = pre;
                out = out.hull(clipped);
            } else {
                out = out.hull(pre);
            }
        }
    }
    // Cubic core preimage.
    Interval ux = b.x.intersect(Interval{fxi_.x - p_.eps1 * p_.beta_max,
                                         fxi_.x + p_.eps1 * p_.beta_max});
    if (!ux.is_empty()) {
        Iv y = Iv::of(ux).shift(-fxi_.x).scale(-1.0 / p_.eps1);
        Iv v = Iv::of(b.y).shift(-fxi_.y);
        Iv num = v + (y * y * y).scale(p_.c) + y.scale(p_.c * theta);
        Iv den = Iv{p_.b, p_.b} - y.scale(p_.c);
        Iv x{std::min(num.lo / den.lo, num.lo / den.hi),
             std::max(num.hi / den.lo, num.hi / den.hi)};
        Box pre{x.pad_rel().iv().intersect(rect_.x),
                y.pad_rel().iv().affine(1.0, p_.xi2).intersect(rect_.y)};
        if (!pre.is_empty()) out = out.hull(pre);
    }
    return out;
}

double CriticalFrame::glue_det_sample_bound() const {
    double worst = 0.0;
    const int NX = 240, NY = 160;
    for (int i = 0; i <= NX; ++i) {
        for (int j = 0; j <= NY; ++j) {
            Vec2 q{slab_.x.lo + slab_.x.len() * i / NX,
                   slab_.y.lo + slab_.y.len() * j / NY};
            if (zone_of(q) != Zone::Glue) continue;
            auto J = jacobian(q, p_.theta);
            double det = std::abs(J[0][0] * J[1][1] - J[0][1] * J[1][0]);
            worst = std::max(worst, det);
        }
    }
    return worst;
}

double max_abs_det(const ParamSet& p) {
    CriticalFrame frame(p);
    double core = 3.0 * p.eps1 * p.c * p.beta_max;  // |det| at y = -beta_max
    return std::max({p.lambda * p.sigma, p.lambda * p.rho, core,
                     frame.glue_det_sample_bound()});
}

}  // namespace horseshoe
