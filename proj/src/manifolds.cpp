#include "horseshoe/manifolds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace horseshoe {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> ChebGraph::lobatto_nodes(double a, double b, int n) {
    std::vector<double> t(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        t[static_cast<size_t>(j)] =
            0.5 * (a + b) - 0.5 * (b - a) * std::cos(kPi * j / (n - 1));
    t.front() = a;
    t.back() = b;
    return t;
}

void ChebGraph::build_weights() {
    const int n = static_cast<int>(t.size());
    wts.assign(static_cast<size_t>(n), 1.0);
    for (int j = 0; j < n; ++j) {
        wts[static_cast<size_t>(j)] = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n - 1) wts[static_cast<size_t>(j)] *= 0.5;
    }
}

double ChebGraph::eval(double at) const {
    double num = 0.0, den = 0.0;
    for (size_t j = 0; j < t.size(); ++j) {
        double d = at - t[j];
        if (d == 0.0) return v[j];
        double w = wts[j] / d;
        num += w * v[j];
        den += w;
    }
    return num / den;
}

namespace {

ChebGraph make_graph(std::vector<double> nodes, std::vector<double> vals) {
    ChebGraph g;
    g.t = std::move(nodes);
    g.v = std::move(vals);
    g.build_weights();
    return g;
}

ChebGraph graph_of(const std::vector<double>& nodes, const std::vector<double>& vals) {
    return make_graph(nodes, vals);
}

}  // namespace

double VerticalCurve::eval_x(double yo) const { return graph_of(y, x).eval(yo); }
double VerticalCurve::eval_dx(double yo) const { return graph_of(y, dx).eval(yo); }
double VerticalCurve::eval_ddx(double yo) const { return graph_of(y, ddx).eval(yo); }

double HorizontalCurve::eval_y(double at) const { return graph_of(x, y).eval(at); }
double HorizontalCurve::eval_dy(double at) const { return graph_of(x, dy).eval(at); }

VerticalCurve vertical_edge_curve(const CriticalFrame& f, double x0, int n_nodes) {
    const double beta = f.params().beta_max;
    VerticalCurve c;
    c.y = ChebGraph::lobatto_nodes(-beta, beta, n_nodes);
    c.x.assign(c.y.size(), x0);
    c.dx.assign(c.y.size(), 0.0);
    c.ddx.assign(c.y.size(), 0.0);
    return c;
}

FamilyViolation curve_in_family(const CriticalFrame& f, const VerticalCurve& c) {
    const ParamSet& p = f.params();
    FamilyViolation v;
    ChebGraph gx = graph_of(c.y, c.x), gdx = graph_of(c.y, c.dx), gddx = graph_of(c.y, c.ddx);
    auto check = [&](double yo) {
        double x = gx.eval(yo), dx = gdx.eval(yo), ddx = gddx.eval(yo);
        double slope_bound = (3.0 * yo * yo + x) / (6.0 * p.beta_max);
        v.worst_slope_excess = std::max(v.worst_slope_excess, std::abs(dx) - slope_bound);
        v.worst_curvature_excess = std::max(v.worst_curvature_excess, std::abs(ddx) - p.D);
        if (x < -1e-18 || x > p.alpha_max * (1.0 + 1e-9)) v.ok = false;
    };
    for (size_t j = 0; j < c.y.size(); ++j) {
        check(c.y[j]);
        if (j + 1 < c.y.size()) check(0.5 * (c.y[j] + c.y[j + 1]));
    }
    if (v.worst_slope_excess > 0.0 || v.worst_curvature_excess > 0.0) v.ok = false;
    return v;
}

VerticalCurve random_family_curve(const CriticalFrame& f, std::mt19937_64& rng, int n_nodes) {
    const ParamSet& p = f.params();
    std::uniform_real_distribution<double> uq(0.15, 0.85), uw(0.05, 0.3), uph(0.0, 6.28);
    for (int attempt = 0; attempt < 64; ++attempt) {
        double q = uq(rng), w = uw(rng), ph = uph(rng), amp = 0.25;
        VerticalCurve c;
        c.y = ChebGraph::lobatto_nodes(-p.beta_max, p.beta_max, n_nodes);
        c.x.resize(c.y.size());
        c.dx.resize(c.y.size());
        c.ddx.resize(c.y.size());
        for (size_t j = 0; j < c.y.size(); ++j) {
            double s = c.y[j] / p.beta_max;  // in [-1, 1]
            c.x[j] = q * p.alpha_max * (1.0 + amp * std::sin(w * s + ph)) / (1.0 + amp);
            c.dx[j] = q * p.alpha_max * amp * w * std::cos(w * s + ph) /
                      ((1.0 + amp) * p.beta_max);
            c.ddx[j] = -q * p.alpha_max * amp * w * w * std::sin(w * s + ph) /
                       ((1.0 + amp) * p.beta_max * p.beta_max);
        }
        if (curve_in_family(f, c).ok) return c;
    }
    throw std::runtime_error("random_family_curve: rejection sampling failed");
}

namespace {

struct ReturnComposition {
    const CriticalFrame* f = nullptr;
    std::vector<int> word;  // forward symbols, word[0] = 4 at the rectangle
    double theta = 0.0;
    int n_affine = 0;       // number of affine steps (word length - 1)
    double abs_ax = 1.0;    // |prod ax| = lambda^{n_affine}
    double rate_prod = 1.0; // prod |ay|

    // Pull an absolute height at the end of the word back to the value the
    // cubic image must take at time 1 (stable backward contraction).
    double pull_target(double y_end) const {
        double y = y_end;
        for (int j = n_affine; j >= 1; --j) {
            const Branch& br = f->base().branch(rect_row(word[static_cast<size_t>(j)]));
            y = (y - br.by) / br.ay;
        }
        return y;
    }
    // Push the cubic-image x forward through the affine steps.
    double push_x(double x1) const {
        double x = x1;
        for (int j = 1; j <= n_affine; ++j) {
            const Branch& br = f->base().branch(rect_row(word[static_cast<size_t>(j)]));
            x = br.ax * x + br.bx;
        }
        return x;
    }
};

ReturnComposition make_composition(const CriticalFrame& f, const std::vector<int>& word,
                                   double theta) {
    ReturnComposition rc;
    rc.f = &f;
    rc.word = word;
    rc.theta = theta;
    rc.n_affine = static_cast<int>(word.size()) - 2;  // steps 1 .. L-1
    const ParamSet& p = f.params();
    rc.abs_ax = std::pow(p.lambda, rc.n_affine);
    rc.rate_prod = 1.0;
    for (int j = 1; j + 1 < static_cast<int>(word.size()); ++j)
        rc.rate_prod *= symbol_rate(p, word[static_cast<size_t>(j)]);
    return rc;
}

// Vertical interval of points of the rectangle returning through the word.
Interval return_window(const CriticalFrame& f, const std::vector<int>& word) {
    if (word.size() < 2 || word.front() != 4 || word.back() != 4) return Interval::empty();
    const BaseMap& base = f.base();
    Interval B = f.crit_rect().y;
    for (int j = static_cast<int>(word.size()) - 2; j >= 1; --j) {
        const Branch& br = base.branch(rect_row(word[static_cast<size_t>(j)]));
        B = B.affine(1.0 / br.ay, -br.by / br.ay).intersect(base.cell_y(word[static_cast<size_t>(j)]));
        if (B.is_empty()) return B;
    }
    // One more pullback through the cubic: the image heights the curve must
    // reach at time 1. Map it to rectangle heights via the cubic v-range.
    return B;
}

}  // namespace

VerticalCurve unstable_graph_transform(const CriticalFrame& f, const VerticalCurve& c,
                                       const std::vector<int>& return_word, double theta) {
    const ParamSet& p = f.params();
    if (return_word.size() < static_cast<size_t>(p.k_c + 2) || return_word.front() != 4 ||
        return_word.back() != 4)
        throw std::invalid_argument("not a first-return word");
    for (size_t j = 0; j + 1 < return_word.size(); ++j)
        if (!admissible_pair(return_word[j], return_word[j + 1]))
            throw std::invalid_argument("inadmissible return word");
    Interval win = return_window(f, return_word);
    if (win.is_empty()) throw std::invalid_argument("return word has empty return set");

    ReturnComposition rc = make_composition(f, return_word, theta);
    ChebGraph gx = graph_of(c.y, c.x), gdx = graph_of(c.y, c.dx), gddx = graph_of(c.y, c.ddx);
    const double beta = p.beta_max;

    auto vhat = [&](double y) {
        double x = gx.eval(y);
        return p.b * x - p.c * y * (y * y + x + theta);
    };
    auto vhat_d = [&](double y) {
        double x = gx.eval(y), dx = gdx.eval(y);
        return (p.b - p.c * y) * dx - p.c * (3.0 * y * y + x + theta);
    };
    auto vhat_dd = [&](double y) {
        double x = gx.eval(y), dx = gdx.eval(y), ddx = gddx.eval(y);
        (void)x;
        return (p.b - p.c * y) * ddx - 2.0 * p.c * dx - 6.0 * p.c * y;
    };

    VerticalCurve out;
    out.y = ChebGraph::lobatto_nodes(-beta, beta, static_cast<int>(c.y.size()));
    out.x.resize(out.y.size());
    out.dx.resize(out.y.size());
    out.ddx.resize(out.y.size());

    double sign_ay = 1.0;
    for (int j = 1; j <= rc.n_affine; ++j)
        sign_ay *= f.base().branch(rect_row(return_word[static_cast<size_t>(j)])).ay < 0 ? -1.0
                                                                                          : 1.0;
    double sign_ax = 1.0;
    for (int j = 1; j <= rc.n_affine; ++j)
        sign_ax *= f.base().branch(rect_row(return_word[static_cast<size_t>(j)])).ax < 0 ? -1.0
                                                                                          : 1.0;

    for (size_t k = 0; k < out.y.size(); ++k) {
        double target = rc.pull_target(p.xi2 + out.y[k]) - f.f_xi().y;
        // Solve vhat(y) = target; vhat is strictly decreasing across the family.
        double lo = -beta, hi = beta;
        double flo = vhat(lo) - target, fhi = vhat(hi) - target;
        if (flo * fhi > 0.0)
            throw std::invalid_argument("transformed curve does not cross the rectangle");
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = vhat(mid) - target;
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * beta) break;
        }
        double ysol = 0.5 * (lo + hi);
        double u1 = f.f_xi().x - p.eps1 * ysol;
        out.x[static_cast<size_t>(k)] = rc.push_x(u1);
        double vd = vhat_d(ysol);
        double vdd = vhat_dd(ysol);
        double Ax = sign_ax * rc.abs_ax;
        double Ay = sign_ay * rc.rate_prod;
        out.dx[static_cast<size_t>(k)] = -Ax * p.eps1 / (Ay * vd);
        out.ddx[static_cast<size_t>(k)] = Ax * p.eps1 * vdd / (Ay * Ay * vd * vd * vd);
    }
    return out;
}

bool slope_transfer_bound(const CriticalFrame& f, const VerticalCurve& in,
                          const VerticalCurve& out, const std::vector<int>& return_word) {
    const ParamSet& p = f.params();
    ReturnComposition rc = make_composition(f, return_word, p.theta);
    ChebGraph gx = graph_of(in.y, in.x);
    for (size_t k = 0; k < out.y.size(); ++k) {
        double target = rc.pull_target(p.xi2 + out.y[k]) - f.f_xi().y;
        double lo = -p.beta_max, hi = p.beta_max;
        auto vhat = [&](double y) {
            double x = gx.eval(y);
            return p.b * x - p.c * y * (y * y + x + p.theta) - target;
        };
        double flo = vhat(lo);
        for (int it = 0; it < 120; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = vhat(mid);
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        double y = 0.5 * (lo + hi);
        double x = gx.eval(y);
        double lhs = 2.0 * rc.abs_ax * p.eps1 /
                     (rc.rate_prod * p.c * (3.0 * y * y + x));
        double rhs = (3.0 * out.y[k] * out.y[k] + out.x[k]) / (6.0 * p.beta_max);
        if (!(lhs <= rhs)) return false;
    }
    return true;
}

UnstableManifold unstable_manifold_local(const CriticalFrame& f, const SymbolWord& word,
                                         double tol_rel) {
    UnstableManifold M;
    M.frame = &f;
    DecodedOrbit orbit(f, word);
    std::vector<int> visits;
    for (int j = 1; j <= word.back; ++j) {
        const Box& b = orbit.box(-j);
        if (f.crit_rect().contains(b.center()) && f.crit_rect().contains(b)) visits.push_back(j);
    }
    if (visits.empty()) {
        M.exact_vertical = true;
        M.x_const = orbit.point(0).x;
        return M;
    }
    if (visits.size() < 2)
        throw std::invalid_argument("insufficient backward returns within word length");

    VerticalCurve left = vertical_edge_curve(f, 0.0);
    VerticalCurve right = vertical_edge_curve(f, f.params().alpha_max);
    for (size_t k = visits.size() - 1; k >= 1; --k) {
        int ja = visits[k], jb = visits[k - 1];
        std::vector<int> seg;
        for (int t = -ja; t <= -jb; ++t) seg.push_back(word.sym(t));
        left = unstable_graph_transform(f, left, seg);
        right = unstable_graph_transform(f, right, seg);
        if (k == 1) break;
    }
    double gap = 0.0;
    for (size_t j = 0; j < left.y.size(); ++j)
        gap = std::max(gap, std::abs(left.x[j] - right.x[j]));
    M.gap = gap;
    if (gap > tol_rel * f.params().beta_max)
        throw std::invalid_argument("insufficient backward returns within word length");
    M.core = left;
    for (int t = -visits.front(); t <= 0; ++t) M.push_word.push_back(word.sym(t));
    return M;
}

double UnstableManifold::eval_x(double y_abs) const {
    if (exact_vertical) return x_const;
    const CriticalFrame& f = *frame;
    const ParamSet& p = f.params();
    ReturnComposition rc;
    rc.f = &f;
    rc.word = push_word;
    rc.theta = p.theta;
    rc.n_affine = static_cast<int>(push_word.size()) - 1;
    ChebGraph gx = graph_of(core.y, core.x);
    double target = y_abs;
    for (int j = rc.n_affine; j >= 1; --j) {
        const Branch& br = f.base().branch(rect_row(push_word[static_cast<size_t>(j)]));
        target = (target - br.by) / br.ay;
    }
    target -= f.f_xi().y;
    auto vhat = [&](double y) {
        double x = gx.eval(y);
        return p.b * x - p.c * y * (y * y + x + p.theta) - target;
    };
    double lo = -p.beta_max, hi = p.beta_max;
    double flo = vhat(lo), fhi = vhat(hi);
    if (flo * fhi > 0.0) throw std::domain_error("height outside the local manifold");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = vhat(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double ysol = 0.5 * (lo + hi);
    double x1 = f.f_xi().x - p.eps1 * ysol;
    for (int j = 1; j <= rc.n_affine; ++j) {
        const Branch& br = f.base().branch(rect_row(push_word[static_cast<size_t>(j)]));
        x1 = br.ax * x1 + br.bx;
    }
    return x1;
}

CurveGraph UnstableManifold::sample(int n) const {
    CurveGraph g;
    for (int i = 0; i <= n; ++i) {
        double y = static_cast<double>(i) / n;
        double x;
        try {
            x = eval_x(y);
        } catch (const std::domain_error&) {
            continue;
        }
        g.t.push_back(y);
        g.xs.push_back(x);
        g.ys.push_back(y);
        double h = 1e-6;
        try {
            double xp = eval_x(std::min(1.0, y + h));
            double xm = eval_x(std::max(0.0, y - h));
            g.slope.push_back((xp - xm) / (std::min(1.0, y + h) - std::max(0.0, y - h)));
        } catch (const std::domain_error&) {
            g.slope.push_back(0.0);
        }
    }
    return g;
}

namespace {

// One pullback of an approximative stable curve through an affine step.
HorizontalCurve pull_linear(const CriticalFrame& f, const HorizontalCurve& c, int symbol) {
    const Branch& br = f.base().branch(rect_row(symbol));
    ChebGraph gy = graph_of(c.x, c.y), gdy = graph_of(c.x, c.dy);
    HorizontalCurve out;
    out.x = ChebGraph::lobatto_nodes(0.0, 1.0, static_cast<int>(c.x.size()));
    out.y.resize(out.x.size());
    out.dy.resize(out.x.size());
    for (size_t j = 0; j < out.x.size(); ++j) {
        double xi = br.ax * out.x[j] + br.bx;  // image abscissa inside the strip
        out.y[j] = (gy.eval(xi) - br.by) / br.ay;
        out.dy[j] = gdy.eval(xi) * br.ax / br.ay;
    }
    return out;
}

// Pullback through the cubic: the curve must cross the image of the critical
// rectangle; the result is a graph over [0, alpha_max].
HorizontalCurve pull_cubic(const CriticalFrame& f, const HorizontalCurve& c, double theta) {
    const ParamSet& p = f.params();
    ChebGraph gy = graph_of(c.x, c.y), gdy = graph_of(c.x, c.dy);
    HorizontalCurve out;
    out.x = ChebGraph::lobatto_nodes(0.0, p.alpha_max, static_cast<int>(c.x.size()));
    out.y.resize(out.x.size());
    out.dy.resize(out.x.size());
    for (size_t j = 0; j < out.x.size(); ++j) {
        double x = out.x[j];
        double y = 0.0;
        for (int it = 0; it < 8; ++it) {
            double u = f.f_xi().x - p.eps1 * y;
            double zeta = gy.eval(u) - f.f_xi().y;
            // c y^3 + c (x+theta) y + (zeta - b x) = 0, strictly monotone in y.
            auto roots = solve_cubic_real(p.c, 0.0, p.c * (x + theta), zeta - p.b * x);
            y = roots.front();
            for (double r : roots)
                if (std::abs(r) < std::abs(y)) y = r;
        }
        double u = f.f_xi().x - p.eps1 * y;
        double cs = gdy.eval(u);
        out.y[j] = y + p.xi2;
        out.dy[j] = (p.b - p.c * y) / (p.c * (3.0 * y * y + x + theta) - p.eps1 * cs);
    }
    return out;
}

}  // namespace

StableManifold stable_manifold_local(const CriticalFrame& f, const SymbolWord& word,
                                     double tol_rel) {
    StableManifold M;
    DecodedOrbit orbit(f, word);
    std::vector<int> visits;
    for (int t = 0; t <= word.fwd(); ++t) {
        const Box& b = orbit.box(t);
        if (f.crit_rect().contains(b.center()) && f.crit_rect().contains(b)) visits.push_back(t);
    }
    if (visits.empty()) {
        M.exact_horizontal = true;
        M.y_const = orbit.point(0).y;
        return M;
    }
    if (visits.size() < 2)
        throw std::invalid_argument("insufficient forward returns within word length");

    const int K = static_cast<int>(visits.size());
    const BaseMap& base = f.base();
    // Band of rectangle heights at time t_{K-1}+1 feeding the last visit.
    Interval B = f.crit_rect().y;
    for (int j = visits[static_cast<size_t>(K - 1)] - 1; j >= visits[static_cast<size_t>(K - 2)] + 1;
         --j) {
        const Branch& br = base.branch(rect_row(word.sym(j)));
        B = B.affine(1.0 / br.ay, -br.by / br.ay);
    }
    auto horizontal = [&](double level) {
        HorizontalCurve h;
        h.x = ChebGraph::lobatto_nodes(0.0, 1.0, 33);
        h.y.assign(h.x.size(), level);
        h.dy.assign(h.x.size(), 0.0);
        return h;
    };
    HorizontalCurve up = horizontal(B.hi);
    HorizontalCurve lo = horizontal(B.lo);

    for (int k = K - 2; k >= 0; --k) {
        int tk = visits[static_cast<size_t>(k)];
        up = pull_cubic(f, up, f.params().theta);
        lo = pull_cubic(f, lo, f.params().theta);
        int stop = k > 0 ? visits[static_cast<size_t>(k - 1)] + 1 : 0;
        for (int j = tk - 1; j >= stop; --j) {
            up = pull_linear(f, up, word.sym(j));
            lo = pull_linear(f, lo, word.sym(j));
        }
        double gap = 0.0;
        for (size_t j = 0; j < up.x.size(); ++j)
            gap = std::max(gap, std::abs(up.y[j] - lo.y[j]));
        M.stage_gaps.push_back(gap);
    }
    M.gap = M.stage_gaps.empty() ? 0.0 : M.stage_gaps.back();
    if (M.gap > tol_rel) throw std::invalid_argument("stable squeeze did not converge");
    M.curve = up;
    return M;
}

double StableManifold::eval_y(double x) const {
    if (exact_horizontal) return y_const;
    return curve.eval_y(x);
}

BracketResult bracket(const CriticalFrame& f, const SymbolWord& m, const SymbolWord& mp) {
    const ParamSet& p = f.params();
    BracketResult res;
    StableManifold S = stable_manifold_local(f, mp);

    bool back_all7 = true;
    for (int j = 1; j <= m.back; ++j)
        if (m.sym(-j) != 7) back_all7 = false;
    bool is_fxi_pattern = m.back >= 1 && m.sym(-1) == 4;
    for (int j = 2; j <= m.back && is_fxi_pattern; ++j)
        if (m.sym(-j) != 7) is_fxi_pattern = false;

    if (is_fxi_pattern) {
        // Unstable leaf through the critical value: the cubic arc.
        double level = S.eval_y(f.f_xi().x) - f.f_xi().y;
        double scale = std::max(std::abs(level), p.c * std::pow(p.beta_max, 3.0));
        if (std::abs(level) <= 1e-10 * scale) {
            res.point = f.f_xi();
            res.tangential = true;
            return res;
        }
        // solve -c y^3 = level exactly on the arc
        double y = -std::cbrt(level / p.c);
        res.point = {f.f_xi().x - p.eps1 * y, f.f_xi().y - p.c * y * y * y};
        return res;
    }
    if (back_all7) {
        double xc = decode(f, m).point.x;
        res.point = {xc, S.eval_y(xc)};
        return res;
    }
    UnstableManifold U = unstable_manifold_local(f, m);
    double lo = 0.0, hi = 1.0;
    auto h = [&](double y) { return S.eval_y(U.eval_x(y)) - y; };
    // Restrict to heights the manifold reaches.
    for (int it = 0; it < 60; ++it) {
        try {
            U.eval_x(lo);
            break;
        } catch (const std::domain_error&) {
            lo += 1e-3;
        }
    }
    for (int it = 0; it < 60; ++it) {
        try {
            U.eval_x(hi);
            break;
        } catch (const std::domain_error&) {
            hi -= 1e-3;
        }
    }
    double flo = h(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = h(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double y = 0.5 * (lo + hi);
    res.point = {U.eval_x(y), y};
    return res;
}

TangencyReport tangency_order(const CriticalFrame& f) {
    const ParamSet& p = f.params();
    TangencyReport rep;
    rep.a3_expected = p.c / (p.eps1 * p.eps1 * p.eps1);

    // Stable leaf of F(xi): exact horizontal (the forward orbit avoids the
    // critical rectangle).
    std::vector<int> syms;
    for (int j = 0; j < p.n_c + 4; ++j) syms.push_back(7);
    syms.push_back(4);
    for (int j = 0; j <= 30; ++j) syms.push_back(itinerary_symbol(p.itinerary, j));
    SymbolWord fxi_word(syms, p.n_c + 5);
    StableManifold S = stable_manifold_local(f, fxi_word);
    double level = S.eval_y(f.f_xi().x);

    auto delta = [&](double u) {
        double y = -u / p.eps1;
        auto img = f.apply({0.0, p.xi2 + y}, 0.0);
        return as_pt(img).y - level;
    };
    const double U = p.eps1 * p.beta_max;
    // cubic coefficient by least squares over a symmetric grid
    double su6 = 0.0, sdu3 = 0.0;
    for (int i = -20; i <= 20; ++i) {
        if (i == 0) continue;
        double u = U * i / 20.0;
        double d = delta(u);
        su6 += std::pow(u, 6);
        sdu3 += d * u * u * u;
    }
    rep.a3 = sdu3 / su6;

    auto d1 = [&](double h) { return (delta(h) - delta(-h)) / (2.0 * h); };
    auto d2 = [&](double h) { return (delta(h) - 2.0 * delta(0.0) + delta(-h)) / (h * h); };
    double h = U / 2.0;
    double r1 = (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
    double r2 = (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
    rep.d1_residual = std::abs(r1) / (std::abs(rep.a3) * U * U);
    rep.d2_residual = std::abs(r2) / (std::abs(rep.a3) * U);
    double third = 6.0 * rep.a3;
    rep.order = (rep.d1_residual < 1e-8 && rep.d2_residual < 1e-8 && third != 0.0) ? 3 : 0;
    return rep;
}

double tangency_crossing_angle(const CriticalFrame& f, double theta) {
    const ParamSet& p = f.params();
    // Leaf level of F_theta(xi) is unchanged (same image point, linear future).
    double level = f.f_xi().y;
    auto delta = [&](double u) {
        double y = -u / p.eps1;
        auto img = f.apply({0.0, p.xi2 + y}, theta);
        return as_pt(img).y - level;
    };
    const double U = p.eps1 * p.beta_max;
    auto d1 = [&](double h) { return (delta(h) - delta(-h)) / (2.0 * h); };
    double h = U / 4.0;
    double slope = (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
    return std::atan(std::abs(slope));
}

std::string TangencyReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"order\":" << order << ",\"a3\":" << a3 << ",\"a3_expected\":" << a3_expected
       << ",\"d1_residual\":" << d1_residual << ",\"d2_residual\":" << d2_residual << "}";
    return os.str();
}

}  // namespace horseshoe
