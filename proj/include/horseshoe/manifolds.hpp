#pragma once

#include <random>

#include "horseshoe/symbolic.hpp"

namespace horseshoe {

// Chebyshev-Lobatto sampled graph with barycentric evaluation.
struct ChebGraph {
    std::vector<double> t;   // ascending nodes
    std::vector<double> v;   // values
    std::vector<double> wts; // barycentric weights

    static std::vector<double> lobatto_nodes(double a, double b, int n);
    void build_weights();
    double eval(double at) const;
};

// Vertical graph x(y) across the critical rectangle, y as offset from xi2.
struct VerticalCurve {
    std::vector<double> y;    // ascending offsets in [-beta, beta]
    std::vector<double> x;    // x(y) >= 0
    std::vector<double> dx;   // x'(y)
    std::vector<double> ddx;  // x''(y)

    double eval_x(double yo) const;
    double eval_dx(double yo) const;
    double eval_ddx(double yo) const;
};

struct FamilyViolation {
    bool ok = true;
    double worst_slope_excess = -kInf;     // |x'| - (3y^2+x)/(6 beta)
    double worst_curvature_excess = -kInf; // |x''| - D
};

VerticalCurve vertical_edge_curve(const CriticalFrame& f, double x0, int n_nodes = 33);
FamilyViolation curve_in_family(const CriticalFrame& f, const VerticalCurve& c);
VerticalCurve random_family_curve(const CriticalFrame& f, std::mt19937_64& rng,
                                  int n_nodes = 33);

// First-return graph transform of the vertical family: applies the cubic, the
// word's affine steps, and regraphs the returned component over the rectangle.
// Derivatives follow the inverse-function formulas of the return composition.
VerticalCurve unstable_graph_transform(const CriticalFrame& f, const VerticalCurve& c,
                                       const std::vector<int>& return_word,
                                       double theta = 0.0);

// Pointwise check of the slope transfer bound along a transformed curve:
// 2 lambda^n eps1 / (R c (3y^2+x)) <= (3Y^2 + X)/(6 beta) at each sample.
bool slope_transfer_bound(const CriticalFrame& f, const VerticalCurve& in,
                          const VerticalCurve& out, const std::vector<int>& return_word);

struct CurveGraph {
    std::vector<double> t, xs, ys, slope;
};

class UnstableManifold {
  public:
    bool exact_vertical = false;
    double x_const = 0.0;
    VerticalCurve core;            // curve at the last backward visit
    std::vector<int> push_word;    // forward word from the visit to the base point
    double gap = 0.0;              // bracketing gap at the core
    const CriticalFrame* frame = nullptr;

    // x-coordinate of the manifold at absolute height y (root solve through
    // the push composition).
    double eval_x(double y_abs) const;
    CurveGraph sample(int n = 200) const;
};

UnstableManifold unstable_manifold_local(const CriticalFrame& f, const SymbolWord& word,
                                         double tol_rel = 1e-10);

struct HorizontalCurve {
    std::vector<double> x;  // ascending nodes
    std::vector<double> y;
    std::vector<double> dy;
    double eval_y(double at) const;
    double eval_dy(double at) const;
};

class StableManifold {
  public:
    bool exact_horizontal = false;
    double y_const = 0.0;
    HorizontalCurve curve;
    double gap = 0.0;
    std::vector<double> stage_gaps;  // contraction record of the squeeze

    double eval_y(double x) const;
};

StableManifold stable_manifold_local(const CriticalFrame& f, const SymbolWord& word,
                                     double tol_rel = 1e-10);

struct BracketResult {
    Vec2 point{};
    bool tangential = false;
};

BracketResult bracket(const CriticalFrame& f, const SymbolWord& m, const SymbolWord& mp);

struct TangencyReport {
    int order = 0;
    double a3 = 0.0;
    double a3_expected = 0.0;
    double d1_residual = 0.0;  // normalized first-derivative residual at contact
    double d2_residual = 0.0;
    std::string to_json() const;
};

TangencyReport tangency_order(const CriticalFrame& f);

// Crossing angle between F_theta(W^u(xi)) and the stable leaf of F(xi).
double tangency_crossing_angle(const CriticalFrame& f, double theta);

}  // namespace horseshoe
