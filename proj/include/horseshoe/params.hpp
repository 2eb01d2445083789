#pragma once

#include <functional>
#include <string>
#include <vector>

namespace horseshoe {

// Forward itinerary of the critical value xi' = F0(xi): symbol at position j >= 0.
// Must avoid rectangles 4 and 7 and visit {5,6} and {1,2,3} infinitely often.
using ItineraryFn = std::function<int(int)>;

enum class ItineraryKind { Periodic816, AperiodicBlocks };

int itinerary_symbol(ItineraryKind kind, int j);

struct ParamSet;

// Symbol of the critical point's forward itinerary at position j >= 0
// (position 0 is rectangle 4; positions j >= 1 follow the critical value).
int xi_symbol(const ParamSet& p, int j);
// Vertical expansion rate attached to a symbol's stripe.
double symbol_rate(const ParamSet& p, int symbol);
// prod_{j=0}^{k-1} rate(xi_j)^{-1}.
double xi_band_scale(const ParamSet& p, int k);

// Full parameter ledger of the construction. Immutable after construction;
// every operation on it is pure.
struct ParamSet {
    double lambda = 0.0;   // horizontal contraction, in (0, 1/3)
    double sigma = 0.0;    // vertical expansion on rows 2-3 (R4..R9), > 3
    double rho = 0.0;      // vertical expansion on the top row (R1,R2,R3), > 3
    double d = 0.0;        // gap between first-generation rectangles
    double l0 = 0.0;       // rectangle side
    double c = 0.0;        // cubic coefficient, > 1
    double b = 0.0;        // linear coefficient, = 2 c beta_max
    double eps1 = 0.0;     // horizontal factor of the cubic map, in (0,1)
    double A = 0.0;        // cone-slope constant, = c / (8 eps1)
    double beta_max = 0.0; // critical-region half-height
    double alpha_max = 0.0;// critical-region width, = l0 lambda^{n_c}
    double theta = 0.0;    // straightening parameter (default 0)
    int n_c = 0;
    int k_c = 0;
    int k1 = 0;            // sigma-visits at positions 1..k_c of xi's itinerary
    int k2 = 0;            // rho-visits at positions 1..k_c
    double D = 0.0;        // curvature bound of the invariant vertical family
    double xi2 = 0.0;      // vertical coordinate of the critical point xi = (0, xi2)
    double Delta = 0.0;    // max |det DF| over the affine zones and the cubic core
    ItineraryKind itinerary = ItineraryKind::Periodic816;
    bool solver_normalized = false;

    int rate_is_top(int) const; // helper, see basemap
    std::string to_kv() const;
    std::string to_json() const;
    static ParamSet from_kv(const std::string& text);
};

struct SolverHints {
    double sigma = 40.0;
    double rho = 30.0;
    double lambda = 0.0;   // 0 -> sigma^{-1.1}
    int k_c = 0;           // 0 -> minimal admissible
    ItineraryKind itinerary = ItineraryKind::Periodic816;
    double margin_big = 2.0;
};

struct ConditionEntry {
    std::string id;        // e.g. "1a", "4b", "lambda<1/3"
    std::string equation;  // condition family label, e.g. "1", "4"
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct ConditionReport {
    std::vector<ConditionEntry> entries;

    bool pass() const;
    const ConditionEntry* find(const std::string& id) const;
    std::string to_csv() const;
};

// Checks every inequality of the four condition systems plus the solver
// normalizations and the geometric containments of the critical frame.
ConditionReport validate(const ParamSet& p);

// Synthesizes an admissible parameter set from rate hints, following the
// order: grid; beta_max; c; b; n_c and alpha_max; eps1; A; D.
ParamSet solve_params(const SolverHints& hints);

// max |det DF| over the square: affine zones, the cubic core, and a sampled
// bound over the glue collars. Must be < 1.
double max_abs_det(const ParamSet& p);

// Remark-2.2-style refreshes; outputs still pass validate() within the
// documented factor-2 window.
ParamSet refresh_increase_c(const ParamSet& p, double factor);
ParamSet refresh_decrease_eps1(const ParamSet& p, double factor);

}  // namespace horseshoe
