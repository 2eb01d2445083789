#pragma once

#include <functional>

#include "horseshoe/symbolic.hpp"

namespace horseshoe {

// Potential evaluated on finite forward words (depth-m cylinder approximation).
struct Potential {
    std::function<double(const std::vector<int>&)> f;
    double operator()(const std::vector<int>& w) const { return f(w); }

    static Potential zero();
    static Potential constant(double kappa);
    // -t * log(vertical rate of the first symbol): Hoelder, constant on
    // depth-1 cylinders.
    static Potential rate(const ParamSet& p, double t);
};

// Enumeration of admissible depth-m words: id = (first symbol - 1) * 3^{m-1}
// + successor choices in base 3.
class WordSpace {
  public:
    WordSpace(int depth);
    int depth() const { return m_; }
    long size() const { return n_; }
    std::vector<int> word(long id) const;
    long id_of(const std::vector<int>& w) const;
    // State reached by dropping the last symbol and prepending s.
    long prepend(long id, int s) const;
    int first_symbol(long id) const;

  private:
    int m_;
    long n_;
    long pow3_;
};

// (L h)(w) = sum over admissible predecessors s of e^{phi(s w...)} h(s w...),
// truncated at depth m.
std::vector<double> transfer_apply(const WordSpace& ws, const Potential& phi,
                                   const std::vector<double>& h);
std::vector<double> transfer_apply_adjoint(const WordSpace& ws, const Potential& phi,
                                           const std::vector<double>& nu);

struct PressureResult {
    double value = 0.0;          // log of the dominant eigenvalue
    double residual = 0.0;       // eigenvalue equation residual
    int iterations = 0;
    std::vector<double> eigvec;  // right eigenvector, positive, sup-norm 1
};

PressureResult pressure(const Potential& phi, int m, double tol = 1e-12,
                        int max_iter = 200000, unsigned seed = 0);

struct CylinderMeasure {
    int depth = 0;
    std::vector<double> weights;  // indexed by WordSpace id, sums to 1

    double total() const;
    // Marginal onto depth-1-shorter words by dropping the last symbol.
    std::vector<double> front_marginal(const WordSpace& ws) const;
    // Marginal by dropping the first symbol (shift direction).
    std::vector<double> back_marginal(const WordSpace& ws) const;
};

struct EquilibriumResult {
    CylinderMeasure measure;
    double pressure = 0.0;
    double entropy = 0.0;
    double phi_integral = 0.0;
    double variational_defect = 0.0;  // |h + int(phi) - P|
};

EquilibriumResult equilibrium_measure(const Potential& phi, int m, double tol = 1e-12);

struct WeightedPoint {
    Vec2 pos;
    double weight = 0.0;
    double diam = 0.0;
};

std::vector<WeightedPoint> push_to_lambda(const CriticalFrame& f, const CylinderMeasure& mu);

}  // namespace horseshoe
