#include "horseshoe/thermo.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace horseshoe {

Potential Potential::zero() {
    Potential p;
    p.f = [](const std::vector<int>&) { return 0.0; };
    return p;
}

Potential Potential::constant(double kappa) {
    Potential p;
    p.f = [kappa](const std::vector<int>&) { return kappa; };
    return p;
}

Potential Potential::rate(const ParamSet& ps, double t) {
    double lr = std::log(ps.rho), ls = std::log(ps.sigma);
    Potential p;
    p.f = [lr, ls, t](const std::vector<int>& w) {
        return -t * (rect_row(w.front()) == 1 ? lr : ls);
    };
    return p;
}

WordSpace::WordSpace(int depth) : m_(depth) {
    if (depth < 2) throw std::invalid_argument("word space needs depth >= 2");
    pow3_ = 1;
    for (int i = 1; i < depth; ++i) pow3_ *= 3;
    n_ = 9 * pow3_;
}

std::vector<int> WordSpace::word(long id) const {
    std::vector<int> w(static_cast<size_t>(m_));
    long choices = id % pow3_;
    int first = static_cast<int>(id / pow3_) + 1;
    w[0] = first;
    long div = pow3_ / 3;
    for (int i = 1; i < m_; ++i) {
        int c = static_cast<int>((choices / div) % 3);
        w[static_cast<size_t>(i)] =
            BaseMap::successors(w[static_cast<size_t>(i - 1)])[static_cast<size_t>(c)];
        div = div == 1 ? 1 : div / 3;
    }
    return w;
}

long WordSpace::id_of(const std::vector<int>& w) const {
    if (static_cast<int>(w.size()) != m_) throw std::invalid_argument("word length mismatch");
    long id = static_cast<long>(w[0] - 1) * pow3_;
    long div = pow3_ / 3;
    for (int i = 1; i < m_; ++i) {
        auto succ = BaseMap::successors(w[static_cast<size_t>(i - 1)]);
        int c = -1;
        for (int k = 0; k < 3; ++k)
            if (succ[static_cast<size_t>(k)] == w[static_cast<size_t>(i)]) c = k;
        if (c < 0) throw std::invalid_argument("inadmissible word");
        id += c * div;
        div = div == 1 ? 1 : div / 3;
    }
    return id;
}

long WordSpace::prepend(long id, int s) const {
    std::vector<int> w = word(id);
    std::vector<int> v(static_cast<size_t>(m_));
    v[0] = s;
    for (int i = 1; i < m_; ++i) v[static_cast<size_t>(i)] = w[static_cast<size_t>(i - 1)];
    return id_of(v);
}

int WordSpace::first_symbol(long id) const { return static_cast<int>(id / pow3_) + 1; }

std::vector<double> transfer_apply(const WordSpace& ws, const Potential& phi,
                                   const std::vector<double>& h) {
    std::vector<double> out(static_cast<size_t>(ws.size()), 0.0);
    for (long id = 0; id < ws.size(); ++id) {
        double acc = 0.0;
        int first = ws.first_symbol(id);
        for (int s : BaseMap::predecessors(first)) {
            long pid = ws.prepend(id, s);
            acc += std::exp(phi(ws.word(pid))) * h[static_cast<size_t>(pid)];
        }
        out[static_cast<size_t>(id)] = acc;
    }
    return out;
}

std::vector<double> transfer_apply_adjoint(const WordSpace& ws, const Potential& phi,
                                           const std::vector<double>& nu) {
    std::vector<double> out(static_cast<size_t>(ws.size()), 0.0);
    for (long id = 0; id < ws.size(); ++id) {
        int first = ws.first_symbol(id);
        for (int s : BaseMap::predecessors(first)) {
            long pid = ws.prepend(id, s);
            out[static_cast<size_t>(pid)] +=
                std::exp(phi(ws.word(pid))) * nu[static_cast<size_t>(id)];
        }
    }
    return out;
}

PressureResult pressure(const Potential& phi, int m, double tol, int max_iter,
                        unsigned seed) {
    WordSpace ws(m);
    PressureResult res;
    std::vector<double> h(static_cast<size_t>(ws.size()), 1.0);
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.5, 1.5);
        for (auto& v : h) v = u(rng);
    }
    double lam = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> hn = transfer_apply(ws, phi, h);
        double nrm = 0.0;
        for (double v : hn) nrm = std::max(nrm, std::abs(v));
        for (auto& v : hn) v /= nrm;
        lam = nrm;
        double resid = 0.0;
        std::vector<double> check = transfer_apply(ws, phi, hn);
        for (size_t i = 0; i < hn.size(); ++i)
            resid = std::max(resid, std::abs(check[i] - lam * hn[i]));
        res.iterations = it + 1;
        h = hn;
        if (resid / lam <= tol) {
            res.residual = resid / lam;
            break;
        }
        res.residual = resid / lam;
    }
    if (res.residual > tol) throw std::runtime_error("pressure: power iteration did not converge");
    res.value = std::log(lam);
    res.eigvec = h;
    return res;
}

double CylinderMeasure::total() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

std::vector<double> CylinderMeasure::front_marginal(const WordSpace& ws) const {
    WordSpace short_ws(depth - 1);
    std::vector<double> out(static_cast<size_t>(short_ws.size()), 0.0);
    for (long id = 0; id < ws.size(); ++id) {
        std::vector<int> w = ws.word(id);
        w.pop_back();
        out[static_cast<size_t>(short_ws.id_of(w))] += weights[static_cast<size_t>(id)];
    }
    return out;
}

std::vector<double> CylinderMeasure::back_marginal(const WordSpace& ws) const {
    WordSpace short_ws(depth - 1);
    std::vector<double> out(static_cast<size_t>(short_ws.size()), 0.0);
    for (long id = 0; id < ws.size(); ++id) {
        std::vector<int> w = ws.word(id);
        w.erase(w.begin());
        out[static_cast<size_t>(short_ws.id_of(w))] += weights[static_cast<size_t>(id)];
    }
    return out;
}

EquilibriumResult equilibrium_measure(const Potential& phi, int m, double tol) {
    WordSpace ws(m);
    PressureResult right = pressure(phi, m, tol);
    double lam = std::exp(right.value);

    // Left eigenvector by adjoint power iteration.
    std::vector<double> nu(static_cast<size_t>(ws.size()), 1.0);
    for (int it = 0; it < 200000; ++it) {
        std::vector<double> nn = transfer_apply_adjoint(ws, phi, nu);
        double nrm = 0.0;
        for (double v : nn) nrm = std::max(nrm, std::abs(v));
        for (auto& v : nn) v /= nrm;
        double resid = 0.0;
        std::vector<double> check = transfer_apply_adjoint(ws, phi, nn);
        for (size_t i = 0; i < nn.size(); ++i)
            resid = std::max(resid, std::abs(check[i] - lam * nn[i]));
        nu = nn;
        if (resid / lam <= tol) break;
    }

    EquilibriumResult res;
    res.pressure = right.value;
    res.measure.depth = m;
    res.measure.weights.resize(static_cast<size_t>(ws.size()));
    double total = 0.0;
    for (long id = 0; id < ws.size(); ++id) {
        double w = nu[static_cast<size_t>(id)] * right.eigvec[static_cast<size_t>(id)];
        res.measure.weights[static_cast<size_t>(id)] = w;
        total += w;
    }
    if (total <= 0.0) throw std::runtime_error("degenerate eigenvector");
    for (auto& w : res.measure.weights) w /= total;

    // Markov transition p(w -> sigma w . a) = e^{phi(w)} h(sigma w a) / (lam h(w))
    // evaluated through the prepend structure: entropy from conditional weights.
    // Using the chain rule on cylinders: h(mu) = -sum mu(wa) log(mu(wa)/mu(w)).
    WordSpace wsm(m);
    std::vector<double> front = res.measure.front_marginal(wsm);
    WordSpace short_ws(m - 1);
    double H = 0.0;
    for (long id = 0; id < wsm.size(); ++id) {
        double w = res.measure.weights[static_cast<size_t>(id)];
        if (w <= 0.0) continue;
        std::vector<int> word = wsm.word(id);
        word.pop_back();
        double parent = front[static_cast<size_t>(short_ws.id_of(word))];
        H -= w * std::log(w / parent);
    }
    res.entropy = H;
    double integral = 0.0;
    for (long id = 0; id < wsm.size(); ++id)
        integral += res.measure.weights[static_cast<size_t>(id)] * phi(wsm.word(id));
    res.phi_integral = integral;
    res.variational_defect = std::abs(res.entropy + integral - res.pressure);
    return res;
}

std::vector<WeightedPoint> push_to_lambda(const CriticalFrame& f, const CylinderMeasure& mu) {
    WordSpace ws(mu.depth);
    std::vector<WeightedPoint> cloud;
    cloud.reserve(static_cast<size_t>(ws.size()));
    for (long id = 0; id < ws.size(); ++id) {
        double w = mu.weights[static_cast<size_t>(id)];
        if (w <= 0.0) continue;
        SymbolWord word(ws.word(id), 0);
        Decoded d = decode(f, word);
        WeightedPoint wp;
        wp.pos = d.point;
        wp.weight = w;
        wp.diam = std::max(d.diam_x, d.diam_y);
        cloud.push_back(wp);
    }
    return cloud;
}

}  // namespace horseshoe
