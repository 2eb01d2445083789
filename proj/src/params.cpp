#include "horseshoe/params.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "horseshoe/basemap.hpp"

namespace horseshoe {

int xi_symbol(const ParamSet& p, int j) {
    return j == 0 ? 4 : itinerary_symbol(p.itinerary, j - 1);
}

double symbol_rate(const ParamSet& p, int symbol) {
    return rect_row(symbol) == 1 ? p.rho : p.sigma;
}

double xi_band_scale(const ParamSet& p, int k) {
    double v = 1.0;
    for (int j = 0; j < k; ++j) v /= symbol_rate(p, xi_symbol(p, j));
    return v;
}

namespace {

constexpr double kEqTol = 1e-9;

void count_visits(const ParamSet& p, int k_c, int& k1, int& k2) {
    k1 = 0;
    k2 = 0;
    for (int j = 1; j <= k_c; ++j) {
        if (rect_row(xi_symbol(p, j)) == 1)
            ++k2;
        else
            ++k1;
    }
}

ConditionEntry lt(std::string id, std::string family, double lhs, double rhs) {
    ConditionEntry e{std::move(id), std::move(family), lhs, rhs, rhs - lhs, false};
    e.pass = e.margin > 0.0;
    return e;
}

ConditionEntry eq(std::string id, std::string family, double lhs, double rhs) {
    double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    ConditionEntry e{std::move(id), std::move(family), lhs, rhs,
                     kEqTol - std::abs(lhs - rhs) / scale, false};
    e.pass = e.margin > 0.0;
    return e;
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite field: ") + name);
}

}  // namespace

bool ConditionReport::pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return !entries.empty();
}

const ConditionEntry* ConditionReport::find(const std::string& id) const {
    for (const auto& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

std::string ConditionReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "id,equation,lhs,rhs,margin,pass\n";
    for (const auto& e : entries)
        os << e.id << "," << e.equation << "," << e.lhs << "," << e.rhs << "," << e.margin << ","
           << (e.pass ? 1 : 0) << "\n";
    return os.str();
}

ConditionReport validate(const ParamSet& p) {
    require_finite(p.lambda, "lambda");
    require_finite(p.sigma, "sigma");
    require_finite(p.rho, "rho");
    require_finite(p.d, "d");
    require_finite(p.l0, "l0");
    require_finite(p.c, "c");
    require_finite(p.b, "b");
    require_finite(p.eps1, "eps1");
    require_finite(p.A, "A");
    require_finite(p.beta_max, "beta_max");
    require_finite(p.alpha_max, "alpha_max");
    require_finite(p.D, "D");
    require_finite(p.xi2, "xi2");
    require_finite(p.Delta, "Delta");
    if (p.n_c <= 0) throw std::invalid_argument("non-positive field: n_c");
    if (p.k_c <= 0) throw std::invalid_argument("non-positive field: k_c");
    if (p.k1 < 0 || p.k2 < 0) throw std::invalid_argument("non-positive field: k1/k2");

    ConditionReport rep;
    auto& E = rep.entries;
    const double lam = p.lambda, sig = p.sigma, rho = p.rho, d = p.d, l0 = p.l0;
    const double beta = p.beta_max, alpha = p.alpha_max, c = p.c, e1 = p.eps1;

    const double r1 = std::log(lam) / std::log(rho);
    const double r2 = std::log(lam) / std::log(sig);
    E.push_back(lt("1a", "1", -1.2, r1));
    E.push_back(lt("1b", "1", r1, r2));
    E.push_back(lt("1c", "1", r2, -1.0));
    E.push_back(lt("lambda<1/3", "1", lam, 1.0 / 3.0));
    E.push_back(lt("sigma>3", "1", 3.0, sig));
    E.push_back(lt("rho>3", "1", 3.0, rho));
    E.push_back(lt("sigma>rho", "1", rho, sig));
    E.push_back(lt("lambda*sigma<1", "1", lam * sig, 1.0));
    E.push_back(lt("lambda*rho<1", "1", lam * rho, 1.0));

    E.push_back(eq("grid-closure", "grid", 3.0 * l0 + 2.0 * d, 1.0));
    E.push_back(eq("grid-cover", "grid", rho * l0, 1.0));

    int k1 = 0, k2 = 0;
    count_visits(p, p.k_c, k1, k2);
    E.push_back(eq("k1+k2=kc", "3", static_cast<double>(p.k1 + p.k2), static_cast<double>(p.k_c)));
    E.push_back(eq("k1-count", "3", static_cast<double>(p.k1), static_cast<double>(k1)));
    const double scale3 = std::pow(sig, -p.k1) * std::pow(rho, -p.k2);
    E.push_back(lt("3a-lo", "3", l0 * scale3, beta));
    E.push_back(lt("3a-hi", "3", beta, d * scale3));
    E.push_back(eq("3b", "3", alpha, l0 * std::pow(lam, p.n_c)));

    // Geometric containments of the critical frame (conditions (3)).
    BaseMap base(p);
    std::vector<int> xs;
    for (int j = 0; j <= p.k_c + 2; ++j) xs.push_back(xi_symbol(p, j));
    Interval band_inner = base.forward_band(xs, p.k_c + 1);  // vertical extent of G^{nc+1,kc+1}(xi)
    Interval band_outer = base.forward_band(xs, p.k_c);      // vertical extent of G^{nc,kc}(xi)
    Interval ry{p.xi2 - beta, p.xi2 + beta};
    E.push_back(lt("3-geo-inner-y", "3", 0.0,
                   std::min(band_inner.lo - ry.lo, ry.hi - band_inner.hi) / beta));
    E.push_back(lt("3-geo-outer-y", "3", 0.0,
                   std::min(ry.lo - band_outer.lo, band_outer.hi - ry.hi) / beta));
    E.push_back(lt("3-geo-inner-x", "3", std::pow(lam, p.n_c + 1), alpha));
    E.push_back(lt("3-geo-outer-x", "3", alpha, std::pow(lam, p.n_c)));

    // No other rectangle of generation (nc+1, kc+1) meets r: nearest sibling
    // bands (other rows at position kc+1) and nearest sibling strips (pasts
    // with a non-7 symbol).
    {
        double vm = kInf;
        int succ_base = xi_symbol(p, p.k_c);
        for (int srow = 1; srow <= 3; ++srow) {
            int sib = (srow - 1) * 3 + target_col(rect_row(succ_base));
            if (sib == xi_symbol(p, p.k_c + 1)) continue;
            auto xs2 = xs;
            xs2[static_cast<size_t>(p.k_c + 1)] = sib;
            Interval bs = base.forward_band(xs2, p.k_c + 1);
            if (bs.is_empty()) continue;
            double dist = bs.lo > ry.hi ? bs.lo - ry.hi : ry.lo - bs.hi;
            vm = std::min(vm, dist / beta);
        }
        E.push_back(lt("3-geo-sibling-y", "3", 0.0, vm));
        double hm = kInf;
        for (int depth = 1; depth <= p.n_c + 1; ++depth) {
            for (int first : {8, 9}) {
                std::vector<int> past;
                past.push_back(first);
                for (int j = 1; j < depth; ++j) past.push_back(7);
                Interval strip = base.backward_strip(past);
                hm = std::min(hm, (strip.lo - alpha) / alpha);
            }
        }
        E.push_back(lt("3-geo-sibling-x", "3", 0.0, hm));
    }

    E.push_back(lt("4a-lo", "4", 1.0, 3.0 * c * beta));
    E.push_back(lt("4a-hi", "4", 3.0 * c * beta, 1.0 / e1));
    E.push_back(eq("4b", "4", p.b, 2.0 * c * beta));
    E.push_back(lt("4c", "4", 2.0, p.A * d * e1 / (3.0 * c * beta)));
    E.push_back(eq("4d", "4", p.A, c / (8.0 * e1)));
    E.push_back(lt("4d-big", "4", 2.0, p.A));

    const double rhs5a = (2.0 * d / 3.0) * std::pow(sig, 1 - p.k1) * std::pow(rho, -p.k2);
    const double cb3 = c * beta * beta * beta;
    E.push_back(lt("5a-lo", "5", cb3, rhs5a));
    E.push_back(lt("5a-hi", "5", cb3 + 3.0 * c * beta * alpha, rhs5a));
    E.push_back(lt("5b", "5", 2.0 * e1 * beta, l0 * std::pow(lam, p.n_c + 1)));
    // 5c (containment form): both boundary segments of F(r) stay inside the
    // vertical extent of the depth-kc survival stripe of F0(xi).
    {
        std::vector<int> xps;
        for (int j = 0; j <= p.k_c + 1; ++j) xps.push_back(itinerary_symbol(p.itinerary, j));
        Interval Jp = base.forward_band(xps, p.k_c);
        double fxi_y = base.branch(2).apply({0.0, p.xi2}).y;
        double up = cb3 + 3.0 * c * beta * alpha;  // highest image point of the bottom edge
        double dn = cb3;                           // lowest image point of the top edge
        E.push_back(lt("5c-up", "5", up, Jp.hi - fxi_y));
        E.push_back(lt("5c-dn", "5", dn, fxi_y - Jp.lo));
    }

    E.push_back(lt("6", "6", beta, (d / 2.0) * xi_band_scale(p, p.k_c) * (1.0 + kEqTol)));
    E.push_back(lt("7-lo", "7", lam * beta * beta / 10.0, alpha));
    E.push_back(lt("7-hi", "7", alpha, beta * beta / 10.0 * (1.0 + kEqTol)));
    E.push_back(eq("8", "8", c * beta * beta, 1.0));

    E.push_back(lt("eps1-a", "solver", 2.0 * e1 * beta, lam * alpha));
    E.push_back(lt("eps1-b", "solver", 15.0 * e1, beta));
    E.push_back(lt("eps1-c", "solver", e1 * beta * beta, 1.0 / 8.0));
    E.push_back(lt("eps1-band", "solver", 2.5 * e1 * beta, std::pow(lam, p.n_c + 2)));
    E.push_back(lt("18/(d^2 A)<1", "solver", 18.0 / (d * d * p.A), 1.0));
    E.push_back(lt("Delta<1", "solver", p.Delta, 1.0));
    E.push_back(lt("nc>5", "solver", 5.0, static_cast<double>(p.n_c)));
    E.push_back(eq("kc-itinerary", "solver",
                   static_cast<double>(rect_row(xi_symbol(p, p.k_c + 1))), 2.0));
    return rep;
}

ParamSet solve_params(const SolverHints& hints) {
    ParamSet p;
    p.sigma = hints.sigma;
    p.rho = hints.rho;
    p.lambda = hints.lambda > 0.0 ? hints.lambda : std::pow(hints.sigma, -1.1);
    p.itinerary = hints.itinerary;
    require_finite(p.sigma, "sigma");
    require_finite(p.rho, "rho");
    require_finite(p.lambda, "lambda");

    const double r1 = std::log(p.lambda) / std::log(p.rho);
    const double r2 = std::log(p.lambda) / std::log(p.sigma);
    if (!(-1.2 < r1 && r1 < r2 && r2 < -1.0))
        throw std::invalid_argument("hints violate the rate ordering (condition 1)");
    if (!(p.sigma > 3.0 && p.rho > 3.0 && p.lambda < 1.0 / 3.0))
        throw std::invalid_argument("hints violate the basic rate bounds");

    p.l0 = 1.0 / p.rho;
    p.d = 0.5 * (1.0 - 3.0 * p.l0);

    auto try_kc = [&](int k_c) -> bool {
        // The itinerary must put F0^{kc+1}(xi) in R5 or R6 (middle row).
        int sym = xi_symbol(p, k_c + 1);
        if (rect_row(sym) != 2) return false;
        p.k_c = k_c;
        count_visits(p, k_c, p.k1, p.k2);
        p.beta_max = 0.5 * p.d * xi_band_scale(p, k_c);
        p.c = 1.0 / (p.beta_max * p.beta_max);
        p.b = 2.0 * p.c * p.beta_max;
        const double bracket_hi = p.beta_max * p.beta_max / (10.0 * p.l0);
        double n_real = std::log(bracket_hi) / std::log(p.lambda);
        int n_c = static_cast<int>(std::ceil(n_real - 1e-12));
        if (!(std::pow(p.lambda, n_c) <= bracket_hi &&
              std::pow(p.lambda, n_c) > p.lambda * bracket_hi))
            return false;  // no integer in the bracket at this scale
        if (n_c <= 5) return false;
        p.n_c = n_c;
        p.alpha_max = p.l0 * std::pow(p.lambda, n_c);
        double e1 = std::min({p.lambda * p.alpha_max / (2.0 * p.beta_max),
                              p.beta_max / 15.0,
                              1.0 / (8.0 * p.beta_max * p.beta_max),
                              std::pow(p.lambda, n_c + 2) / (2.5 * p.beta_max)});
        p.eps1 = 0.5 * e1;
        if (!(p.eps1 > 0.0) || !std::isfinite(p.eps1)) return false;
        p.A = p.c / (8.0 * p.eps1);
        const double d3 = p.d * p.d * p.d;
        double slope = (8.0 * 81.0 / d3) * p.beta_max * p.beta_max * p.eps1;
        double D0 = (8.0 * 3.0 * 7.0 * (19.0 * p.beta_max * p.beta_max + p.alpha_max) / d3) *
                    p.eps1 / (1.0 - slope);
        p.D = std::max(1.0, 10.0 * D0);
        p.Delta = std::max({p.lambda * p.sigma, p.lambda * p.rho,
                            3.0 * p.eps1 * p.c * p.beta_max});
        BaseMap base(p);
        std::vector<int> xs;
        for (int j = 0; j <= k_c + 2; ++j) xs.push_back(xi_symbol(p, j));
        Interval band = base.forward_band(xs, k_c + 1);
        if (band.is_empty()) return false;
        p.xi2 = band.center();
        p.solver_normalized = true;
        return validate(p).pass();
    };

    if (hints.k_c > 0) {
        if (!try_kc(hints.k_c))
            throw std::invalid_argument(
                "k_c incompatible with the itinerary constraint or the n_c bracket");
        return p;
    }
    for (int k_c = 2; k_c <= 90; ++k_c) {
        if (try_kc(k_c)) return p;
    }
    throw std::invalid_argument("no admissible k_c <= 90 for these hints");
}

ParamSet refresh_increase_c(const ParamSet& p, double factor) {
    ParamSet q = p;
    q.c = p.c * factor;
    q.beta_max = 1.0 / std::sqrt(q.c);
    q.b = 2.0 * q.c * q.beta_max;
    q.A = q.c / (8.0 * q.eps1);
    q.Delta = std::max({q.lambda * q.sigma, q.lambda * q.rho,
                        3.0 * q.eps1 * q.c * q.beta_max});
    q.solver_normalized = false;
    return q;
}

ParamSet refresh_decrease_eps1(const ParamSet& p, double factor) {
    ParamSet q = p;
    q.eps1 = p.eps1 / factor;
    q.A = q.c / (8.0 * q.eps1);
    q.Delta = std::max({q.lambda * q.sigma, q.lambda * q.rho,
                        3.0 * q.eps1 * q.c * q.beta_max});
    q.solver_normalized = false;
    return q;
}

std::string ParamSet::to_kv() const {
    std::ostringstream os;
    os.precision(17);
    os << "lambda=" << lambda << "\nsigma=" << sigma << "\nrho=" << rho << "\nd=" << d
       << "\nl0=" << l0 << "\nc=" << c << "\nb=" << b << "\neps1=" << eps1 << "\nA=" << A
       << "\nbeta_max=" << beta_max << "\nalpha_max=" << alpha_max << "\ntheta=" << theta
       << "\nn_c=" << n_c << "\nk_c=" << k_c << "\nk1=" << k1 << "\nk2=" << k2 << "\nD=" << D
       << "\nxi2=" << xi2 << "\nDelta=" << Delta
       << "\nitinerary=" << (itinerary == ItineraryKind::Periodic816 ? "periodic816" : "aperiodic")
       << "\nsolver_normalized=" << (solver_normalized ? 1 : 0) << "\n";
    return os.str();
}

std::string ParamSet::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"lambda\":" << lambda << ",\"sigma\":" << sigma << ",\"rho\":" << rho
       << ",\"d\":" << d << ",\"l0\":" << l0 << ",\"c\":" << c << ",\"b\":" << b
       << ",\"eps1\":" << eps1 << ",\"A\":" << A << ",\"beta_max\":" << beta_max
       << ",\"alpha_max\":" << alpha_max << ",\"theta\":" << theta << ",\"n_c\":" << n_c
       << ",\"k_c\":" << k_c << ",\"k1\":" << k1 << ",\"k2\":" << k2 << ",\"D\":" << D
       << ",\"xi2\":" << xi2 << ",\"Delta\":" << Delta << ",\"itinerary\":\""
       << (itinerary == ItineraryKind::Periodic816 ? "periodic816" : "aperiodic") << "\"}";
    return os.str();
}

ParamSet ParamSet::from_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto pos = line.find('=');
        if (pos == std::string::npos) continue;
        kv[line.substr(0, pos)] = line.substr(pos + 1);
    }
    ParamSet p;
    auto getd = [&](const char* k) -> double {
        auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument(std::string("missing field: ") + k);
        return std::stod(it->second);
    };
    p.lambda = getd("lambda");
    p.sigma = getd("sigma");
    p.rho = getd("rho");
    p.d = getd("d");
    p.l0 = getd("l0");
    p.c = getd("c");
    p.b = getd("b");
    p.eps1 = getd("eps1");
    p.A = getd("A");
    p.beta_max = getd("beta_max");
    p.alpha_max = getd("alpha_max");
    p.theta = getd("theta");
    p.n_c = static_cast<int>(getd("n_c"));
    p.k_c = static_cast<int>(getd("k_c"));
    p.k1 = static_cast<int>(getd("k1"));
    p.k2 = static_cast<int>(getd("k2"));
    p.D = getd("D");
    p.xi2 = getd("xi2");
    p.Delta = getd("Delta");
    if (kv.count("itinerary"))
        p.itinerary = kv["itinerary"] == "aperiodic" ? ItineraryKind::AperiodicBlocks
                                                     : ItineraryKind::Periodic816;
    if (kv.count("solver_normalized")) p.solver_normalized = kv["solver_normalized"] == "1";
    return p;
}

int ParamSet::rate_is_top(int symbol) const { return rect_row(symbol) == 1 ? 1 : 0; }

}  // namespace horseshoe
