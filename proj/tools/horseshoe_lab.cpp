#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "horseshoe/hyper.hpp"
#include "horseshoe/io.hpp"
#include "horseshoe/manifolds.hpp"
#include "horseshoe/parallel.hpp"
#include "horseshoe/thermo.hpp"

using namespace horseshoe;
namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config;
    std::string out = ".";
    unsigned long seed = 1;
    int threads = 0;
};

ParamSet load_params(const Common& c) {
    if (!c.config.empty()) {
        auto kv = parse_kv_file(c.config);
        if (kv.count("lambda")) return ParamSet::from_kv(read_file(c.config));
        SolverHints h;
        if (kv.count("sigma")) h.sigma = std::stod(kv["sigma"]);
        if (kv.count("rho")) h.rho = std::stod(kv["rho"]);
        if (kv.count("hint_lambda")) h.lambda = std::stod(kv["hint_lambda"]);
        if (kv.count("k_c")) h.k_c = std::stoi(kv["k_c"]);
        if (kv.count("itinerary") && kv["itinerary"] == "aperiodic")
            h.itinerary = ItineraryKind::AperiodicBlocks;
        return solve_params(h);
    }
    return solve_params(SolverHints{});
}

std::string out_path(const Common& c, const std::string& name) {
    fs::create_directories(c.out);
    return (fs::path(c.out) / name).string();
}

std::vector<double> theta_grid(const ParamSet& p) {
    double b2 = p.beta_max * p.beta_max;
    return {1e-6 * b2, 1e-4 * b2, 1e-2 * b2};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"horseshoe-lab: numerical laboratory for a cubic-tangency horseshoe family"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--config", c.config, "flat key=value config file");
    app.add_option("--seed", c.seed, "RNG seed");
    app.add_option("--threads", c.threads, "worker threads (0 = auto)");
    app.add_option("--out", c.out, "output directory");

    std::string potential_name = "zero";
    int depth = 8;
    int n_samples = 1000;
    int n_steps = 10000;
    int word_back = 20, word_fwd = 20;
    std::string word_text;
    double theta = -1.0;

    auto* solve = app.add_subcommand("solve-params", "synthesize an admissible parameter set");
    auto* validate_cmd = app.add_subcommand("validate", "condition report for a parameter set");
    auto* orbit_cmd = app.add_subcommand("orbit", "critical orbit dump");
    orbit_cmd->add_option("--steps", n_steps, "forward steps");
    auto* cones_cmd = app.add_subcommand("cones-sweep", "cone invariance margins over decoded points");
    cones_cmd->add_option("--samples", n_samples);
    auto* lyap_cmd = app.add_subcommand("lyapunov", "finite-time unstable exponents");
    lyap_cmd->add_option("--samples", n_samples);
    lyap_cmd->add_option("--steps", n_steps);
    auto* tube_cmd = app.add_subcommand("tube-check", "tube expansion certificates");
    tube_cmd->add_option("--samples", n_samples);
    auto* dbl_cmd = app.add_subcommand("doubling", "uniform doubling time over the theta grid");
    dbl_cmd->add_option("--theta", theta, "single theta (default: sweep the grid)");
    auto* mani_cmd = app.add_subcommand("manifolds", "graph transform family closure sweep");
    mani_cmd->add_option("--samples", n_samples);
    auto* tang_cmd = app.add_subcommand("tangency", "tangency order and theta transversality");
    auto* code_cmd = app.add_subcommand("code", "itinerary of a point");
    code_cmd->add_option("--x", c.seed, "unused placeholder")->group("");
    double px = 0.0, py = 0.0;
    code_cmd->add_option("--px", px, "point x");
    code_cmd->add_option("--py", py, "point y");
    code_cmd->add_option("--back", word_back);
    code_cmd->add_option("--fwd", word_fwd);
    auto* dec_cmd = app.add_subcommand("decode", "point of a word");
    dec_cmd->add_option("--word", word_text, "digit word with '.' split")->required();
    auto* exp_cmd = app.add_subcommand("expansivity", "separation check over decoded pairs");
    exp_cmd->add_option("--samples", n_samples);
    auto* hol_cmd = app.add_subcommand("holder", "empirical Hoelder modulus");
    hol_cmd->add_option("--samples", n_samples);
    auto* pres_cmd = app.add_subcommand("pressure", "pressure of a potential");
    pres_cmd->add_option("--potential", potential_name, "zero|const:<v>|rate:<t>");
    pres_cmd->add_option("--depth", depth);
    auto* equi_cmd = app.add_subcommand("equilibrium", "equilibrium state of a potential");
    equi_cmd->add_option("--potential", potential_name);
    equi_cmd->add_option("--depth", depth);

    CLI11_PARSE(app, argc, argv);

    try {
        ParamSet p = load_params(c);
        std::mt19937_64 rng(c.seed);

        if (solve->parsed()) {
            write_file_atomic(out_path(c, "params.kv"), p.to_kv());
            write_file_atomic(out_path(c, "params.json"), p.to_json());
            ConditionReport rep = validate(p);
            write_file_atomic(out_path(c, "conditions.csv"), rep.to_csv());
            std::cout << (rep.pass() ? "PASS" : "FAIL") << " " << rep.entries.size()
                      << " conditions\n";
            return rep.pass() ? 0 : 1;
        }
        if (validate_cmd->parsed()) {
            ConditionReport rep = validate(p);
            write_file_atomic(out_path(c, "conditions.csv"), rep.to_csv());
            for (const auto& e : rep.entries)
                if (!e.pass) std::cout << "violated: " << e.id << "\n";
            std::cout << (rep.pass() ? "PASS" : "FAIL") << "\n";
            return rep.pass() ? 0 : 1;
        }

        CriticalFrame frame(p);

        if (orbit_cmd->parsed()) {
            auto orbit = frame.critical_orbit(20, std::min(n_steps, 2000));
            std::ostringstream os;
            os.precision(17);
            os << "k,x,y,rectangle,in_critical_tube\n";
            for (const auto& op : orbit)
                os << op.k << "," << op.pos.x << "," << op.pos.y << "," << op.rect << ","
                   << (op.in_crit_rect ? 1 : 0) << "\n";
            write_file_atomic(out_path(c, "orbit.csv"), os.str());
            std::cout << "wrote orbit.csv\n";
            return 0;
        }
        if (cones_cmd->parsed()) {
            std::vector<SymbolWord> words;
            for (int i = 0; i < n_samples; ++i)
                words.push_back(random_admissible_word(rng, word_back, word_fwd));
            std::vector<std::array<double, 4>> rows(words.size());
            std::vector<int> fail(words.size(), 0);
            parallel_for(static_cast<int>(words.size()), [&](int i) {
                Decoded d = decode(frame, words[static_cast<size_t>(i)]);
                try {
                    double mu = check_unstable_invariance(frame, d.point);
                    double ms = check_stable_invariance(frame, d.point);
                    rows[static_cast<size_t>(i)] = {d.point.x, d.point.y, mu, ms};
                    if (mu <= 0.0 || ms <= 0.0) fail[static_cast<size_t>(i)] = 1;
                } catch (const std::exception&) {
                    fail[static_cast<size_t>(i)] = 1;
                }
            }, c.threads);
            std::ostringstream os;
            os.precision(17);
            os << "x,y,margin_u,margin_s\n";
            for (auto& r : rows) os << r[0] << "," << r[1] << "," << r[2] << "," << r[3] << "\n";
            write_file_atomic(out_path(c, "cones.csv"), os.str());
            int bad = 0;
            for (int v : fail) bad += v;
            std::cout << (bad == 0 ? "PASS" : "FAIL") << " " << words.size() << " points\n";
            return bad == 0 ? 0 : 1;
        }
        if (lyap_cmd->parsed()) {
            double floor_val = std::log(p.rho) / 5.0 - 1e-3;
            std::vector<double> vals(static_cast<size_t>(n_samples));
            std::vector<SymbolWord> words;
            for (int i = 0; i < n_samples; ++i)
                words.push_back(random_admissible_word(rng, 2, n_steps + 40));
            std::vector<int> bad(static_cast<size_t>(n_samples), 0);
            parallel_for(n_samples, [&](int i) {
                DecodedOrbit orbit(frame, words[static_cast<size_t>(i)]);
                double v = lyapunov_unstable(frame, orbit, 0, n_steps);
                vals[static_cast<size_t>(i)] = v;
                if (v < floor_val) bad[static_cast<size_t>(i)] = 1;
            }, c.threads);
            std::ostringstream os;
            os.precision(17);
            os << "sample,exponent\n";
            for (int i = 0; i < n_samples; ++i) os << i << "," << vals[static_cast<size_t>(i)] << "\n";
            write_file_atomic(out_path(c, "lyapunov.csv"), os.str());
            int nbad = 0;
            for (int v : bad) nbad += v;
            std::cout << (nbad == 0 ? "PASS" : "FAIL") << "\n";
            return nbad == 0 ? 0 : 1;
        }
        if (tube_cmd->parsed()) {
            int checked = 0, failed = 0;
            for (int i = 0; i < n_samples; ++i) {
                SymbolWord w = critical_passage_word(p, rng, p.n_c + 6, p.k_c + 30);
                DecodedOrbit orbit(frame, w);
                for (const auto& tube : harvest_tubes(frame, orbit)) {
                    ++checked;
                    if (!tube_expansion_check(frame, orbit, tube, {1.0, free_cone_slope(p)}))
                        ++failed;
                }
            }
            std::cout << (failed == 0 ? "PASS" : "FAIL") << " tubes=" << checked << "\n";
            return failed == 0 ? 0 : 1;
        }
        if (dbl_cmd->parsed()) {
            std::vector<double> grid = theta >= 0.0 ? std::vector<double>{theta} : theta_grid(p);
            std::vector<DecodedOrbit> samples;
            for (int i = 0; i < 200; ++i)
                samples.emplace_back(frame, random_admissible_word(rng, 5, 60));
            std::ostringstream os;
            os.precision(17);
            os << "theta,ok,N\n";
            bool all_ok = true;
            for (double th : grid) {
                DoublingResult r = uniform_doubling_time(frame, th, samples);
                os << th << "," << (r.ok ? 1 : 0) << "," << r.N << "\n";
                if (th > 0.0 && !r.ok) all_ok = false;
            }
            DoublingResult zero = uniform_doubling_time(frame, 0.0, samples);
            os << 0.0 << "," << (zero.ok ? 1 : 0) << "," << zero.N << "\n";
            write_file_atomic(out_path(c, "doubling.csv"), os.str());
            bool pass = all_ok && !zero.ok;
            std::cout << (pass ? "PASS" : "FAIL") << "\n";
            return pass ? 0 : 1;
        }
        if (mani_cmd->parsed()) {
            auto words = first_return_words(frame, 3 * (p.k_c + 1));
            int violations = 0;
            for (int i = 0; i < n_samples; ++i) {
                VerticalCurve curve = random_family_curve(frame, rng);
                for (const auto& w : words) {
                    VerticalCurve out = unstable_graph_transform(frame, curve, w);
                    if (!curve_in_family(frame, out).ok) ++violations;
                }
            }
            std::cout << (violations == 0 ? "PASS" : "FAIL") << " words=" << words.size() << "\n";
            return violations == 0 ? 0 : 1;
        }
        if (tang_cmd->parsed()) {
            TangencyReport rep = tangency_order(frame);
            write_file_atomic(out_path(c, "tangency.json"), rep.to_json());
            std::ostringstream os;
            os.precision(17);
            os << "theta,angle\n";
            for (double th : theta_grid(p))
                os << th << "," << tangency_crossing_angle(frame, th) << "\n";
            write_file_atomic(out_path(c, "tangency_angles.csv"), os.str());
            std::cout << (rep.order == 3 ? "PASS" : "FAIL") << " order=" << rep.order << "\n";
            return rep.order == 3 ? 0 : 1;
        }
        if (code_cmd->parsed()) {
            CodeResult r = code(frame, {px, py}, word_back, word_fwd);
            std::cout << r.word.str() << (r.escaped ? " (escaped)" : "") << "\n";
            return 0;
        }
        if (dec_cmd->parsed()) {
            Decoded d = decode(frame, SymbolWord::parse(word_text));
            std::cout.precision(17);
            std::cout << d.point.x << " " << d.point.y << " diam=(" << d.diam_x << ","
                      << d.diam_y << ")\n";
            return 0;
        }
        if (exp_cmd->parsed()) {
            std::vector<std::pair<SymbolWord, SymbolWord>> pairs;
            for (int i = 0; i < n_samples; ++i)
                pairs.emplace_back(random_admissible_word(rng, 15, 15),
                                   random_admissible_word(rng, 15, 15));
            bool ok = expansivity_check(frame, pairs, 40);
            std::cout << (ok ? "PASS" : "FAIL") << "\n";
            return ok ? 0 : 1;
        }
        if (hol_cmd->parsed()) {
            HolderFit fit = holder_modulus(frame, n_samples, rng);
            std::cout.precision(17);
            std::cout << "exponent=" << fit.exponent << " samples=" << fit.samples << "\n";
            return fit.exponent > 0.0 ? 0 : 1;
        }
        auto parse_potential = [&](const std::string& name) {
            if (name == "zero") return Potential::zero();
            if (name.rfind("const:", 0) == 0) return Potential::constant(std::stod(name.substr(6)));
            if (name.rfind("rate:", 0) == 0) return Potential::rate(p, std::stod(name.substr(5)));
            throw CLI::ValidationError("unknown potential " + name);
        };
        if (pres_cmd->parsed()) {
            PressureResult r = pressure(parse_potential(potential_name), depth);
            std::ostringstream os;
            os.precision(17);
            os << "m,value\n";
            for (int mm = 2; mm <= depth; ++mm)
                os << mm << "," << pressure(parse_potential(potential_name), mm).value << "\n";
            write_file_atomic(out_path(c, "pressure.csv"), os.str());
            std::cout.precision(17);
            std::cout << r.value << "\n";
            return 0;
        }
        if (equi_cmd->parsed()) {
            EquilibriumResult r = equilibrium_measure(parse_potential(potential_name), depth);
            WordSpace ws(depth);
            std::ostringstream os;
            os.precision(17);
            os << "word,weight\n";
            for (long id = 0; id < ws.size(); ++id) {
                auto w = ws.word(id);
                for (int s : w) os << s;
                os << "," << r.measure.weights[static_cast<size_t>(id)] << "\n";
            }
            write_file_atomic(out_path(c, "equilibrium.csv"), os.str());
            std::cout.precision(17);
            std::cout << "pressure=" << r.pressure << " entropy=" << r.entropy
                      << " defect=" << r.variational_defect << "\n";
            return r.variational_defect < 1e-6 ? 0 : 1;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
