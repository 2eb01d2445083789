#include "horseshoe/symbolic.hpp"

#include <algorithm>
#include <cmath>

namespace horseshoe {

namespace {

Interval pad_ulps(const Interval& iv, int k = 4) {
    if (iv.is_empty()) return iv;
    double lo = iv.lo, hi = iv.hi;
    for (int i = 0; i < k; ++i) {
        lo = std::nextafter(lo, -kInf);
        hi = std::nextafter(hi, kInf);
    }
    return {lo, hi};
}

Box pad_box(const Box& b, int k = 4) { return {pad_ulps(b.x, k), pad_ulps(b.y, k)}; }

}  // namespace

DecodedOrbit::DecodedOrbit(const CriticalFrame& f, const SymbolWord& w, double theta)
    : w_(w) {
    if (!w.admissible()) throw std::invalid_argument("decode: inadmissible word");
    const BaseMap& base = f.base();
    const int n = w.size();
    boxes_.resize(static_cast<size_t>(n));

    // Unperturbed seeds: vertical band from the future, horizontal strip from
    // the past, both cell-constrained at every step.
    std::vector<Interval> J(static_cast<size_t>(n));
    J[static_cast<size_t>(n - 1)] = base.cell_y(w.s[static_cast<size_t>(n - 1)]);
    for (int i = n - 2; i >= 0; --i) {
        const Branch& br = base.branch(rect_row(w.s[static_cast<size_t>(i)]));
        Interval pre = J[static_cast<size_t>(i + 1)].affine(1.0 / br.ay, -br.by / br.ay);
        J[static_cast<size_t>(i)] = base.cell_y(w.s[static_cast<size_t>(i)]).intersect(pad_ulps(pre));
    }
    std::vector<Interval> I(static_cast<size_t>(n));
    I[0] = base.cell_x(w.s[0]);
    for (int i = 1; i < n; ++i) {
        const Branch& br = base.branch(rect_row(w.s[static_cast<size_t>(i - 1)]));
        Interval img = I[static_cast<size_t>(i - 1)].affine(br.ax, br.bx);
        I[static_cast<size_t>(i)] = base.cell_x(w.s[static_cast<size_t>(i)]).intersect(pad_ulps(img));
    }
    for (int i = 0; i < n; ++i)
        boxes_[static_cast<size_t>(i)] = {I[static_cast<size_t>(i)], J[static_cast<size_t>(i)]};

    // Refinement under the perturbed map.
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (int i = 0; i + 1 < n; ++i) {
            Box img = pad_box(f.apply_box(boxes_[static_cast<size_t>(i)], theta));
            Box next = boxes_[static_cast<size_t>(i + 1)].intersect(img);
            if (!next.is_empty()) boxes_[static_cast<size_t>(i + 1)] = next;
        }
        for (int i = n - 1; i > 0; --i) {
            Box pre = pad_box(f.inverse_box(boxes_[static_cast<size_t>(i)], theta));
            Box prev = boxes_[static_cast<size_t>(i - 1)].intersect(pre);
            if (!prev.is_empty()) boxes_[static_cast<size_t>(i - 1)] = prev;
        }
    }
}

Decoded decode(const CriticalFrame& f, const SymbolWord& w, double theta) {
    DecodedOrbit orbit(f, w, theta);
    Decoded d;
    d.point = orbit.point(0);
    d.diam_x = orbit.box(0).x.len();
    d.diam_y = orbit.box(0).y.len();
    return d;
}

CodeResult code(const CriticalFrame& f, const Vec2& pt, int n_back, int n_fwd,
                double radius0, double theta) {
    CodeResult res;
    const BaseMap& base = f.base();
    std::vector<int> syms(static_cast<size_t>(n_back + n_fwd + 1), 0);
    auto classify = [&](const Box& b, int& sym) -> int {
        // 1 ok, 0 gap/outside, -1 straddles
        auto rc = base.rectangle_of(b.center());
        if (!rc) return 0;
        sym = *rc;
        if (base.cell(*rc).contains(b)) return 1;
        return -1;
    };
    Box b{{pt.x - radius0, pt.x + radius0}, {pt.y - radius0, pt.y + radius0}};
    int sym = 0;
    int cls = classify(b, sym);
    if (cls == 0) {
        res.escaped = true;
        res.escape_t = 0;
        res.word = SymbolWord({}, 0);
        return res;
    }
    if (cls < 0) res.uncertain = true;
    syms[static_cast<size_t>(n_back)] = sym;

    Box fb = b;
    int fwd_len = 0;
    for (int t = 1; t <= n_fwd; ++t) {
        fb = f.apply_box(fb, theta);
        if (fb.is_empty()) {
            res.escaped = true;
            res.escape_t = t;
            break;
        }
        int s = 0;
        int c = classify(fb, s);
        if (c == 0) {
            res.escaped = true;
            res.escape_t = t;
            break;
        }
        if (c < 0) res.uncertain = true;
        syms[static_cast<size_t>(n_back + t)] = s;
        fwd_len = t;
    }
    Box bb = b;
    int back_len = 0;
    for (int t = 1; t <= n_back; ++t) {
        bb = f.inverse_box(bb, theta);
        if (bb.is_empty()) {
            res.escaped = true;
            res.escape_t = -t;
            break;
        }
        int s = 0;
        int c = classify(bb, s);
        if (c == 0) {
            res.escaped = true;
            res.escape_t = -t;
            break;
        }
        if (c < 0) res.uncertain = true;
        syms[static_cast<size_t>(n_back - t)] = s;
        back_len = t;
    }
    std::vector<int> out(syms.begin() + (n_back - back_len),
                         syms.begin() + (n_back + fwd_len + 1));
    res.word = SymbolWord(std::move(out), back_len);
    return res;
}

SymbolWord random_admissible_word(std::mt19937_64& rng, int n_back, int n_fwd) {
    std::uniform_int_distribution<int> d9(1, 9);
    std::uniform_int_distribution<int> d3(0, 2);
    std::vector<int> syms;
    syms.push_back(d9(rng));
    for (int i = 0; i < n_fwd; ++i)
        syms.push_back(BaseMap::successors(syms.back())[static_cast<size_t>(d3(rng))]);
    std::vector<int> back;
    int head = syms.front();
    for (int i = 0; i < n_back; ++i) {
        head = BaseMap::predecessors(head)[static_cast<size_t>(d3(rng))];
        back.push_back(head);
    }
    std::reverse(back.begin(), back.end());
    back.insert(back.end(), syms.begin(), syms.end());
    return SymbolWord(std::move(back), n_back);
}

SymbolWord critical_passage_word(const ParamSet& p, std::mt19937_64& rng, int n_back,
                                 int n_fwd, int shadow_len) {
    if (shadow_len < 0) shadow_len = p.k_c + 2;
    std::uniform_int_distribution<int> d3(0, 2);
    std::vector<int> syms;
    // Past: anything admissible feeding 7^{nc+2}.
    int tail7 = std::min(n_back, p.n_c + 2);
    std::vector<int> back(static_cast<size_t>(tail7), 7);
    int head = 7;
    for (int i = tail7; i < n_back; ++i) {
        head = BaseMap::predecessors(head)[static_cast<size_t>(d3(rng))];
        back.insert(back.begin(), head);
    }
    syms = back;
    syms.push_back(4);
    for (int j = 0; j < std::min(shadow_len, n_fwd); ++j)
        syms.push_back(itinerary_symbol(p.itinerary, j));
    while (static_cast<int>(syms.size()) < n_back + 1 + n_fwd)
        syms.push_back(BaseMap::successors(syms.back())[static_cast<size_t>(d3(rng))]);
    return SymbolWord(std::move(syms), n_back);
}

std::vector<std::vector<int>> first_return_words(const CriticalFrame& f, int max_len) {
    const ParamSet& p = f.params();
    std::vector<std::vector<int>> found;
    // Forced prefix: a point of the rectangle that survives kc+1 steps shadows
    // the critical itinerary.
    std::vector<int> prefix{4};
    for (int j = 1; j <= p.k_c + 1; ++j) prefix.push_back(xi_symbol(p, j));

    // Validate a candidate by the refined box chain.
    auto validates = [&](const std::vector<int>& word) -> bool {
        Box b = f.crit_rect();
        for (size_t i = 1; i < word.size(); ++i) {
            b = f.apply_box(b).intersect(f.base().cell(word[i]));
            if (b.is_empty()) return false;
            bool last = i + 1 == word.size();
            Box hit = b.intersect(f.crit_rect());
            if (last) return !hit.is_empty();
            if (!hit.is_empty() && word[i] == 4) {
                // returning strictly earlier: shrink to the non-returning part?
                // Treat as not a first return at this length.
                return false;
            }
        }
        return false;
    };

    // DFS over admissible continuations with a reachability prune on the
    // horizontal strip position.
    struct Node {
        std::vector<int> word;
        Interval strip;
    };
    Interval strip0{0.0, p.alpha_max};
    for (size_t i = 1; i < prefix.size(); ++i) {
        const Branch& br = f.base().branch(rect_row(prefix[i - 1]));
        strip0 = strip0.affine(br.ax, br.bx);
    }
    std::vector<Node> stack{{prefix, strip0}};
    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        int len = static_cast<int>(node.word.size()) - 1;
        if (len > max_len) continue;
        int last = node.word.back();
        if (last == 4 && len > p.k_c + 1) {
            if (validates(node.word)) found.push_back(node.word);
            continue;  // a return ends the word
        }
        if (len == max_len) continue;
        // Prune: the strip can reach [0, alpha] only by repeated bottom-branch
        // contraction; lambda^r * strip.lo is the best reachable left edge.
        int remaining = max_len - len;
        if (node.strip.lo > 0.0) {
            double best = node.strip.lo * std::pow(p.lambda, remaining);
            if (best > p.alpha_max) continue;
        }
        const Branch& br = f.base().branch(rect_row(last));
        Interval next_strip = node.strip.affine(br.ax, br.bx);
        for (int nxt : BaseMap::successors(last)) {
            Node child{node.word, next_strip};
            child.word.push_back(nxt);
            stack.push_back(std::move(child));
        }
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return found;
}

SeparationResult separation_time(const CriticalFrame& f, const SymbolWord& a,
                                 const SymbolWord& b, int N) {
    DecodedOrbit oa(f, a), ob(f, b);
    auto gap = [](const Box& x, const Box& y) {
        double gx = std::max(x.x.lo - y.x.hi, y.x.lo - x.x.hi);
        double gy = std::max(x.y.lo - y.y.hi, y.y.lo - x.y.hi);
        return std::max(gx, gy);
    };
    SeparationResult res;
    for (int n = 0; n <= N; ++n) {
        if (a.has(n) && b.has(n) && gap(oa.box(n), ob.box(n)) > f.params().d) {
            res.separated = true;
            res.at_step = n;
            return res;
        }
        if (n > 0 && a.has(-n) && b.has(-n) && gap(oa.box(-n), ob.box(-n)) > f.params().d) {
            res.separated = true;
            res.at_step = -n;
            return res;
        }
    }
    return res;
}

bool expansivity_check(const CriticalFrame& f,
                       const std::vector<std::pair<SymbolWord, SymbolWord>>& pairs, int N) {
    for (const auto& [a, b] : pairs) {
        bool same = a.str() == b.str();
        if (same) continue;  // identical words: vacuous
        if (!separation_time(f, a, b, N).separated) return false;
    }
    return true;
}

HolderFit holder_modulus(const CriticalFrame& f, int n_pairs, std::mt19937_64& rng) {
    if (n_pairs < 8) throw std::invalid_argument("holder_modulus: too few samples");
    std::vector<double> qs, ld;
    std::uniform_int_distribution<int> dq(2, 14);
    std::uniform_int_distribution<int> d3(0, 2);
    const int W = 16;
    int made = 0;
    while (made < n_pairs) {
        int q = dq(rng);
        SymbolWord a = random_admissible_word(rng, W, W);
        // Partner sharing the window [-q, q], diverging right after.
        std::vector<int> syms = a.s;
        bool changed = false;
        for (int t = q + 1; t <= W; ++t) {
            int prev = syms[static_cast<size_t>(W + t - 1)];
            auto succ = BaseMap::successors(prev);
            int cur = syms[static_cast<size_t>(W + t)];
            int pick = succ[static_cast<size_t>(d3(rng))];
            if (t == q + 1) {
                while (pick == cur) pick = succ[static_cast<size_t>(d3(rng))];
                changed = true;
            }
            syms[static_cast<size_t>(W + t)] = pick;
            prev = pick;
            for (int u = t + 1; u <= W; ++u)
                syms[static_cast<size_t>(W + u)] =
                    BaseMap::successors(syms[static_cast<size_t>(W + u - 1)])[
                        static_cast<size_t>(d3(rng))];
            break;
        }
        if (!changed) continue;
        SymbolWord b(syms, W);
        Decoded da = decode(f, a), db = decode(f, b);
        double dist = (da.point - db.point).norm_inf();
        if (dist <= 0.0) continue;
        qs.push_back(static_cast<double>(q));
        ld.push_back(std::log(dist));
        ++made;
    }
    double n = static_cast<double>(qs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < qs.size(); ++i) {
        sx += qs[i];
        sy += ld[i];
        sxx += qs[i] * qs[i];
        sxy += qs[i] * ld[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    HolderFit fit;
    fit.exponent = -slope;
    fit.intercept = (sy - slope * sx) / n;
    fit.samples = static_cast<int>(qs.size());
    return fit;
}

}  // namespace horseshoe
