#pragma once

#include <random>

#include "horseshoe/critmap.hpp"

namespace horseshoe {

// Interval shadow of a word's orbit under the perturbed map: a box per time
// step, seeded from the unperturbed generation rectangles and refined by
// outward-rounded image/preimage sweeps.
class DecodedOrbit {
  public:
    DecodedOrbit(const CriticalFrame& f, const SymbolWord& w, double theta = 0.0);

    const SymbolWord& word() const { return w_; }
    const Box& box(int t) const { return boxes_.at(static_cast<size_t>(w_.back + t)); }
    Vec2 point(int t = 0) const { return box(t).center(); }
    double diam(int t = 0) const { return box(t).diam_inf(); }

  private:
    SymbolWord w_;
    std::vector<Box> boxes_;
};

// decode: center of the word's refined rectangle plus its diameter bound.
struct Decoded {
    Vec2 point;
    double diam_x = 0.0;
    double diam_y = 0.0;
};
Decoded decode(const CriticalFrame& f, const SymbolWord& w, double theta = 0.0);

struct CodeResult {
    SymbolWord word;
    int escape_t = 0;       // first time the orbit leaves the cells; 0 pattern unused
    bool escaped = false;
    bool uncertain = false; // a box straddled a cell boundary
};
// code: itinerary of pt over [-n_back, n_fwd], tracked as a box so each
// recorded symbol is certain; radius0 seeds the initial box.
CodeResult code(const CriticalFrame& f, const Vec2& pt, int n_back, int n_fwd,
                double radius0 = 1e-14, double theta = 0.0);

SymbolWord random_admissible_word(std::mt19937_64& rng, int n_back, int n_fwd);
// Word whose orbit passes through the critical rectangle at time 0:
// past 7^{nc+2}, then 4, then the critical value's itinerary for shadow_len
// steps, then a random admissible continuation.
SymbolWord critical_passage_word(const ParamSet& p, std::mt19937_64& rng, int n_back,
                                 int n_fwd, int shadow_len = -1);

// All first-return words of the critical rectangle of length <= max_len: the
// forward itineraries 4 ... 4 whose return set inside the rectangle is
// nonempty and which do not cross the rectangle in between.
std::vector<std::vector<int>> first_return_words(const CriticalFrame& f, int max_len);

struct SeparationResult {
    bool separated = false;
    int at_step = 0;  // signed time of the first certified separation
};
// Expansivity: certified separation beyond distance d within |n| <= N.
SeparationResult separation_time(const CriticalFrame& f, const SymbolWord& a,
                                 const SymbolWord& b, int N);
bool expansivity_check(const CriticalFrame& f,
                       const std::vector<std::pair<SymbolWord, SymbolWord>>& pairs, int N);

struct HolderFit {
    double exponent = 0.0;     // positive: log-distance decay per shared symbol
    double intercept = 0.0;
    int samples = 0;
};
// Least-squares fit of log(distance) against the length of the shared window
// over decoded pairs.
HolderFit holder_modulus(const CriticalFrame& f, int n_pairs, std::mt19937_64& rng);

}  // namespace horseshoe
