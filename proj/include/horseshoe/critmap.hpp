#pragma once

#include <vector>

#include "horseshoe/basemap.hpp"

namespace horseshoe {

// Real roots of a3 x^3 + a2 x^2 + a1 x + a0, each Newton-polished; throws on
// a3 == 0. Returns 1..3 roots in ascending order (multiplicities collapsed
// per discriminant sign).
std::vector<double> solve_cubic_real(double a3, double a2, double a1, double a0);

struct GlueSpec {
    double w1 = 0.0;  // width of the lateral v-stage collar
    double w2 = 0.0;  // width of the lateral u-stage collar
    double h1 = 0.0;  // height of the vertical v-stage collar
    double h2 = 0.0;  // height of the vertical u-stage collar
    double delta0 = 0.0;  // horizontal profile mismatch absorbed by the u taper
    double taper_eps = 0.0;
    const char* blend_profile = "staged-quintic";
};

enum class Zone { Outside, Linear, Core, Glue };

// The critical frame: the critical point, the critical rectangle, the
// position of its image, and the glue geometry. Built once per ParamSet.
class CriticalFrame {
  public:
    explicit CriticalFrame(const ParamSet& p);

    const ParamSet& params() const { return p_; }
    const BaseMap& base() const { return base_; }

    Vec2 xi() const { return {0.0, p_.xi2}; }
    Vec2 f_xi() const { return fxi_; }
    const Box& crit_rect() const { return rect_; }
    const Interval& band_kc_xi() const { return J_; }    // H^{kc}(xi) vertical extent
    const Interval& band_kc_fxi() const { return Jp_; }  // H^{kc}(xi') vertical extent
    const Interval& vband_fxi() const { return Vb_; }    // V^{nc+2}(xi') horizontal extent
    const GlueSpec& glue() const { return glue_; }
    const Box& slab() const { return slab_; }

    int xi_sym(int j) const { return xi_symbol(p_, j); }

    Zone zone_of(const Vec2& pt) const;

    // The perturbed map, its exact inverse and its Jacobian. theta adds the
    // straightening term to the cubic.
    PointOrEscaped apply(const Vec2& pt, double theta = 0.0) const;
    PointOrEscaped inverse(const Vec2& pt, double theta = 0.0) const;
    // Jacobian: affine zones and the cubic core are analytic, the glue collar
    // falls back to central finite differences.
    std::array<std::array<double, 2>, 2> jacobian(const Vec2& pt, double theta = 0.0) const;

    // Local coordinates version of the cubic and its inverse (offsets from xi
    // resp. F(xi)); rejects offsets outside the critical rectangle / image.
    Vec2 local_cubic(double x, double y, double theta = 0.0) const;
    Vec2 local_cubic_inverse(double u, double v, double theta = 0.0) const;

    struct OrbitPoint {
        int k = 0;
        Vec2 pos;
        int rect = 0;          // 0 when outside every cell
        bool in_crit_rect = false;
    };
    // Points F^k(xi) for k in [-n_back, n_fwd]; backward points are exact on
    // x = 0, forward points are band-centered from the itinerary.
    std::vector<OrbitPoint> critical_orbit(int n_back, int n_fwd) const;

    // Interval image/preimage of a box, outward-padded; splits across zone
    // boundaries conservatively (hull).
    Box apply_box(const Box& b, double theta = 0.0) const;
    Box inverse_box(const Box& b, double theta = 0.0) const;

    double glue_det_sample_bound() const;  // sampled sup of |det DF| over the glue

  private:
    Vec2 glue_map(const Vec2& pt, double theta) const;

    ParamSet p_;
    BaseMap base_;
    Vec2 fxi_;
    Box rect_;
    Interval J_, Jp_, Vb_;
    GlueSpec glue_;
    Box slab_;
    double xprime_ = 0.0;  // right edge of the image strip of the middle branch
};

}  // namespace horseshoe
