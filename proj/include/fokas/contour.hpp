#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fokas/spectral.hpp"
#include "fokas/transforms.hpp"
#include "fokas/types.hpp"

namespace fokas {

/// Tunable numerics knobs; defaults are the production choices, `fast` trades
/// accuracy for speed, `paper` is what the table-reproduction runs use.
struct AccuracyProfile {
    double ray_angle = M_PI / 8.0;     // angle of the rays above the real axis, in (0, pi/4]
    double offset_default = 0.5;       // vertex height i*h
    double offset_floor = 0.05;
    double upper_root_factor = 1.5;    // vertex elevation over upper-half roots
    double clearance_dist = 0.25;      // min distance of Delta roots to the path
    double rel_quad_tol = 1e-10;
    double s_cap = 200.0;              // arclength truncation cap per ray
    int nodes_per_panel = 16;
    double grading = 1.3;              // geometric panel growth away from the vertex
    int min_panels = 24;
    double eps_budget = 1e-16;         // target size of the discarded tail
    double vertex_growth_budget = 18.0;// cap on (D0 h^2 + K0 h) * t_max
    double osc_span = 4.5;             // max phase change (radians) per panel
    int max_panels = 6000;
    double resonance_tol = 1e-6;

    static AccuracyProfile defaults() { return {}; }
    static AccuracyProfile fast();
    static AccuracyProfile paper();

    static AccuracyProfile named(const std::string& name);
};

struct ContourOptions {
    double t_max = 0.0;     // largest evaluation time (vertex growth cap); 0 = t_min
    double s_request = 0.0; // extra truncation demanded by algebraically-decaying terms
    bool alternative_decay = false; // integrand decays without the e^{-w t} factor
};

struct ContourNode {
    Complex lambda;
    Complex weight; // Gauss weight times d(lambda), orientation included
};

/// Deformed replacement of the spectral contour: vertex i*h with two rays at
/// angles ray_angle and pi - ray_angle, traversed from the left ray toward
/// the vertex and out along the right ray. Immutable after construction.
class Contour {
  public:
    double offset_h = 0.0;
    double ray_angle = 0.0;
    double truncation_s = 0.0;
    double rel_quad_tol = 1e-10;
    std::vector<double> panel_edges;
    std::vector<ContourNode> nodes_base;
    std::vector<ContourNode> nodes_fine; // panel-doubled set for the convergence check

    const std::vector<ContourNode>& nodes() const { return nodes_fine; }

    /// Distance from a point to the two-ray path.
    double distance(Complex p) const;
};

/// Build a contour clearing all reported roots, with truncation chosen from
/// the Gaussian decay budget exp(-Re w(lambda) t_min) and any explicit
/// request. Throws PoleOnContour / ZeroTimeUnbounded.
Contour make_contour(const ProblemParams& p, const RootReport& roots, double t_min,
                     const AccuracyProfile& profile = AccuracyProfile::defaults(),
                     const ContourOptions& opts = {});

struct QuadResult {
    Complex value{0.0, 0.0};
    double err = 0.0; // |fine - base| panel-doubling estimate
    bool converged = true;
};

/// Oriented contour integral with a panel-doubling convergence check.
/// `scale_hint` sets the magnitude against which convergence is judged
/// (defaults to the result itself).
QuadResult integrate(const Contour& c, const std::function<Complex(Complex)>& f,
                     double scale_hint = 0.0);

/// Same node sweep for a vector-valued integrand (components share nodes).
std::vector<QuadResult> integrate_many(const Contour& c, int m,
                                       const std::function<void(Complex, std::span<Complex>)>& f,
                                       double scale_hint = 0.0);

/// Throwing wrapper.
Complex integrate_checked(const Contour& c, const std::function<Complex(Complex)>& f,
                          double scale_hint = 0.0);

/// Fourier term of the representation: (1/2pi) int_R e^{i lambda x - w t} hat0 dlambda.
/// For t = 0 and catalog data this is the exact inverse-transform identity.
QuadResult integrate_real_line(const InitialData& initial, const ProblemParams& p, double x,
                               double t, const AccuracyProfile& profile = AccuracyProfile::defaults());

} // namespace fokas
