#pragma once

#include <Eigen/Dense>
#include <optional>

#include "fokas/contour.hpp"
#include "fokas/spectral.hpp"
#include "fokas/transforms.hpp"
#include "fokas/types.hpp"

namespace fokas {

enum class BcKind { RobinRobin, RobinDirichlet, DirichletDirichlet, NeumannNeumann };

struct IbvpSpec {
    ProblemParams params;
    InitialData initial = InitialData::zero();
    BoundarySignal left = BoundarySignal::zero();  // f (or f_N for Neumann-Neumann)
    BoundarySignal right = BoundarySignal::zero(); // g (or g_N)
    BcKind bc_kind = BcKind::DirichletDirichlet;

    void validate() const;
};

struct EvalDiag {
    double value = 0.0;
    double imag_residual = 0.0;
    double quad_err = 0.0;
    bool converged = true;
};

/// Shared evaluation state for one IBVP: root report and a contour reused
/// across evaluation points. Immutable after prepare(); evaluations are pure.
class IbvpEvaluator {
  public:
    IbvpEvaluator(IbvpSpec spec, AccuracyProfile profile = AccuracyProfile::defaults());

    /// Build the shared contour for a time range (t_min = smallest positive
    /// evaluation time). Called lazily by eval() when omitted.
    void prepare(double t_min, double t_max);

    EvalDiag eval(double x, double t) const;
    std::vector<EvalDiag> eval_many(const std::vector<double>& xs, double t) const;

    const RootReport& roots() const { return roots_; }
    const IbvpSpec& spec() const { return spec_; }
    const Contour& contour() const;

  private:
    struct NodeCommon;
    NodeCommon node_common(Complex lam, double t) const;
    Complex kernel_at(const NodeCommon& c, double x) const;
    double data_scale() const;

    IbvpSpec spec_;
    AccuracyProfile profile_;
    RootReport roots_;
    double kappa_, E_;
    mutable std::optional<Contour> contour_;
};

double solve_rr(const IbvpSpec& spec, double x, double t,
                const AccuracyProfile& profile = AccuracyProfile::defaults());
double solve_rd(const IbvpSpec& spec, double x, double t,
                const AccuracyProfile& profile = AccuracyProfile::defaults());
double solve_dd(const IbvpSpec& spec, double x, double t,
                const AccuracyProfile& profile = AccuracyProfile::defaults());
double solve_nn(const IbvpSpec& spec, double x, double t,
                const AccuracyProfile& profile = AccuracyProfile::defaults());

/// Constant-flux infiltration into a bounded profile over a water table
/// (alpha = 1 convention); q in length/time, t in seconds.
double braester_profile(double q, double theta0, double thetas, const ProblemParams& p,
                        double x, double t,
                        const AccuracyProfile& profile = AccuracyProfile::defaults());

/// Quasi-linear constant-rate rainfall conductivity profile
/// (K0 = 1, D0 = 1/2, alpha = beta = 1/2 normalization).
double philip_conductivity(double R, double L, double x, double t,
                           const AccuracyProfile& profile = AccuracyProfile::defaults());

/// Ready-made specs for the two physical scenarios.
IbvpSpec braester_spec(double q, double theta0, double thetas, double D0, double L);
IbvpSpec philip_spec(double R, double L);

struct SolutionGrid {
    Eigen::VectorXd xs;
    Eigen::VectorXd ts;
    Eigen::MatrixXd values;                         // values(i, j) = theta(xs[i], ts[j])
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> converged;
};

/// Elementwise solve over a grid; one shared contour per grid (t_min = min
/// positive t). Individual failures are flagged, never abort the grid.
SolutionGrid solve_grid(const IbvpSpec& spec, const std::vector<double>& xs,
                        const std::vector<double>& ts,
                        const AccuracyProfile& profile = AccuracyProfile::defaults());

namespace detail {
/// Deterministic index-space parallel loop (ADVDIFF_THREADS, default 1).
void parallel_for(int n, const std::function<void(int)>& fn);
} // namespace detail

} // namespace fokas
