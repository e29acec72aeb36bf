#pragma once

#include <optional>
#include <vector>

#include "fokas/types.hpp"

namespace fokas {

/// Dispersion relation w(lambda) = D0 lambda^2 + i K0 lambda.
Complex omega(Complex lambda, const ProblemParams& p);

/// Symmetry map nu(lambda) = -lambda - i K0/D0; the second root of
/// omega(nu) = omega(lambda), and an involution.
Complex nu(Complex lambda, const ProblemParams& p);

/// Elimination determinant of the Robin-Robin problem,
///   Delta = e^{-i lambda L}(1-i a lambda)(1-i b nu) - e^{-i nu L}(1-i a nu)(1-i b lambda).
/// Requires finite alpha, beta.
Complex delta_rr(Complex lambda, const ProblemParams& p);

/// Robin-Dirichlet reduction (beta = 0).
Complex delta_alpha(Complex lambda, const ProblemParams& p);

/// Dirichlet-Dirichlet / Neumann-Neumann determinant e^{-i lambda L} - e^{-i nu L}.
Complex delta_zero(Complex lambda, const ProblemParams& p);

/// Representation kernel
///   F_gamma(lambda,y) = (gamma K0/(2D0) - 1) sin(y mu) - gamma mu cos(y mu),
/// with mu = lambda + i K0/(2 D0).
Complex f_gamma(Complex lambda, double y, double gamma, const ProblemParams& p);

/// Neumann-limit kernel G = lim_{a->inf} F_a / a.
Complex g_kernel(Complex lambda, double y, const ProblemParams& p);

struct SigmaRho {
    double sigma;
    double rho;
};

/// Classification parameters of the transformed root equation
/// sigma*y/(1 + rho*y^2) = tanh(y). Throws DegenerateDenominator when
/// alpha or beta equals 2 D0/K0.
SigmaRho sigma_rho(const ProblemParams& p);

struct RootCountResult {
    bool ambiguous = false; // eta has a negative discriminant; count is one of {0,2,4}
    int count = 0;          // valid when !ambiguous
};

/// Predicted number of roots of Delta off the horizontal symmetry line, as a
/// function of (sigma, rho). In the regime rho>0, 0<sigma<1 the sign of the
/// exact discriminant quantity decides between 0, 2 and 4.
RootCountResult root_count(double sigma, double rho);

struct RootReport {
    double sigma = 0.0;
    double rho = 0.0;
    bool classification_valid = false; // false when the denominators degenerate
    bool ambiguous = false;
    int predicted_count = 0;
    std::vector<Complex> roots;              // off the line Im = -K0/(2 D0)
    std::optional<double> max_upper_imag;    // largest Im among roots with Im > 0
};

/// Locate all roots of Delta off the symmetry line by scanning the real-y
/// equation (or a direct 2-D scan when the classification degenerates).
/// Roots are verified against |Delta| < root_tol and reported in symmetric
/// pairs about -i K0/(2 D0). Throws CountMismatch when the numeric count
/// disagrees with the prediction outside the ambiguous regime.
RootReport find_roots(const ProblemParams& p, double root_tol = 1e-10);

/// Large-n location nπ/L - i K0/(2 D0) of the on-line roots; used for
/// contour-safety heuristics only.
Complex asymptotic_root(int n, const ProblemParams& p);

namespace detail {
/// Direct scan for Delta roots in a rectangle (fallback for degenerate
/// classification). Newton-polished; excludes the symmetry line.
std::vector<Complex> scan_delta_roots(const ProblemParams& p, double re_lo, double re_hi,
                                      double im_lo, double im_hi, int nre, int nim,
                                      double root_tol);
} // namespace detail

} // namespace fokas
