#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "fokas/solver.hpp"

namespace fokas {

/// Null-control setup: homogeneous Robin datum at x = 0, Dirichlet control
/// v(t) at x = L, steer theta(., T) to zero.
struct ControlProblem {
    ProblemParams params;  // beta = 0 path; alpha = 0 gives the Dirichlet-Dirichlet case
    InitialData initial = InitialData::zero();
    double T = 1.0;
    double tau = 0.0; // control activation time (default: act immediately)
    int N = 2;        // basis size is N+1

    void validate() const;
    /// Interior equidistant collocation points x_k = (k+1) L / (N+2), k = 0..N.
    Eigen::VectorXd collocation_xs() const;
};

struct ControlSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    double condition_estimate = 0.0;
};

struct ControlSolution {
    Eigen::VectorXd coeffs;
    double control_norm = 0.0;
    double residual_norm = 0.0;
    double verified_error = 0.0;
    bool regularized = false;
    std::optional<double> delta;
    double condition_estimate = 0.0;
    std::string solve_path; // "lu" or "svd"
};

/// Free-evolution right-hand side B(x, T).
double rhs_B(const ControlProblem& problem, double x,
             const AccuracyProfile& profile = AccuracyProfile::defaults());

/// Response column A_n(x, T) of the n-th basis function, 1 <= n <= N+1.
double basis_response_A(const ControlProblem& problem, int n, double x,
                        const AccuracyProfile& profile = AccuracyProfile::defaults());

/// Assemble the (N+1)x(N+1) collocation system A c = b in one shared
/// quadrature sweep. Throws NotConverged listing failed entries.
ControlSystem assemble_system(const ControlProblem& problem,
                              const AccuracyProfile& profile = AccuracyProfile::defaults());

struct ExactSolveInfo {
    Eigen::VectorXd coeffs;
    double condition = 0.0;
    double residual_norm = 0.0;
    std::string path;
};

/// Backward-stable dense solve: LU with partial pivoting, switching to an
/// SVD minimum-norm least-squares solve when cond(A) > 1e12.
ExactSolveInfo solve_exact_info(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);
Eigen::VectorXd solve_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Discrepancy-constrained minimum-norm solve:
///   min ||c||_2  s.t.  ||A c - b||_2 <= delta,
/// via SVD and a monotone scalar solve for the Tikhonov parameter.
Eigen::VectorXd solve_regularized(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  double delta);

/// v(t) = sum c_n phi_n(t).
double reconstruct_control(const Eigen::VectorXd& coeffs, double t, double tau, double T);

struct VerifyResult {
    double final_error_norm = 0.0;
    SolutionGrid final_profile;
};

/// Closed-loop check: re-simulate with g = sum c_n phi_n and return
/// ||theta(., T)||_2 on a 201-point Simpson grid.
VerifyResult verify_control(const ControlProblem& problem, const Eigen::VectorXd& coeffs,
                            const AccuracyProfile& profile = AccuracyProfile::defaults());

/// Exact Parseval time norm of the reconstructed control on [0, T].
double norm_l2_time(const Eigen::VectorXd& coeffs, double tau, double T);

/// Composite-Simpson space norm of a single-time profile.
double norm_l2_space(const Eigen::VectorXd& xs, const Eigen::VectorXd& values);

/// Pick delta so the verified final error lands near target_error
/// (monotone bisection over [lo, hi]).
double choose_delta(const ControlProblem& problem, const ControlSystem& system,
                    double target_error, double lo = 1e-6, double hi = 1e-1,
                    const AccuracyProfile& profile = AccuracyProfile::defaults());

/// Assemble, solve (exactly or at the given delta), reconstruct and verify.
ControlSolution run_control(const ControlProblem& problem, std::optional<double> delta,
                            const AccuracyProfile& profile = AccuracyProfile::defaults());

} // namespace fokas
