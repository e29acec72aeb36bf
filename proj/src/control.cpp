#include "fokas/control.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace fokas {

void ControlProblem::validate() const {
    params.validate();
    params.alpha.value();
    if (params.beta.is_neumann() || params.beta.value() != 0.0)
        throw InvalidSpec("control problem requires beta = 0 (Dirichlet control end)");
    if (!(T > 0.0)) throw InvalidSpec("final time T must be positive");
    if (!(tau >= 0.0 && tau < T)) throw InvalidSpec("activation time must satisfy 0 <= tau < T");
    if (N < 1) throw InvalidSpec("N >= 1 required");
    initial.validate(params.L);
}

Eigen::VectorXd ControlProblem::collocation_xs() const {
    Eigen::VectorXd xs(N + 1);
    for (int k = 0; k <= N; ++k) xs[k] = (k + 1) * params.L / (N + 2);
    return xs;
}

namespace {

IbvpSpec control_spec(const ControlProblem& pb, BoundarySignal right) {
    IbvpSpec spec;
    spec.params = pb.params;
    spec.bc_kind = BcKind::RobinDirichlet;
    spec.initial = pb.initial;
    spec.left = BoundarySignal::zero();
    spec.right = std::move(right);
    return spec;
}

// Contour shared by the B and A_n kernels of one problem.
Contour control_contour(const ControlProblem& pb, const AccuracyProfile& profile) {
    // worst-case algebraic tail over the basis (unit coefficients)
    std::vector<double> ones(pb.N + 1, 1.0);
    const BoundarySignal probe = BoundarySignal::sine_series(ones, pb.tau, pb.T);
    IbvpSpec spec = control_spec(pb, probe);
    IbvpEvaluator ev(spec, profile);
    ev.prepare(pb.T - pb.tau, pb.T);
    return ev.contour();
}

} // namespace

ControlSystem assemble_system(const ControlProblem& problem, const AccuracyProfile& profile) {
    problem.validate();
    const ProblemParams& p = problem.params;
    const int N = problem.N;
    const int rows = N + 1;
    const double kap = p.kappa();
    const double E = std::exp(-kap * p.L);
    const double a = p.alpha.value();
    const double T = problem.T, tau = problem.tau;
    const Eigen::VectorXd xs = problem.collocation_xs();

    const RootReport roots = find_roots(p);
    const Contour contour = control_contour(problem, profile);
    const double coskL = std::exp(kap * p.L);

    // component layout: for row k, slot 0 is the B kernel, slot n the basis n
    const int m = rows * (N + 2);
    auto f = [&](Complex lam, std::span<Complex> out) {
        const Complex mu = lam + I * kap;
        const Complex nuv = -lam - 2.0 * I * kap;
        const Complex om = omega(lam, p);
        const Complex eomT = std::exp(-om * T);
        const Complex z = std::exp(2.0 * I * mu * p.L);
        const Complex Dh = (1.0 - I * a * lam) - z * (1.0 - I * a * nuv);
        const Complex pre = p.K0 - 2.0 * I * lam * p.D0;
        const Complex P = problem.initial.hat_anchored(lam, p.L);
        const Complex Q = problem.initial.hat(nuv, p.L);

        std::vector<Complex> tt(N + 1);
        for (int n = 1; n <= N + 1; ++n)
            tt[n - 1] = detail::tt_basis_damped(om, T, n, tau, T);

        for (int k = 0; k < rows; ++k) {
            const double x = xs[k];
            const Complex ex = std::exp(I * (p.L + x) * mu);
            const Complex emx = std::exp(I * (p.L - x) * mu);
            const Complex e2x = std::exp(I * (2.0 * p.L - x) * mu);
            const Complex exx = std::exp(I * x * mu);
            const Complex esin_x = coskL * (ex - emx) / (2.0 * I);
            const Complex ecos_x = coskL * (ex + emx) / 2.0;
            const Complex esin_Lx = coskL * (e2x - exx) / (2.0 * I);
            const Complex eFa = (a * kap - 1.0) * esin_x - a * mu * ecos_x;

            out[k * (N + 2)] = eomT * (eFa * E * P - (1.0 - I * a * nuv) * esin_Lx * Q) / Dh;
            const Complex col = pre * eFa * E / Dh;
            for (int n = 1; n <= N + 1; ++n) out[k * (N + 2) + n] = col * tt[n - 1];
        }
    };

    const std::vector<QuadResult> vals = integrate_many(contour, m, f, 1.0);

    ControlSystem sys;
    sys.A.resize(rows, N + 1);
    sys.b.resize(rows);
    std::ostringstream failures;
    for (int k = 0; k < rows; ++k) {
        const Complex pref = -I / M_PI * std::exp(-kap * (p.L - xs[k]));
        const QuadResult fourier = integrate_real_line(problem.initial, p, xs[k], T, profile);
        const Complex bk = fourier.value + pref * vals[k * (N + 2)].value;
        sys.b[k] = bk.real();
        if (std::abs(bk.imag()) > 1e-8 * (1.0 + std::abs(bk.real())))
            failures << " b[" << k << "] imag residual;";
        if (!vals[k * (N + 2)].converged || !fourier.converged) failures << " b[" << k << "];";
        for (int n = 1; n <= N + 1; ++n) {
            const QuadResult& q = vals[k * (N + 2) + n];
            const Complex akn = pref * q.value;
            sys.A(k, n - 1) = akn.real();
            if (std::abs(akn.imag()) > 1e-8 * (1.0 + std::abs(akn.real())))
                failures << " A[" << k << "][" << n - 1 << "] imag residual;";
            if (!q.converged) failures << " A[" << k << "][" << n - 1 << "];";
        }
    }
    const std::string fstr = failures.str();
    if (!fstr.empty()) throw NotConverged("assemble_system entries failed:" + fstr);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A);
    const auto& sv = svd.singularValues();
    sys.condition_estimate =
        (sv.size() > 0 && sv[sv.size() - 1] > 0.0) ? sv[0] / sv[sv.size() - 1] : INFINITY;
    return sys;
}

double rhs_B(const ControlProblem& problem, double x, const AccuracyProfile& profile) {
    problem.validate();
    IbvpSpec spec = control_spec(problem, BoundarySignal::zero());
    IbvpEvaluator ev(spec, profile);
    ev.prepare(problem.T, problem.T);
    const EvalDiag d = ev.eval(x, problem.T);
    return d.value;
}

double basis_response_A(const ControlProblem& problem, int n, double x,
                        const AccuracyProfile& profile) {
    problem.validate();
    if (n < 1 || n > problem.N + 1) throw InvalidSpec("basis index out of range");
    // response of the homogeneous problem to g = phi_n, with flipped sign
    std::vector<double> coeffs(problem.N + 1, 0.0);
    coeffs[n - 1] = 1.0;
    ControlProblem hom = problem;
    hom.initial = InitialData::zero();
    IbvpSpec spec = control_spec(hom, BoundarySignal::sine_series(coeffs, problem.tau, problem.T));
    IbvpEvaluator ev(spec, profile);
    ev.prepare(problem.T - problem.tau, problem.T);
    const EvalDiag d = ev.eval(x, problem.T);
    return -d.value;
}

ExactSolveInfo solve_exact_info(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw InvalidSpec("solve_exact expects a square system");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] <= 0.0) throw SingularSystem("zero matrix");
    const double cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
    if (sv[sv.size() - 1] < 1e-300 * sv[0]) throw SingularSystem("pivot below 1e-300 relative");

    ExactSolveInfo info;
    info.condition = cond;
    if (cond <= 1e12) {
        info.coeffs = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(b);
        info.path = "lu";
    } else {
        // near-singular: minimum-norm least squares with a machine-threshold cutoff
        const double cutoff = sv[0] * A.rows() * std::numeric_limits<double>::epsilon();
        Eigen::VectorXd ub = svd.matrixU().transpose() * b;
        Eigen::VectorXd y(sv.size());
        for (int i = 0; i < sv.size(); ++i) y[i] = (sv[i] > cutoff) ? ub[i] / sv[i] : 0.0;
        info.coeffs = svd.matrixV() * y;
        info.path = "svd";
    }
    info.residual_norm = (A * info.coeffs - b).norm();
    return info;
}

Eigen::VectorXd solve_exact(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    return solve_exact_info(A, b).coeffs;
}

Eigen::VectorXd solve_regularized(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  double delta) {
    if (!(delta > 0.0)) throw InvalidSpec("delta must be positive");
    if (b.norm() <= delta) return Eigen::VectorXd::Zero(A.cols());

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const Eigen::VectorXd ub = svd.matrixU().transpose() * b;
    const double perp2 = std::max(0.0, b.squaredNorm() - ub.squaredNorm());

    auto coeffs_for = [&](double mu) {
        Eigen::VectorXd y(sv.size());
        for (int i = 0; i < sv.size(); ++i) y[i] = sv[i] * ub[i] / (sv[i] * sv[i] + mu);
        return Eigen::VectorXd(svd.matrixV() * y);
    };
    auto discrepancy = [&](double mu) {
        double d2 = perp2;
        for (int i = 0; i < sv.size(); ++i) {
            const double r = mu / (sv[i] * sv[i] + mu);
            d2 += r * r * ub[i] * ub[i];
        }
        return std::sqrt(d2);
    };

    // The discrepancy is monotone increasing in mu; if even mu -> 0 cannot
    // reach delta the minimum-norm least-squares limit is returned.
    const double smax = sv[0];
    double lo = 1e-30 * smax * smax, hi = 1e30 * smax * smax;
    if (discrepancy(lo) >= delta) return coeffs_for(lo);
    for (int it = 0; it < 400; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (discrepancy(mid) < delta)
            lo = mid;
        else
            hi = mid;
        if (hi / lo < 1.0 + 1e-12) break;
    }
    double mu = std::sqrt(lo * hi);
    // Newton polish on log(mu) for |Ac - b| = delta to 1e-6 relative
    for (int it = 0; it < 60; ++it) {
        const double d = discrepancy(mu);
        if (std::abs(d - delta) <= 1e-6 * delta) break;
        const double dp = discrepancy(mu * 1.0001);
        const double slope = (dp - d) / (0.0001 * mu);
        if (slope <= 0.0) break;
        double step = (delta - d) / slope;
        step = std::clamp(step, -0.5 * mu, 2.0 * mu);
        mu = std::max(mu + step, 1e-300);
    }
    return coeffs_for(mu);
}

double reconstruct_control(const Eigen::VectorXd& coeffs, double t, double tau, double T) {
    double v = 0.0;
    for (int n = 0; n < coeffs.size(); ++n) v += coeffs[n] * phi_n(t, n + 1, tau, T);
    return v;
}

double norm_l2_time(const Eigen::VectorXd& coeffs, double tau, double T) {
    return std::sqrt(0.5 * (T - tau) * coeffs.squaredNorm());
}

double norm_l2_space(const Eigen::VectorXd& xs, const Eigen::VectorXd& values) {
    const int n = static_cast<int>(xs.size());
    if (n < 3 || n % 2 == 0) throw InvalidSpec("Simpson norm needs an odd number of points >= 3");
    const double h = (xs[n - 1] - xs[0]) / (n - 1);
    double acc = values[0] * values[0] + values[n - 1] * values[n - 1];
    for (int i = 1; i < n - 1; ++i) acc += (i % 2 ? 4.0 : 2.0) * values[i] * values[i];
    return std::sqrt(acc * h / 3.0);
}

VerifyResult verify_control(const ControlProblem& problem, const Eigen::VectorXd& coeffs,
                            const AccuracyProfile& profile) {
    problem.validate();
    if (coeffs.size() != problem.N + 1)
        throw InvalidSpec("coefficient count must be N+1");
    std::vector<double> cv(coeffs.data(), coeffs.data() + coeffs.size());
    const bool all_zero = coeffs.lpNorm<Eigen::Infinity>() == 0.0;
    IbvpSpec spec = control_spec(
        problem, all_zero ? BoundarySignal::zero()
                          : BoundarySignal::sine_series(cv, problem.tau, problem.T));

    const int npts = 201;
    std::vector<double> xs(npts);
    for (int i = 0; i < npts; ++i) xs[i] = problem.params.L * i / (npts - 1);

    IbvpEvaluator ev(spec, profile);
    ev.prepare(problem.T - problem.tau, problem.T);
    const auto vals = ev.eval_many(xs, problem.T);

    VerifyResult res;
    res.final_profile.xs = Eigen::Map<const Eigen::VectorXd>(xs.data(), npts);
    res.final_profile.ts = Eigen::VectorXd::Constant(1, problem.T);
    res.final_profile.values.resize(npts, 1);
    res.final_profile.converged.resize(npts, 1);
    for (int i = 0; i < npts; ++i) {
        res.final_profile.values(i, 0) = vals[i].value;
        res.final_profile.converged(i, 0) = vals[i].converged;
    }
    res.final_error_norm = norm_l2_space(res.final_profile.xs, res.final_profile.values.col(0));
    return res;
}

double choose_delta(const ControlProblem& problem, const ControlSystem& system,
                    double target_error, double lo, double hi,
                    const AccuracyProfile& profile) {
    if (!(target_error > 0.0)) throw InvalidSpec("target error must be positive");
    auto err_at = [&](double delta) {
        const Eigen::VectorXd c = solve_regularized(system.A, system.b, delta);
        return verify_control(problem, c, profile).final_error_norm;
    };
    // verified error grows with delta; bisect in log space
    double flo = err_at(lo), fhi = err_at(hi);
    if (flo >= target_error) return lo;
    if (fhi <= target_error) return hi;
    double dlo = lo, dhi = hi;
    for (int it = 0; it < 30; ++it) {
        const double mid = std::sqrt(dlo * dhi);
        const double f = err_at(mid);
        if (std::abs(f - target_error) <= 0.15 * target_error) return mid;
        if (f < target_error)
            dlo = mid;
        else
            dhi = mid;
    }
    (void)flo;
    (void)fhi;
    return std::sqrt(dlo * dhi);
}

ControlSolution run_control(const ControlProblem& problem, std::optional<double> delta,
                            const AccuracyProfile& profile) {
    const ControlSystem sys = assemble_system(problem, profile);
    ControlSolution sol;
    sol.condition_estimate = sys.condition_estimate;
    if (delta) {
        sol.coeffs = solve_regularized(sys.A, sys.b, *delta);
        sol.regularized = true;
        sol.delta = *delta;
        sol.solve_path = "svd";
    } else {
        const ExactSolveInfo info = solve_exact_info(sys.A, sys.b);
        sol.coeffs = info.coeffs;
        sol.solve_path = info.path;
    }
    sol.residual_norm = (sys.A * sol.coeffs - sys.b).norm();
    sol.control_norm = norm_l2_time(sol.coeffs, problem.tau, problem.T);
    sol.verified_error = verify_control(problem, sol.coeffs, profile).final_error_norm;
    return sol;
}

} // namespace fokas
