#include <doctest.h>

#include <random>

#include "fokas/control.hpp"
#include "oracles.hpp"

using namespace fokas;

namespace {

// Example-1 family: D0 = 1, K0 = 1/2, L = 1, alpha = 1, piecewise step IC.
ControlProblem example1(int N, double T) {
    ControlProblem pb;
    pb.params = make_params(1.0, 0.5, 1.0, 1.0, 0.0);
    pb.initial = InitialData::piecewise_step(1.0, 0.5);
    pb.T = T;
    pb.tau = 0.0;
    pb.N = N;
    return pb;
}

// Example-3 family: heat equation, Dirichlet-Dirichlet, sine IC.
ControlProblem example3(int N, double T) {
    ControlProblem pb;
    pb.params = make_params(1.0, 0.0, 1.0, 0.0, 0.0);
    pb.initial = InitialData::full_sine();
    pb.T = T;
    pb.tau = 0.0;
    pb.N = N;
    return pb;
}

} // namespace

TEST_CASE("collocation points are interior and equidistant") {
    const ControlProblem pb = example1(2, 1.0);
    const Eigen::VectorXd xs = pb.collocation_xs();
    REQUIRE(xs.size() == 3);
    CHECK(xs[0] == doctest::Approx(0.25));
    CHECK(xs[1] == doctest::Approx(0.5));
    CHECK(xs[2] == doctest::Approx(0.75));
}

TEST_CASE("rhs_B equals the free evolution") {
    ControlProblem pb = example1(2, 0.5);

    // zero initial data -> B identically zero
    ControlProblem zb = pb;
    zb.initial = InitialData::zero();
    for (double x : {0.25, 0.6}) CHECK(std::abs(rhs_B(zb, x)) < 1e-12);

    // sine free-evolution oracle for the heat case
    ControlProblem hb = example3(2, 0.5);
    for (double x : {0.25, 0.5, 0.75})
        CHECK(std::abs(rhs_B(hb, x) - oracles::heat_mode(x, 0.5, 1.0, 1.0)) < 1e-8);

    // B is the f = g = 0 solve at (x, T)
    IbvpSpec free_spec;
    free_spec.params = pb.params;
    free_spec.bc_kind = BcKind::RobinDirichlet;
    free_spec.initial = pb.initial;
    for (double x : {0.3, 0.7})
        CHECK(std::abs(rhs_B(pb, x) - solve_rd(free_spec, x, pb.T)) < 1e-8);
}

TEST_CASE("basis response: sign convention and data independence") {
    ControlProblem pb = example1(2, 0.5);

    // basis transform is empty for t <= tau
    CHECK(std::abs(fokas::detail::tt_basis_damped(Complex(1.0, 0.3), 0.0, 1, 0.0, 0.5)) == 0.0);

    // response is independent of the initial data
    ControlProblem other = pb;
    other.initial = InitialData::half_cosine();
    for (int n : {1, 3}) {
        for (double x : {0.25, 0.75}) {
            CHECK(basis_response_A(pb, n, x) ==
                  doctest::Approx(basis_response_A(other, n, x)).epsilon(1e-12));
        }
    }

    // superposition sign: solve_rd with g = phi_n equals -A_n
    for (int n : {1, 2}) {
        std::vector<double> c(pb.N + 1, 0.0);
        c[n - 1] = 1.0;
        IbvpSpec spec;
        spec.params = pb.params;
        spec.bc_kind = BcKind::RobinDirichlet;
        spec.initial = InitialData::zero();
        spec.right = BoundarySignal::sine_series(c, pb.tau, pb.T);
        for (double x : {0.25, 0.5}) {
            CHECK(std::abs(solve_rd(spec, x, pb.T) + basis_response_A(pb, n, x)) < 1e-8);
        }
    }
}

TEST_CASE("assemble_system dimensions, realness, zero data") {
    ControlProblem pb = example1(2, 0.5);
    const ControlSystem sys = assemble_system(pb);
    CHECK(sys.A.rows() == 3);
    CHECK(sys.A.cols() == 3);
    CHECK(sys.b.size() == 3);
    CHECK(sys.condition_estimate > 1.0);

    // entries match the scalar operations
    const Eigen::VectorXd xs = pb.collocation_xs();
    for (int k = 0; k < 3; ++k) {
        CHECK(sys.b[k] == doctest::Approx(rhs_B(pb, xs[k])).epsilon(1e-9));
        for (int n = 1; n <= 3; ++n)
            CHECK(sys.A(k, n - 1) ==
                  doctest::Approx(basis_response_A(pb, n, xs[k])).epsilon(1e-9));
    }

    ControlProblem zb = pb;
    zb.initial = InitialData::zero();
    const ControlSystem zsys = assemble_system(zb);
    CHECK(zsys.b.norm() < 1e-12);
    const Eigen::VectorXd c = solve_exact(zsys.A, zsys.b);
    CHECK(c.norm() < 1e-10);
}

TEST_CASE("solve_exact basics") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
    b[0] = 1.0;
    const Eigen::VectorXd c = solve_exact(A, b);
    CHECK((c - b).norm() < 1e-15);

    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(solve_exact(Z, Eigen::VectorXd::Zero(2)), SingularSystem);
}

TEST_CASE("table value: example 1, N=2, T=1/2 control norm") {
    const ControlSolution sol = run_control(example1(2, 0.5), std::nullopt);
    CHECK(sol.control_norm == doctest::Approx(0.346233).epsilon(0.01));
    CHECK(sol.solve_path == "lu");
    CHECK(sol.residual_norm < 1e-10);
}

TEST_CASE("table value: example 3, N=2, T=1/2 control norm") {
    const ControlSolution sol = run_control(example3(2, 0.5), std::nullopt);
    CHECK(sol.control_norm == doctest::Approx(5.527160e-2).epsilon(0.01));
}

TEST_CASE("superposition identity on the collocation grid") {
    ControlProblem pb = example1(3, 0.8);
    const ControlSystem sys = assemble_system(pb);
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd c(pb.N + 1);
    for (int i = 0; i <= pb.N; ++i) c[i] = u(rng);

    std::vector<double> cv(c.data(), c.data() + c.size());
    IbvpSpec spec;
    spec.params = pb.params;
    spec.bc_kind = BcKind::RobinDirichlet;
    spec.initial = pb.initial;
    spec.right = BoundarySignal::sine_series(cv, pb.tau, pb.T);

    const Eigen::VectorXd xs = pb.collocation_xs();
    for (int k = 0; k <= pb.N; ++k) {
        const double lhs = solve_rd(spec, xs[k], pb.T);
        const double rhs = sys.b[k] - (sys.A.row(k) * c)(0);
        CHECK(std::abs(lhs - rhs) < 1e-6);
    }
}

TEST_CASE("exact solve zeroes the residual at collocation points") {
    ControlProblem pb = example1(2, 1.0);
    const ControlSystem sys = assemble_system(pb);
    const Eigen::VectorXd c = solve_exact(sys.A, sys.b);
    const double resid = (sys.A * c - sys.b).lpNorm<Eigen::Infinity>();
    CHECK(resid < sys.condition_estimate * 1e-12);
}

TEST_CASE("reconstruct_control and norms") {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
    CHECK(reconstruct_control(zero, 0.35, 0.0, 1.0) == 0.0);
    CHECK(norm_l2_time(zero, 0.0, 1.0) == 0.0);

    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(3);
    e1[0] = 1.0;
    CHECK(reconstruct_control(e1, 1.0, 0.0, 2.0) == doctest::Approx(1.0)); // phi_1 peak
    CHECK(norm_l2_time(e1, 0.0, 2.0) == doctest::Approx(1.0));

    // Parseval identity against direct quadrature
    Eigen::VectorXd c(3);
    c << 0.7, -0.3, 1.1;
    const double tau = 0.25, T = 1.5;
    const int n = 20001;
    std::vector<double> ts(n), vs(n);
    for (int i = 0; i < n; ++i) {
        ts[i] = T * i / (n - 1);
        vs[i] = reconstruct_control(c, ts[i], tau, T);
    }
    CHECK(norm_l2_time(c, tau, T) == doctest::Approx(oracles::simpson_norm(ts, vs)).epsilon(1e-8));
}

TEST_CASE("solve_regularized: feasibility, limits, monotone trade-off") {
    ControlProblem pb = example1(2, 0.5);
    const ControlSystem sys = assemble_system(pb);

    // delta >= ||b|| gives the zero control
    const double bn = sys.b.norm();
    CHECK(solve_regularized(sys.A, sys.b, bn * 1.01).norm() == 0.0);

    // delta -> 0 approaches the exact solve for this well-conditioned system
    const Eigen::VectorXd cx = solve_exact(sys.A, sys.b);
    const Eigen::VectorXd cr = solve_regularized(sys.A, sys.b, 1e-12);
    CHECK((cx - cr).norm() < 1e-6 * (1.0 + cx.norm()));

    // the discrepancy constraint is active: ||A c - b|| = delta
    const double delta = 0.3 * bn;
    const Eigen::VectorXd cd = solve_regularized(sys.A, sys.b, delta);
    CHECK((sys.A * cd - sys.b).norm() == doctest::Approx(delta).epsilon(1e-5));

    // ||c(delta)|| nonincreasing, residual nondecreasing
    double prev_cn = 1e300, prev_rn = 0.0;
    for (double d : {1e-6, 1e-4, 1e-2, 0.3 * bn, 0.8 * bn}) {
        const Eigen::VectorXd c = solve_regularized(sys.A, sys.b, d);
        const double cn = c.norm(), rn = (sys.A * c - sys.b).norm();
        CHECK(cn <= prev_cn + 1e-12);
        CHECK(rn >= prev_rn - 1e-12);
        prev_cn = cn;
        prev_rn = rn;
    }
}

TEST_CASE("verify_control closed loop") {
    // zero coefficients, zero data: zero final error
    ControlProblem zb = example1(2, 0.5);
    zb.initial = InitialData::zero();
    CHECK(verify_control(zb, Eigen::VectorXd::Zero(3)).final_error_norm < 1e-10);

    // exact control drives the final error far below the uncontrolled norm
    ControlProblem pb = example1(2, 1.0);
    const ControlSystem sys = assemble_system(pb);
    const Eigen::VectorXd c = solve_exact(sys.A, sys.b);
    const double err = verify_control(pb, c).final_error_norm;
    const double free_norm = verify_control(pb, Eigen::VectorXd::Zero(3)).final_error_norm;
    CHECK(err < 1e-4 * free_norm);
    // Table-2 magnitude: 4.749178e-7 at N=2, T=1 (order of magnitude)
    CHECK(err < 5e-6);
    CHECK(err > 5e-8);
}

TEST_CASE("error decay in N at fixed T") {
    const double T = 1.0;
    double prev = 1e300;
    for (int N : {2, 4}) {
        ControlProblem pb = example1(N, T);
        const ControlSystem sys = assemble_system(pb);
        const Eigen::VectorXd c = solve_exact(sys.A, sys.b);
        const double err = verify_control(pb, c).final_error_norm;
        CHECK(err < prev * 1e-2);
        prev = err;
    }
}

TEST_CASE("cost growth as T shrinks") {
    double prev = 0.0;
    for (double T : {2.0, 1.0, 0.5}) {
        const ControlSolution sol = run_control(example1(2, T), std::nullopt);
        CHECK(sol.control_norm > prev);
        prev = sol.control_norm;
    }
}

TEST_CASE("choose_delta hits a target error band") {
    ControlProblem pb = example1(4, 0.5);
    const ControlSystem sys = assemble_system(pb);
    const double target = 1e-3;
    const double d = choose_delta(pb, sys, target);
    const Eigen::VectorXd c = solve_regularized(sys.A, sys.b, d);
    const double err = verify_control(pb, c).final_error_norm;
    CHECK(err > 0.2 * target);
    CHECK(err < 5.0 * target);
    // regularized control is no larger than the exact one
    const Eigen::VectorXd cx = solve_exact(sys.A, sys.b);
    CHECK(c.norm() <= cx.norm() + 1e-12);
}

TEST_CASE("control problem validation") {
    ControlProblem pb = example1(2, 1.0);
    pb.params.beta = RobinCoeff::finite(0.3);
    CHECK_THROWS_AS(pb.validate(), InvalidSpec);
    pb = example1(2, 1.0);
    pb.tau = 1.0;
    CHECK_THROWS_AS(pb.validate(), InvalidSpec);
    pb = example1(0, 1.0);
    CHECK_THROWS_AS(pb.validate(), InvalidSpec);
}
