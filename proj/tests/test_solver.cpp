#include <doctest.h>

#include <random>

#include "fokas/solver.hpp"
#include "oracles.hpp"

using namespace fokas;

namespace {

IbvpSpec dd_spec(double D0, double K0, double L, InitialData init,
                 BoundarySignal f = BoundarySignal::zero(),
                 BoundarySignal g = BoundarySignal::zero()) {
    IbvpSpec s;
    s.params = make_params(D0, K0, L, 0.0, 0.0);
    s.bc_kind = BcKind::DirichletDirichlet;
    s.initial = std::move(init);
    s.left = std::move(f);
    s.right = std::move(g);
    return s;
}

} // namespace

TEST_CASE("dirichlet-dirichlet heat mode matches the separable solution") {
    auto spec = dd_spec(1.0, 0.0, 1.0, InitialData::full_sine());
    IbvpEvaluator ev(spec);
    ev.prepare(0.01, 1.0);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ux(0.0, 1.0), ut(0.01, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double x = ux(rng), t = ut(rng);
        const EvalDiag d = ev.eval(x, t);
        CHECK(d.converged);
        CHECK(std::abs(d.value - oracles::heat_mode(x, t, 1.0, 1.0)) < 1e-8);
    }
}

TEST_CASE("dirichlet-dirichlet advection mode matches the separable solution") {
    // theta0 = e^{x/2} sin(pi x), K0 = D0 = 1
    auto spec = dd_spec(1.0, 1.0, 1.0, InitialData::exp_sine(0.5));
    IbvpEvaluator ev(spec);
    ev.prepare(0.05, 0.6);
    for (double t : {0.05, 0.2, 0.6}) {
        for (double x : {0.2, 0.5, 0.85}) {
            const EvalDiag d = ev.eval(x, t);
            CHECK(std::abs(d.value - oracles::advection_mode(x, t, 1.0, 1.0, 1.0)) < 1e-7);
        }
    }

    // the tabulated fallback reproduces the same field to interpolation accuracy
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i <= 400; ++i) {
        const double x = i / 400.0;
        samples.emplace_back(x, std::exp(0.5 * x) * std::sin(M_PI * x));
    }
    auto tab = dd_spec(1.0, 1.0, 1.0, InitialData::tabulated(samples));
    CHECK(std::abs(solve_dd(tab, 0.5, 0.2) - oracles::advection_mode(0.5, 0.2, 1.0, 1.0, 1.0)) <
          1e-5);
}

TEST_CASE("dirichlet boundary recovery for constant data") {
    auto spec = dd_spec(1.0, 0.5, 1.0, InitialData::zero(), BoundarySignal::constant(0.7),
                        BoundarySignal::constant(-0.4));
    IbvpEvaluator ev(spec);
    ev.prepare(0.1, 0.8);
    for (double t : {0.1, 0.35, 0.8}) {
        CHECK(std::abs(ev.eval(0.0, t).value - 0.7) < 1e-6);
        CHECK(std::abs(ev.eval(1.0, t).value + 0.4) < 1e-6);
    }
}

TEST_CASE("zero data gives the zero solution") {
    auto spec = dd_spec(1.0, 0.3, 1.0, InitialData::zero());
    IbvpEvaluator ev(spec);
    for (double t : {0.0, 0.2, 1.0})
        for (double x : {0.0, 0.4, 1.0}) CHECK(std::abs(ev.eval(x, t).value) < 1e-12);
}

TEST_CASE("robin-dirichlet: initial recovery, boundary recovery, beta-continuity") {
    IbvpSpec spec;
    spec.params = make_params(1.0, 0.5, 1.0, 1.0, 0.0);
    spec.bc_kind = BcKind::RobinDirichlet;
    spec.initial = InitialData::piecewise_step(1.0, 0.5);
    spec.left = BoundarySignal::zero();
    spec.right = BoundarySignal::constant(0.9);

    IbvpEvaluator ev(spec);
    ev.prepare(0.05, 0.5);

    // t = 0 recovers theta0 at interior points
    for (double x : {0.2, 0.4, 0.7})
        CHECK(std::abs(ev.eval(x, 0.0).value - spec.initial.value(x, 1.0)) < 1e-6);

    // Dirichlet datum recovered at x = L
    for (double t : {0.05, 0.2, 0.5}) CHECK(std::abs(ev.eval(1.0, t).value - 0.9) < 1e-6);

    // solve_rd agrees with solve_rr at beta -> 0
    IbvpSpec rr = spec;
    rr.bc_kind = BcKind::RobinRobin;
    rr.params.beta = RobinCoeff::finite(1e-8);
    for (double t : {0.1, 0.4}) {
        for (double x : {0.3, 0.8}) {
            CHECK(std::abs(solve_rd(spec, x, t) - solve_rr(rr, x, t)) < 1e-6);
        }
    }
}

TEST_CASE("linearity of the solution map") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a = 1.3, b = -0.8;

    auto make_rd = [&](double h, double fl, double gr) {
        IbvpSpec s;
        s.params = make_params(0.8, 0.4, 1.2, 0.6, 0.0);
        s.bc_kind = BcKind::RobinDirichlet;
        s.initial = InitialData::piecewise_step(h, 0.5);
        s.left = BoundarySignal::constant(fl);
        s.right = BoundarySignal::constant(gr);
        return s;
    };
    for (int i = 0; i < 3; ++i) {
        const double h1 = u(rng), f1 = u(rng), g1 = u(rng);
        const double h2 = u(rng), f2 = u(rng), g2 = u(rng);
        auto s1 = make_rd(h1, f1, g1);
        auto s2 = make_rd(h2, f2, g2);
        auto smix = make_rd(a * h1 + b * h2, a * f1 + b * f2, a * g1 + b * g2);
        const double x = 0.3 + 0.5 * u(rng), t = 0.15;
        CHECK(std::abs(solve_rd(smix, x, t) - a * solve_rd(s1, x, t) - b * solve_rd(s2, x, t)) <
              1e-8);
    }
}

TEST_CASE("interior PDE residual and Robin boundary residual") {
    IbvpSpec spec;
    spec.params = make_params(1.0, 0.5, 1.0, 1.0, 0.0);
    spec.bc_kind = BcKind::RobinDirichlet;
    spec.initial = InitialData::full_sine();
    spec.left = BoundarySignal::constant(0.3);
    spec.right = BoundarySignal::constant(0.1);
    IbvpEvaluator ev(spec);
    ev.prepare(0.1, 0.5);

    const double h = 1e-3;
    double max_resid = 0.0;
    for (int i = 1; i <= 5; ++i) {
        for (int j = 1; j <= 5; ++j) {
            const double x = 0.15 + 0.7 * (i - 1) / 4.0;
            const double t = 0.12 + 0.3 * (j - 1) / 4.0;
            const double txp = ev.eval(x + h, t).value, txm = ev.eval(x - h, t).value;
            const double t0 = ev.eval(x, t).value;
            const double ttp = ev.eval(x, t + h).value, ttm = ev.eval(x, t - h).value;
            const double ut = (ttp - ttm) / (2.0 * h);
            const double ux = (txp - txm) / (2.0 * h);
            const double uxx = (txp - 2.0 * t0 + txm) / (h * h);
            max_resid = std::max(max_resid, std::abs(ut + 0.5 * ux - uxx));
        }
    }
    CHECK(max_resid < 1e-3);

    // Robin end: theta(0,t) - alpha theta_x(0,t) = f(t), one-sided difference
    for (double t : {0.15, 0.4}) {
        const double th0 = ev.eval(0.0, t).value;
        const double th1 = ev.eval(h, t).value;
        const double th2 = ev.eval(2.0 * h, t).value;
        const double dx = (-3.0 * th0 + 4.0 * th1 - th2) / (2.0 * h);
        CHECK(std::abs(th0 - 1.0 * dx - 0.3) < 1e-4);
    }
}

TEST_CASE("contour independence of the assembled solution") {
    IbvpSpec spec;
    spec.params = make_params(1.0, 0.5, 1.0, 1.0, 0.0);
    spec.bc_kind = BcKind::RobinDirichlet;
    spec.initial = InitialData::piecewise_step(1.0, 0.5);
    spec.right = BoundarySignal::constant(0.2);

    struct Choice {
        double angle, offset;
    };
    const Choice choices[] = {{M_PI / 8.0, 0.5},
                              {M_PI / 6.0, 0.8},
                              {M_PI / 10.0, 0.6},
                              {M_PI / 5.0, 1.2},
                              {M_PI / 7.0, 0.35}};
    std::vector<double> vals;
    for (const Choice& ch : choices) {
        AccuracyProfile prof;
        prof.ray_angle = ch.angle;
        prof.offset_default = ch.offset;
        vals.push_back(solve_rd(spec, 0.6, 0.3, prof));
    }
    for (double v : vals) CHECK(std::abs(v - vals[0]) < 1e-8);
}

TEST_CASE("neumann-neumann: flat profile is conserved") {
    IbvpSpec spec;
    spec.params.D0 = 1.0;
    spec.params.K0 = 0.0;
    spec.params.L = 1.0;
    spec.params.alpha = RobinCoeff::neumann();
    spec.params.beta = RobinCoeff::neumann();
    spec.bc_kind = BcKind::NeumannNeumann;
    spec.initial = InitialData::constant(0.6);

    IbvpEvaluator ev(spec);
    ev.prepare(0.1, 1.0);
    for (double t : {0.1, 0.5, 1.0})
        for (double x : {0.0, 0.3, 1.0}) CHECK(std::abs(ev.eval(x, t).value - 0.6) < 1e-7);
}

TEST_CASE("neumann-neumann: spatial mean conserved for zero flux") {
    IbvpSpec spec;
    spec.params.D0 = 1.0;
    spec.params.K0 = 0.0;
    spec.params.L = 1.0;
    spec.params.alpha = RobinCoeff::neumann();
    spec.params.beta = RobinCoeff::neumann();
    spec.bc_kind = BcKind::NeumannNeumann;
    spec.initial = InitialData::full_sine();

    IbvpEvaluator ev(spec);
    ev.prepare(0.05, 0.4);
    const int n = 101;
    auto mean_at = [&](double t) {
        std::vector<double> xs(n), vals(n);
        for (int i = 0; i < n; ++i) xs[i] = i / double(n - 1);
        const auto col = ev.eval_many(xs, t);
        double acc = col[0].value + col[n - 1].value;
        for (int i = 1; i < n - 1; ++i) acc += (i % 2 ? 4.0 : 2.0) * col[i].value;
        return acc / (3.0 * (n - 1));
    };
    const double m0 = 2.0 / M_PI; // integral of sin(pi x)
    CHECK(std::abs(mean_at(0.05) - m0) < 1e-6);
    CHECK(std::abs(mean_at(0.4) - m0) < 1e-6);
}

TEST_CASE("neumann-neumann is the large-alpha robin limit") {
    const double fn = 0.4, gn = -0.2;
    IbvpSpec nn;
    nn.params.D0 = 1.0;
    nn.params.K0 = 0.3;
    nn.params.L = 1.0;
    nn.params.alpha = RobinCoeff::neumann();
    nn.params.beta = RobinCoeff::neumann();
    nn.bc_kind = BcKind::NeumannNeumann;
    nn.initial = InitialData::half_cosine();
    nn.left = BoundarySignal::constant(fn);
    nn.right = BoundarySignal::constant(gn);

    auto rr_at = [&](double a) {
        IbvpSpec rr = nn;
        rr.params.alpha = RobinCoeff::finite(a);
        rr.params.beta = RobinCoeff::finite(a);
        rr.bc_kind = BcKind::RobinRobin;
        rr.left = BoundarySignal::constant(-a * fn);
        rr.right = BoundarySignal::constant(-a * gn);
        return rr;
    };
    const double x = 0.45, t = 0.3;
    const double ref = solve_nn(nn, x, t);
    const double e3 = std::abs(solve_rr(rr_at(1e3), x, t) - ref);
    const double e4 = std::abs(solve_rr(rr_at(1e4), x, t) - ref);
    CHECK(e3 < 2e-3);
    CHECK(e4 < 2e-4);
    CHECK(e3 / e4 == doctest::Approx(10.0).epsilon(0.2));
}

TEST_CASE("braester scenario") {
    const double D0 = 0.208e-1, L = 60.0;
    const double q = 0.3e-3, th0 = 65e-3, ths = 397e-3;
    auto p = make_params(D0, 0.144 * D0, L, 1.0, 0.0);

    // initial value everywhere (including near the water table)
    for (double x : {0.0, 20.0, 45.0, 60.0})
        CHECK(std::abs(braester_profile(q, th0, ths, p, x, 0.0) - th0) < 1e-6);

    // saturation value held at x = L for all later times
    const double mins[] = {30.0, 60.0, 120.0};
    for (double m : mins)
        CHECK(std::abs(braester_profile(q, th0, ths, p, L, m * 60.0) - ths) < 1e-6);

    // profiles monotone nondecreasing in t at every fixed x
    for (double x : {0.0, 15.0, 30.0, 45.0, 57.0}) {
        double prev = braester_profile(q, th0, ths, p, x, 30.0 * 60.0);
        CHECK(prev >= th0 - 1e-6);
        for (double m : {60.0, 120.0}) {
            const double cur = braester_profile(q, th0, ths, p, x, m * 60.0);
            CHECK(cur >= prev - 1e-7);
            prev = cur;
        }
    }

    // dual route: the general Robin-Dirichlet solver reproduces the preset
    IbvpSpec spec = braester_spec(q, th0, ths, D0, L);
    IbvpEvaluator ev(spec);
    ev.prepare(1800.0, 7200.0);
    for (double x : {5.0, 25.0, 50.0}) {
        for (double tmin : {30.0, 120.0}) {
            const double a = braester_profile(q, th0, ths, p, x, tmin * 60.0);
            const double b = th0 + ev.eval(x, tmin * 60.0).value;
            CHECK(std::abs(a - b) < 1e-8);
        }
    }
}

TEST_CASE("quasi-linear conductivity scenario") {
    const double L = 0.05;

    // K(x, 0) = 0
    for (double x : {0.0, 0.02, 0.05}) CHECK(philip_conductivity(1.6, L, x, 0.0) == 0.0);

    // exact linearity in the rate R
    const double t = L / 1.6;
    for (double x : {0.0, 0.01, 0.03, 0.05}) {
        const double k16 = philip_conductivity(1.6, L, x, t);
        const double k23 = philip_conductivity(2.3, L, x, t);
        CHECK(k23 == doctest::Approx(k16 * 2.3 / 1.6).epsilon(1e-13));
    }

    // profile shape at t = L K1 / R, pinned against an independent
    // finite-difference solve of the same IBVP: decreasing from the inlet,
    // with the usual pile-up at the impermeable base
    for (double R : {1.6, 2.3}) {
        const double tR = L / R;
        double prev = philip_conductivity(R, L, 0.0, tR);
        CHECK(prev > 0.0);
        for (int i = 1; i <= 4; ++i) { // inlet side
            const double cur = philip_conductivity(R, L, i * L / 10.0, tR);
            CHECK(cur <= prev + 1e-10);
            prev = cur;
        }
    }
    // frozen finite-difference reference values (implicit Euler, 801x3000)
    CHECK(philip_conductivity(1.6, L, 0.0, L / 1.6) == doctest::Approx(1.00415).epsilon(2e-4));
    CHECK(philip_conductivity(1.6, L, 0.02, L / 1.6) == doctest::Approx(0.99233).epsilon(2e-4));
    CHECK(philip_conductivity(1.6, L, 0.05, L / 1.6) == doctest::Approx(1.02282).epsilon(2e-4));
    CHECK(philip_conductivity(2.3, L, 0.0, L / 2.3) == doctest::Approx(1.02750).epsilon(2e-4));

    // dual route against the general Robin-Robin solver
    IbvpSpec spec = philip_spec(1.6, L);
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> ux(0.0, L), ut(0.2 * L / 1.6, 2.0 * L / 1.6);
    IbvpEvaluator ev(spec);
    ev.prepare(0.2 * L / 1.6, 2.0 * L / 1.6);
    for (int i = 0; i < 20; ++i) {
        const double x = ux(rng), t = ut(rng);
        CHECK(std::abs(philip_conductivity(1.6, L, x, t) - ev.eval(x, t).value) < 1e-9);
    }
}

TEST_CASE("solve_grid basics") {
    IbvpSpec spec = dd_spec(1.0, 0.0, 1.0, InitialData::full_sine());

    const SolutionGrid single = solve_grid(spec, {0.4}, {0.2});
    CHECK(single.values(0, 0) == doctest::Approx(solve_dd(spec, 0.4, 0.2)).epsilon(1e-12));
    CHECK(single.converged(0, 0));

    const std::vector<double> xs = {0.2, 0.5, 0.8};
    const std::vector<double> perm = {0.8, 0.2, 0.5};
    const std::vector<double> ts = {0.1, 0.3};
    const SolutionGrid g1 = solve_grid(spec, xs, ts);
    const SolutionGrid g2 = solve_grid(spec, perm, ts);
    for (int j = 0; j < 2; ++j) {
        CHECK(g2.values(0, j) == doctest::Approx(g1.values(2, j)).epsilon(1e-14));
        CHECK(g2.values(1, j) == doctest::Approx(g1.values(0, j)).epsilon(1e-14));
        CHECK(g2.values(2, j) == doctest::Approx(g1.values(1, j)).epsilon(1e-14));
    }
}

TEST_CASE("realness diagnostic") {
    IbvpSpec spec;
    spec.params = make_params(1.0, 0.5, 1.0, 0.7, 0.4);
    spec.bc_kind = BcKind::RobinRobin;
    spec.initial = InitialData::piecewise_step(1.0, 0.5);
    spec.left = BoundarySignal::constant(0.4);
    spec.right = BoundarySignal::constant(-0.1);
    IbvpEvaluator ev(spec);
    ev.prepare(0.1, 0.6);
    for (double t : {0.1, 0.6})
        for (double x : {0.0, 0.5, 1.0}) {
            const EvalDiag d = ev.eval(x, t);
            CHECK(d.imag_residual < 1e-8 * (1.0 + std::abs(d.value)));
        }
}

TEST_CASE("spec validation rejects mismatched boundary kinds") {
    IbvpSpec spec;
    spec.params = make_params(1.0, 0.0, 1.0, 0.5, 0.0);
    spec.bc_kind = BcKind::DirichletDirichlet; // alpha != 0
    CHECK_THROWS_AS(spec.validate(), InvalidSpec);
    spec.bc_kind = BcKind::NeumannNeumann;
    CHECK_THROWS_AS(spec.validate(), InvalidSpec);
    spec.bc_kind = BcKind::RobinDirichlet;
    CHECK_NOTHROW(spec.validate());
}
