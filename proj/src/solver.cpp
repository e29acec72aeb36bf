#include "fokas/solver.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstdlib>
#include <thread>

namespace fokas {

void IbvpSpec::validate() const {
    params.validate();
    initial.validate(params.L);
    switch (bc_kind) {
        case BcKind::RobinRobin:
            params.alpha.value();
            params.beta.value();
            break;
        case BcKind::RobinDirichlet:
            params.alpha.value();
            if (params.beta.is_neumann() || params.beta.value() != 0.0)
                throw InvalidSpec("Robin-Dirichlet requires beta = 0");
            break;
        case BcKind::DirichletDirichlet:
            if (params.alpha.is_neumann() || params.beta.is_neumann() ||
                params.alpha.value() != 0.0 || params.beta.value() != 0.0)
                throw InvalidSpec("Dirichlet-Dirichlet requires alpha = beta = 0");
            break;
        case BcKind::NeumannNeumann:
            if (!params.alpha.is_neumann() || !params.beta.is_neumann())
                throw InvalidSpec("Neumann-Neumann requires both Neumann markers");
            break;
    }
}

namespace {

double signal_scale(const BoundarySignal& s) {
    if (s.kind() == BoundarySignal::Kind::Constant) return std::abs(s.constant_value());
    double a = 0.0;
    for (double c : s.coeffs()) a += std::abs(c);
    return a;
}

// Truncation needed so the algebraic 1/w^4 tail of a damped sine-series
// kernel drops below tol_abs.
double sine_tail_request(const BoundarySignal& s, const ProblemParams& p, double tol_abs) {
    if (s.kind() != BoundarySignal::Kind::SineSeries) return 0.0;
    double amp = 0.0;
    for (size_t n = 0; n < s.coeffs().size(); ++n) {
        const double om = (n + 1) * M_PI / (s.final_time() - s.tau());
        amp += std::abs(s.coeffs()[n]) * om * om * om;
    }
    if (amp == 0.0) return 0.0;
    const double kr = std::exp(p.kappa() * p.L);
    return std::pow(kr * amp / (3.0 * p.D0 * p.D0 * p.D0 * std::max(tol_abs, 1e-300)), 1.0 / 6.0);
}

} // namespace

struct IbvpEvaluator::NodeCommon {
    Complex lam, mu, nuv, om, eomt, pre, Dh;
    Complex P, Q, TTf, TTg;
    double coskL; // e^{kappa L} prefactor of the anchored trig units
    Complex elp[2]; // reserved
};

IbvpEvaluator::IbvpEvaluator(IbvpSpec spec, AccuracyProfile profile)
    : spec_(std::move(spec)), profile_(profile) {
    spec_.validate();
    kappa_ = spec_.params.kappa();
    E_ = std::exp(-kappa_ * spec_.params.L);
    if (spec_.bc_kind == BcKind::NeumannNeumann) {
        roots_.classification_valid = false; // determinant roots all on the symmetry line
        roots_.predicted_count = 0;
    } else {
        roots_ = find_roots(spec_.params);
    }
}

double IbvpEvaluator::data_scale() const {
    double s = signal_scale(spec_.left) + signal_scale(spec_.right);
    for (int i = 0; i <= 8; ++i)
        s = std::max(s, std::abs(spec_.initial.value(spec_.params.L * i / 8.0, spec_.params.L)));
    return std::max(s, 1e-12);
}

void IbvpEvaluator::prepare(double t_min, double t_max) {
    ContourOptions opts;
    opts.t_max = t_max;
    const double tol_abs = profile_.rel_quad_tol * data_scale();
    opts.s_request = std::max(sine_tail_request(spec_.left, spec_.params, tol_abs),
                              sine_tail_request(spec_.right, spec_.params, tol_abs));
    opts.alternative_decay = opts.s_request > 0.0;
    contour_ = make_contour(spec_.params, roots_, t_min, profile_, opts);
}

const Contour& IbvpEvaluator::contour() const {
    if (!contour_) throw Error("contour not prepared");
    return *contour_;
}

IbvpEvaluator::NodeCommon IbvpEvaluator::node_common(Complex lam, double t) const {
    const ProblemParams& p = spec_.params;
    NodeCommon c;
    c.lam = lam;
    c.mu = lam + I * kappa_;
    c.nuv = -lam - 2.0 * I * kappa_;
    c.om = omega(lam, p);
    c.eomt = std::exp(-c.om * t);
    c.pre = p.K0 - 2.0 * I * lam * p.D0;
    c.coskL = std::exp(kappa_ * p.L);

    const Complex z = std::exp(2.0 * I * c.mu * p.L);
    switch (spec_.bc_kind) {
        case BcKind::RobinRobin: {
            const double a = p.alpha.value(), b = p.beta.value();
            c.Dh = (1.0 - I * a * lam) * (1.0 - I * b * c.nuv) -
                   z * (1.0 - I * a * c.nuv) * (1.0 - I * b * lam);
            break;
        }
        case BcKind::RobinDirichlet: {
            const double a = p.alpha.value();
            c.Dh = (1.0 - I * a * lam) - z * (1.0 - I * a * c.nuv);
            break;
        }
        default:
            c.Dh = 1.0 - z;
            break;
    }
    c.P = spec_.initial.is_zero() ? Complex{0.0, 0.0} : spec_.initial.hat_anchored(lam, p.L);
    c.Q = spec_.initial.is_zero() ? Complex{0.0, 0.0} : spec_.initial.hat(c.nuv, p.L);
    c.TTf = spec_.left.tt_damped(c.om, t);
    c.TTg = spec_.right.tt_damped(c.om, t);
    return c;
}

Complex IbvpEvaluator::kernel_at(const NodeCommon& c, double x) const {
    const ProblemParams& p = spec_.params;
    const double L = p.L;
    // anchored trig units e^{i lam L} sin(y mu), e^{i lam L} cos(y mu), y >= 0
    const Complex ex = std::exp(I * (L + x) * c.mu);   // |.| <= 1 on the contour
    const Complex emx = std::exp(I * (L - x) * c.mu);
    auto esin = [&](bool at_x) { // y = x or y = L - x
        return at_x ? c.coskL * (ex - emx) / (2.0 * I)
                    : c.coskL * (std::exp(I * (2.0 * L - x) * c.mu) - std::exp(I * x * c.mu)) /
                          (2.0 * I);
    };
    auto ecos = [&](bool at_x) {
        return at_x ? c.coskL * (ex + emx) / 2.0
                    : c.coskL * (std::exp(I * (2.0 * L - x) * c.mu) + std::exp(I * x * c.mu)) / 2.0;
    };

    switch (spec_.bc_kind) {
        case BcKind::RobinRobin: {
            const double a = p.alpha.value(), b = p.beta.value();
            const Complex eFa = (a * kappa_ - 1.0) * esin(true) - a * c.mu * ecos(true);
            // F_b(lam, x - L): odd sine part, even cosine part
            const Complex eFb = -(b * kappa_ - 1.0) * esin(false) - b * c.mu * ecos(false);
            const Complex hat_part = c.eomt * (eFa * (1.0 - I * b * c.lam) * E_ * c.P -
                                               eFb * (1.0 - I * a * c.nuv) * c.Q);
            const Complex data_part = c.pre * (eFb * c.TTf - eFa * E_ * c.TTg);
            return (hat_part + data_part) / c.Dh;
        }
        case BcKind::RobinDirichlet: {
            const double a = p.alpha.value();
            const Complex eFa = (a * kappa_ - 1.0) * esin(true) - a * c.mu * ecos(true);
            const Complex sLx = esin(false);
            const Complex hat_part =
                c.eomt * (eFa * E_ * c.P - (1.0 - I * a * c.nuv) * sLx * c.Q);
            const Complex data_part = c.pre * (sLx * c.TTf - eFa * E_ * c.TTg);
            return (hat_part + data_part) / c.Dh;
        }
        case BcKind::DirichletDirichlet: {
            const Complex sx = esin(true);
            const Complex sLx = esin(false);
            const Complex hat_part = c.eomt * (-sx * E_ * c.P - sLx * c.Q);
            const Complex data_part = c.pre * (sLx * c.TTf + sx * E_ * c.TTg);
            return (hat_part + data_part) / c.Dh;
        }
        case BcKind::NeumannNeumann: {
            // signs fixed against the large-alpha Robin limit
            const Complex eGx = kappa_ * esin(true) - c.mu * ecos(true);
            const Complex eGxL = -kappa_ * esin(false) - c.mu * ecos(false);
            const Complex hat_part =
                c.eomt * (c.lam * eGx * E_ * c.P - c.nuv * eGxL * c.Q);
            const Complex data_part = -I * c.pre * (eGxL * c.TTf - eGx * E_ * c.TTg);
            return (hat_part + data_part) / (c.Dh * c.lam * c.nuv);
        }
    }
    return {};
}

EvalDiag IbvpEvaluator::eval(double x, double t) const {
    const auto r = eval_many({x}, t);
    return r[0];
}

std::vector<EvalDiag> IbvpEvaluator::eval_many(const std::vector<double>& xs, double t) const {
    const ProblemParams& p = spec_.params;
    for (double x : xs)
        if (x < 0.0 || x > p.L) throw InvalidSpec("evaluation point outside [0, L]");
    if (t < 0.0) throw InvalidSpec("t >= 0 required");

    std::vector<EvalDiag> out(xs.size());

    if (t == 0.0) {
        // Boundary-term t-transforms are empty at t = 0; the representation
        // reduces to the inverse-transform identity.
        for (size_t j = 0; j < xs.size(); ++j) {
            const QuadResult f = integrate_real_line(spec_.initial, p, xs[j], 0.0, profile_);
            out[j] = {f.value.real(), std::abs(f.value.imag()), f.err, f.converged};
        }
        return out;
    }

    if (!contour_) const_cast<IbvpEvaluator*>(this)->prepare(t, t);

    const double scale = data_scale();
    const int m = static_cast<int>(xs.size());
    auto f = [&](Complex lam, std::span<Complex> vals) {
        const NodeCommon c = node_common(lam, t);
        for (int j = 0; j < m; ++j) vals[j] = kernel_at(c, xs[j]);
    };
    const std::vector<QuadResult> contour_vals = integrate_many(*contour_, m, f, scale);

    const bool nn = spec_.bc_kind == BcKind::NeumannNeumann;
    for (int j = 0; j < m; ++j) {
        const QuadResult fourier = integrate_real_line(spec_.initial, p, xs[j], t, profile_);
        const Complex pref = nn ? Complex(1.0 / M_PI, 0.0) : -I / M_PI;
        const Complex total =
            fourier.value + pref * std::exp(-kappa_ * (p.L - xs[j])) * contour_vals[j].value;
        EvalDiag d;
        d.value = total.real();
        d.imag_residual = std::abs(total.imag());
        d.quad_err = fourier.err + contour_vals[j].err;
        d.converged = fourier.converged && contour_vals[j].converged &&
                      d.imag_residual < 1e-8 * (1.0 + std::abs(d.value));
        out[j] = d;
    }
    return out;
}

namespace {

double scalar_solve(const IbvpSpec& spec, BcKind expect, double x, double t,
                    const AccuracyProfile& profile) {
    if (spec.bc_kind != expect) throw InvalidSpec("boundary-condition kind mismatch");
    IbvpEvaluator ev(spec, profile);
    const EvalDiag d = ev.eval(x, t);
    if (!d.converged && d.quad_err > 1e-6 * (1.0 + std::abs(d.value)))
        throw NotConverged("solution evaluation did not converge");
    return d.value;
}

} // namespace

double solve_rr(const IbvpSpec& spec, double x, double t, const AccuracyProfile& profile) {
    return scalar_solve(spec, BcKind::RobinRobin, x, t, profile);
}
double solve_rd(const IbvpSpec& spec, double x, double t, const AccuracyProfile& profile) {
    return scalar_solve(spec, BcKind::RobinDirichlet, x, t, profile);
}
double solve_dd(const IbvpSpec& spec, double x, double t, const AccuracyProfile& profile) {
    return scalar_solve(spec, BcKind::DirichletDirichlet, x, t, profile);
}
double solve_nn(const IbvpSpec& spec, double x, double t, const AccuracyProfile& profile) {
    return scalar_solve(spec, BcKind::NeumannNeumann, x, t, profile);
}

IbvpSpec braester_spec(double q, double theta0, double thetas, double D0, double L) {
    IbvpSpec spec;
    spec.params.D0 = D0;
    spec.params.K0 = 0.144 * D0;
    spec.params.L = L;
    spec.params.alpha = RobinCoeff::finite(1.0);
    spec.params.beta = RobinCoeff::finite(0.0);
    spec.bc_kind = BcKind::RobinDirichlet;
    spec.initial = InitialData::zero();
    spec.left = BoundarySignal::constant(q / D0);
    spec.right = BoundarySignal::constant(thetas - theta0);
    return spec;
}

double braester_profile(double q, double theta0, double thetas, const ProblemParams& p,
                        double x, double t, const AccuracyProfile& profile) {
    if (t == 0.0) return theta0;
    const double kap = p.kappa();
    const double E = std::exp(-kap * p.L);
    ProblemParams pr = p;
    pr.alpha = RobinCoeff::finite(1.0);
    pr.beta = RobinCoeff::finite(0.0);
    const RootReport roots = find_roots(pr);
    ContourOptions opts;
    opts.t_max = t;
    Contour c = make_contour(pr, roots, t, profile, opts);

    const double coskL = std::exp(kap * p.L);
    auto f = [&](Complex lam) {
        const Complex mu = lam + I * kap;
        const Complex nuv = -lam - 2.0 * I * kap;
        const Complex om = omega(lam, pr);
        const Complex z = std::exp(2.0 * I * mu * p.L);
        const Complex Dh1 = (1.0 - I * lam) - z * (1.0 - I * nuv);
        const Complex esinLx =
            coskL * (std::exp(I * (2.0 * p.L - x) * mu) - std::exp(I * x * mu)) / (2.0 * I);
        const Complex esinx = coskL * (std::exp(I * (p.L + x) * mu) - std::exp(I * (p.L - x) * mu)) /
                              (2.0 * I);
        const Complex ecosx = coskL * (std::exp(I * (p.L + x) * mu) + std::exp(I * (p.L - x) * mu)) /
                              2.0;
        const Complex eF1 = (kap - 1.0) * esinx - mu * ecosx;
        const Complex pre = pr.K0 - 2.0 * I * lam * pr.D0;
        return std::exp(-om * t) / om * pre *
               ((q / pr.D0) * esinLx - (thetas - theta0) * eF1 * E) / Dh1;
    };
    const Complex val = integrate(c, f, std::abs(thetas - theta0) + std::abs(q / p.D0)).value;
    return theta0 + (I / M_PI * std::exp(-kap * (p.L - x)) * val).real();
}

IbvpSpec philip_spec(double R, double L) {
    IbvpSpec spec;
    spec.params.D0 = 0.5;
    spec.params.K0 = 1.0;
    spec.params.L = L;
    spec.params.alpha = RobinCoeff::finite(0.5);
    spec.params.beta = RobinCoeff::finite(0.5);
    spec.bc_kind = BcKind::RobinRobin;
    spec.initial = InitialData::zero();
    spec.left = BoundarySignal::constant(R);
    spec.right = BoundarySignal::zero();
    return spec;
}

double philip_conductivity(double R, double L, double x, double t,
                           const AccuracyProfile& profile) {
    if (t == 0.0) return 0.0;
    ProblemParams p;
    p.D0 = 0.5;
    p.K0 = 1.0;
    p.L = L;
    p.alpha = RobinCoeff::finite(0.5);
    p.beta = RobinCoeff::finite(0.5);
    const double kap = p.kappa(); // = 1
    const RootReport roots = find_roots(p);
    ContourOptions opts;
    opts.t_max = t;
    Contour c = make_contour(p, roots, t, profile, opts);

    const double coskL = std::exp(kap * L);
    auto f = [&](Complex lam) {
        const Complex mu = lam + I * kap;
        const Complex nuv = -lam - 2.0 * I * kap;
        const Complex om = omega(lam, p);
        const Complex z = std::exp(2.0 * I * mu * L);
        const Complex Dh = (1.0 - 0.5 * I * lam) * (1.0 - 0.5 * I * nuv) * (1.0 - z);
        const Complex esinLx =
            coskL * (std::exp(I * (2.0 * L - x) * mu) - std::exp(I * x * mu)) / (2.0 * I);
        const Complex ecosLx =
            coskL * (std::exp(I * (2.0 * L - x) * mu) + std::exp(I * x * mu)) / 2.0;
        // F_{1/2}(lam, x - L), anchored
        const Complex eF = -(0.5 * kap - 1.0) * esinLx - 0.5 * mu * ecosLx;
        return std::exp(-om * t) / om * (1.0 - I * lam) * eF / Dh;
    };
    const Complex val = integrate(c, f, std::abs(R)).value;
    return (R * I / M_PI * std::exp(x - L) * val).real();
}

namespace detail {

void parallel_for(int n, const std::function<void(int)>& fn) {
    int nt = 1;
    if (const char* env = std::getenv("ADVDIFF_THREADS")) nt = std::max(1, std::atoi(env));
    nt = std::min<int>(nt, std::max(1, n));
    if (nt == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int tix = 0; tix < nt; ++tix)
        pool.emplace_back([&] {
            int i;
            while ((i = next.fetch_add(1)) < n) fn(i);
        });
    for (auto& th : pool) th.join();
}

} // namespace detail

SolutionGrid solve_grid(const IbvpSpec& spec, const std::vector<double>& xs,
                        const std::vector<double>& ts, const AccuracyProfile& profile) {
    if (xs.empty() || ts.empty()) throw InvalidSpec("solve_grid: empty grid");
    SolutionGrid grid;
    grid.xs = Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size());
    grid.ts = Eigen::Map<const Eigen::VectorXd>(ts.data(), ts.size());
    grid.values.resize(xs.size(), ts.size());
    grid.converged.resize(xs.size(), ts.size());
    grid.values.setZero();
    grid.converged.setConstant(false);

    IbvpEvaluator ev(spec, profile);
    double t_min = 0.0, t_max = 0.0;
    for (double t : ts) {
        if (t > 0.0 && (t_min == 0.0 || t < t_min)) t_min = t;
        t_max = std::max(t_max, t);
    }
    if (t_min > 0.0) ev.prepare(t_min, t_max);

    detail::parallel_for(static_cast<int>(ts.size()), [&](int j) {
        try {
            const auto col = ev.eval_many(xs, ts[j]);
            for (size_t i = 0; i < xs.size(); ++i) {
                grid.values(i, j) = col[i].value;
                grid.converged(i, j) = col[i].converged;
            }
        } catch (const Error&) {
            for (size_t i = 0; i < xs.size(); ++i) grid.converged(i, j) = false;
        }
    });
    return grid;
}

} // namespace fokas
