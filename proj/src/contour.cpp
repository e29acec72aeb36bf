#include "fokas/contour.hpp"

#include <algorithm>
#include <cmath>

#include "fokas/quadrature.hpp"

namespace fokas {

AccuracyProfile AccuracyProfile::fast() {
    AccuracyProfile p;
    p.rel_quad_tol = 1e-7;
    p.s_cap = 120.0;
    p.nodes_per_panel = 12;
    p.min_panels = 16;
    p.osc_span = 5.5;
    p.eps_budget = 1e-12;
    return p;
}

AccuracyProfile AccuracyProfile::paper() {
    AccuracyProfile p;
    p.rel_quad_tol = 1e-11;
    p.s_cap = 4000.0;
    p.eps_budget = 1e-18;
    p.max_panels = 12000;
    return p;
}

AccuracyProfile AccuracyProfile::named(const std::string& name) {
    if (name == "fast") return fast();
    if (name == "paper") return paper();
    if (name == "default" || name.empty()) return defaults();
    throw ConfigError("unknown accuracy profile '" + name + "'");
}

double Contour::distance(Complex p) const {
    double best = std::numeric_limits<double>::infinity();
    const Complex vertex(0.0, offset_h);
    for (double sgn : {+1.0, -1.0}) {
        const double ang = (sgn > 0) ? ray_angle : M_PI - ray_angle;
        const Complex dir = std::polar(1.0, ang);
        const Complex rel = p - vertex;
        const double proj = std::clamp(rel.real() * dir.real() + rel.imag() * dir.imag(),
                                       0.0, truncation_s);
        best = std::min(best, std::abs(rel - proj * dir));
    }
    return best;
}

namespace {

// Upper bound on the local phase rate d(phase)/ds of the assembled kernels:
// e^{i y mu} factors (|y| <= 2L) everywhere, plus the e^{-w t} oscillation
// inside the region where that factor is still alive (s <= s_alive).
double phase_rate(double s, double h, double phi, double t_osc, double s_alive,
                  const ProblemParams& p) {
    double rate = 2.0 * p.L * std::cos(phi) + 1e-12;
    if (s <= s_alive) rate += t_osc * (2.0 * p.D0 * std::hypot(h, s) + p.K0);
    return rate;
}

std::vector<double> plan_panels(double S, double h, double phi, double t_osc, double s_alive,
                                const ProblemParams& p, const AccuracyProfile& prof) {
    std::vector<double> edges{0.0};
    double w = std::min({std::max(h, 1e-3 * S) / 2.0,
                         prof.osc_span / phase_rate(0.0, h, phi, t_osc, s_alive, p),
                         S / prof.min_panels});
    w = std::max(w, S / static_cast<double>(prof.max_panels));
    double s = 0.0;
    while (s < S && static_cast<int>(edges.size()) <= prof.max_panels) {
        double wmax = std::min(prof.osc_span / phase_rate(s, h, phi, t_osc, s_alive, p),
                               S / prof.min_panels);
        wmax = std::max(wmax, S / static_cast<double>(prof.max_panels));
        w = std::min(w * prof.grading, wmax);
        s = std::min(s + w, S);
        edges.push_back(s);
    }
    return edges;
}

void fill_nodes(const std::vector<double>& edges, double h, double phi, int gl_nodes,
                std::vector<ContourNode>& out) {
    const detail::GaussRule& rule = detail::gauss_legendre(gl_nodes);
    const Complex vertex(0.0, h);
    const Complex dir_r = std::polar(1.0, phi);
    const Complex dir_l = std::polar(1.0, M_PI - phi);
    out.clear();
    out.reserve(2 * (edges.size() - 1) * gl_nodes);
    for (size_t k = 0; k + 1 < edges.size(); ++k) {
        const double mid = 0.5 * (edges[k] + edges[k + 1]);
        const double half = 0.5 * (edges[k + 1] - edges[k]);
        for (int j = 0; j < gl_nodes; ++j) {
            const double s = mid + half * rule.nodes[j];
            const double w = half * rule.weights[j];
            out.push_back({vertex + s * dir_r, w * dir_r});
            out.push_back({vertex + s * dir_l, -w * dir_l});
        }
    }
}

std::vector<double> halve(const std::vector<double>& edges) {
    std::vector<double> out;
    out.reserve(2 * edges.size());
    for (size_t k = 0; k + 1 < edges.size(); ++k) {
        out.push_back(edges[k]);
        out.push_back(0.5 * (edges[k] + edges[k + 1]));
    }
    out.push_back(edges.back());
    return out;
}

} // namespace

Contour make_contour(const ProblemParams& p, const RootReport& roots, double t_min,
                     const AccuracyProfile& profile, const ContourOptions& opts) {
    p.validate();
    if (!(profile.ray_angle > 0.0 && profile.ray_angle <= M_PI / 4.0))
        throw InvalidSpec("ray_angle must lie in (0, pi/4]");
    if (t_min <= 0.0 && !opts.alternative_decay && opts.s_request <= 0.0)
        throw ZeroTimeUnbounded("t_min = 0 and the integrand has no alternative decay");

    const double t_max = std::max(opts.t_max, t_min);

    // Vertex height: default, capped so e^{-w t} stays bounded near the vertex
    // over the whole time range, floored by pole clearance.
    double h = profile.offset_default;
    if (t_max > 0.0) {
        const double b = profile.vertex_growth_budget / t_max;
        const double h_growth = (-p.K0 + std::sqrt(p.K0 * p.K0 + 4.0 * p.D0 * b)) / (2.0 * p.D0);
        h = std::min(h, h_growth);
    }
    h = std::max(h, profile.offset_floor);
    // Roots beyond the far cutoff are numerically absent (their neglected-pole
    // residues carry e^{-Im(lambda) x} factors) and cannot be cleared anyway.
    const double far_cutoff = 3e4 / p.L;
    double max_upper = 0.0;
    bool has_upper = false;
    for (const Complex& r : roots.roots) {
        if (r.imag() > 0.0 && r.imag() <= far_cutoff) {
            has_upper = true;
            max_upper = std::max(max_upper, r.imag());
        }
    }
    if (has_upper) {
        h = std::max(h, profile.upper_root_factor * max_upper);
        h = std::max(h, max_upper + 1.05 * profile.clearance_dist);
    }

    const double phi = profile.ray_angle;

    // Truncation: Gaussian budget from Re w(lambda(s)) * t_min, plus any
    // explicit request from algebraically-decaying terms.
    double S = 0.0;
    double s_gauss = 0.0; // where the e^{-w t} factor is effectively dead
    if (t_min > 0.0) {
        const double lg = std::log(1.0 / profile.eps_budget);
        const double a = p.D0 * t_min * std::cos(2.0 * phi);
        const double b = (2.0 * p.D0 * h + p.K0) * t_min * std::sin(phi);
        const double c = (p.D0 * h * h + p.K0 * h) * t_min + lg;
        S = (b + std::sqrt(b * b + 4.0 * a * c)) / (2.0 * a);
        s_gauss = S;
    } else {
        S = profile.s_cap;
    }
    S = std::max(S, opts.s_request);
    S = std::min(S, profile.s_cap);
    S = std::max(S, 4.0 * h);

    Contour c;
    c.offset_h = h;
    c.ray_angle = phi;
    c.truncation_s = S;
    c.rel_quad_tol = profile.rel_quad_tol;
    c.panel_edges = plan_panels(S, h, phi, t_max, 1.3 * s_gauss, p, profile);
    fill_nodes(c.panel_edges, h, phi, profile.nodes_per_panel, c.nodes_base);
    fill_nodes(halve(c.panel_edges), h, phi, profile.nodes_per_panel, c.nodes_fine);

    // Pole-clearance certificate against reported roots and the on-line family.
    std::vector<Complex> check;
    for (const Complex& r : roots.roots)
        if (r.imag() <= far_cutoff) check.push_back(r);
    for (int n = 1; n <= 8; ++n) check.push_back(asymptotic_root(n, p));
    for (const Complex& r : check) {
        if (c.distance(r) < profile.clearance_dist)
            throw PoleOnContour("Delta root within clearance of the contour");
    }
    return c;
}

namespace {

QuadResult combine(Complex coarse, Complex fine, double rel_tol, double scale_hint) {
    QuadResult r;
    r.value = fine;
    r.err = std::abs(fine - coarse);
    const double scale = std::max({std::abs(fine), scale_hint, 1e-300});
    r.converged = r.err <= rel_tol * scale;
    return r;
}

} // namespace

QuadResult integrate(const Contour& c, const std::function<Complex(Complex)>& f,
                     double scale_hint) {
    detail::KahanComplex coarse, fine;
    for (const ContourNode& n : c.nodes_base) coarse.add(f(n.lambda) * n.weight);
    for (const ContourNode& n : c.nodes_fine) fine.add(f(n.lambda) * n.weight);
    return combine(coarse.value(), fine.value(), c.rel_quad_tol, scale_hint);
}

std::vector<QuadResult> integrate_many(const Contour& c, int m,
                                       const std::function<void(Complex, std::span<Complex>)>& f,
                                       double scale_hint) {
    std::vector<detail::KahanComplex> coarse(m), fine(m);
    std::vector<Complex> buf(m);
    for (const ContourNode& n : c.nodes_base) {
        f(n.lambda, buf);
        for (int j = 0; j < m; ++j) coarse[j].add(buf[j] * n.weight);
    }
    for (const ContourNode& n : c.nodes_fine) {
        f(n.lambda, buf);
        for (int j = 0; j < m; ++j) fine[j].add(buf[j] * n.weight);
    }
    std::vector<QuadResult> out(m);
    for (int j = 0; j < m; ++j)
        out[j] = combine(coarse[j].value(), fine[j].value(), c.rel_quad_tol, scale_hint);
    return out;
}

Complex integrate_checked(const Contour& c, const std::function<Complex(Complex)>& f,
                          double scale_hint) {
    const QuadResult r = integrate(c, f, scale_hint);
    if (!r.converged)
        throw NotConverged("contour quadrature did not converge under panel doubling");
    return r.value;
}

QuadResult integrate_real_line(const InitialData& initial, const ProblemParams& p, double x,
                               double t, const AccuracyProfile& profile) {
    if (t < 0.0) throw InvalidSpec("integrate_real_line: t >= 0 required");
    if (initial.is_zero()) return {Complex{0.0, 0.0}, 0.0, true};

    if (t == 0.0 && initial.is_catalog())
        return {Complex{initial.value(x, p.L), 0.0}, 0.0, true};

    const double S = (t > 0.0)
                         ? std::sqrt(std::log(1.0 / profile.eps_budget) / (p.D0 * t))
                         : profile.s_cap;

    // Symmetric panel plan growing away from the origin.
    std::vector<double> edges{0.0};
    {
        double w0 = std::min(profile.osc_span / (p.L + x + t * p.K0 + 1e-12), S / 8.0);
        if (t > 0.0) w0 = std::min(w0, 0.5 / std::sqrt(p.D0 * t));
        double w = w0, s = 0.0;
        while (s < S && static_cast<int>(edges.size()) <= profile.max_panels) {
            const double rate = p.L + x + t * (2.0 * p.D0 * s + p.K0) + 1e-12;
            w = std::min(w * profile.grading, profile.osc_span / rate);
            w = std::max(w, S / static_cast<double>(profile.max_panels));
            s = std::min(s + w, S);
            edges.push_back(s);
        }
    }

    auto f = [&](Complex lam) {
        return std::exp(I * lam * x - omega(lam, p) * t) * initial.hat(lam, p.L) / (2.0 * M_PI);
    };
    auto sweep = [&](const std::vector<double>& eg) {
        const detail::GaussRule& rule = detail::gauss_legendre(profile.nodes_per_panel);
        detail::KahanComplex acc;
        for (size_t k = 0; k + 1 < eg.size(); ++k) {
            const double mid = 0.5 * (eg[k] + eg[k + 1]);
            const double half = 0.5 * (eg[k + 1] - eg[k]);
            for (int j = 0; j < profile.nodes_per_panel; ++j) {
                const double s = mid + half * rule.nodes[j];
                const double w = half * rule.weights[j];
                acc.add(f(Complex(s, 0.0)) * w);
                acc.add(f(Complex(-s, 0.0)) * w);
            }
        }
        return acc.value();
    };

    const Complex coarse = sweep(edges);
    const Complex fine = sweep(halve(edges));
    QuadResult r;
    r.value = fine;
    r.err = std::abs(fine - coarse);
    const double scale = std::max({std::abs(fine), 1e-300});
    r.converged = r.err <= profile.rel_quad_tol * scale || r.err < 1e-14;
    return r;
}

} // namespace fokas
