#include "fokas/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace fokas {

Complex omega(Complex lambda, const ProblemParams& p) {
    return p.D0 * lambda * lambda + I * p.K0 * lambda;
}

Complex nu(Complex lambda, const ProblemParams& p) {
    return -lambda - I * (p.K0 / p.D0);
}

Complex delta_rr(Complex lambda, const ProblemParams& p) {
    const double a = p.alpha.value();
    const double b = p.beta.value();
    const Complex v = nu(lambda, p);
    return std::exp(-I * lambda * p.L) * (1.0 - I * a * lambda) * (1.0 - I * b * v) -
           std::exp(-I * v * p.L) * (1.0 - I * a * v) * (1.0 - I * b * lambda);
}

Complex delta_alpha(Complex lambda, const ProblemParams& p) {
    const double a = p.alpha.value();
    const Complex v = nu(lambda, p);
    return std::exp(-I * lambda * p.L) * (1.0 - I * a * lambda) -
           std::exp(-I * v * p.L) * (1.0 - I * a * v);
}

Complex delta_zero(Complex lambda, const ProblemParams& p) {
    const Complex v = nu(lambda, p);
    return std::exp(-I * lambda * p.L) - std::exp(-I * v * p.L);
}

Complex f_gamma(Complex lambda, double y, double gamma, const ProblemParams& p) {
    const Complex mu = lambda + I * p.kappa();
    return (gamma * p.kappa() - 1.0) * std::sin(y * mu) - gamma * mu * std::cos(y * mu);
}

Complex g_kernel(Complex lambda, double y, const ProblemParams& p) {
    const Complex mu = lambda + I * p.kappa();
    return p.kappa() * std::sin(y * mu) - mu * std::cos(y * mu);
}

SigmaRho sigma_rho(const ProblemParams& p) {
    const double a = p.alpha.value();
    const double b = p.beta.value();
    const double k = p.kappa();
    const double fa = 1.0 - a * k;
    const double fb = b * k - 1.0;
    const double den = fa * fb;
    if (std::abs(fa) < 1e-12 || std::abs(fb) < 1e-12)
        throw DegenerateDenominator("sigma/rho denominator vanishes (alpha or beta = 2 D0/K0)");
    return {(a - b) / (p.L * den), (a * b) / (p.L * p.L * den)};
}

RootCountResult root_count(double sigma, double rho) {
    if (rho > 0.0) {
        if (sigma <= 0.0) return {false, 0};
        if (sigma >= 1.0) return {false, 2};
        // 0 < sigma < 1: sign of the discriminant quantity decides.
        if (sigma > 2.0 * std::sqrt(rho)) return {false, 4};
        const double half = 0.5 * sigma * (sigma - rho) - rho;
        const double disc = half * half - (1.0 - sigma) * rho * rho;
        if (disc < 0.0) return {true, 0}; // ambiguous regime, defer to find_roots
        const double eta = half + std::sqrt(disc);
        if (eta <= 0.0) return {true, 0};
        const double se = std::sqrt(eta);
        const double q = sigma - (rho / se + se) * std::tanh(se / rho);
        if (std::abs(q) < 1e-13) return {false, 2}; // tangency
        return {false, q > 0.0 ? 4 : 0};
    }
    if (rho == 0.0) {
        if (sigma > 0.0 && sigma < 1.0) return {false, 2};
        return {false, 0};
    }
    // rho < 0
    return {false, sigma < 1.0 ? 2 : 0};
}

Complex asymptotic_root(int n, const ProblemParams& p) {
    return Complex(n * M_PI / p.L, -p.kappa());
}

namespace {

// Transformed root equation, cleared of denominators:
//   H(y) = sigma - (1 + rho y^2) tanh(y)/y,   even in y, H(0) = sigma - 1.
// Nonzero real roots of H <=> off-line roots of Delta.
double h_equation(double y, double sigma, double rho) {
    const double ty = (std::abs(y) < 1e-8) ? (1.0 - y * y / 3.0) : std::tanh(y) / y;
    return sigma - (1.0 + rho * y * y) * ty;
}

double bisect(double lo, double hi, double flo, double sigma, double rho) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = h_equation(mid, sigma, rho);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-15 * (1.0 + std::abs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

// e^{i lambda L} Delta(lambda): bounded for Im(lambda) >= 0, where the raw
// form overflows once Im(lambda) L is large.
Complex delta_normalized(Complex lambda, const ProblemParams& p) {
    const double a = p.alpha.value();
    const double b = p.beta.value();
    const Complex v = -lambda - 2.0 * I * p.kappa();
    const Complex z = std::exp(2.0 * I * (lambda + I * p.kappa()) * p.L);
    return (1.0 - I * a * lambda) * (1.0 - I * b * v) -
           z * (1.0 - I * a * v) * (1.0 - I * b * lambda);
}

// Newton polish on the given determinant form.
template <typename F>
Complex polish_with(Complex z, const F& f) {
    for (int it = 0; it < 30; ++it) {
        const double h = 1e-6 * (1.0 + std::abs(z));
        const Complex df = (f(z + h) - f(z - h)) / (2.0 * h);
        if (std::abs(df) == 0.0) break;
        const Complex step = f(z) / df;
        z -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    return z;
}

Complex polish_root(Complex z, const ProblemParams& p) {
    return polish_with(z, [&](Complex w) { return delta_rr(w, p); });
}

// |Delta| smallness test that stays representable for far roots.
bool root_ok(Complex r, const ProblemParams& p, double tol) {
    if (std::abs(r.imag()) * p.L < 200.0) return std::abs(delta_rr(r, p)) < tol;
    const Complex up = (r.imag() > 0.0) ? r : Complex(0.0, -p.K0 / p.D0) - r;
    const double a = p.alpha.value(), b = p.beta.value();
    const Complex v = -up - 2.0 * I * p.kappa();
    const double scale = (1.0 + a * std::abs(up)) * (1.0 + b * std::abs(v));
    return std::abs(delta_normalized(up, p)) < tol * scale;
}

} // namespace

namespace detail {

std::vector<Complex> scan_delta_roots(const ProblemParams& p, double re_lo, double re_hi,
                                      double im_lo, double im_hi, int nre, int nim,
                                      double root_tol) {
    std::vector<Complex> roots;
    const double dre = (re_hi - re_lo) / nre;
    const double dim = (im_hi - im_lo) / nim;
    for (int i = 0; i <= nre; ++i) {
        for (int j = 0; j <= nim; ++j) {
            const Complex z0(re_lo + i * dre, im_lo + j * dim);
            const Complex z = polish_root(z0, p);
            if (std::abs(delta_rr(z, p)) > root_tol) continue;
            if (z.real() < re_lo - dre || z.real() > re_hi + dre) continue;
            if (z.imag() < im_lo - dim || z.imag() > im_hi + dim) continue;
            if (std::abs(z.imag() + p.kappa()) < 1e-6) continue; // on the symmetry line
            bool dup = false;
            for (const Complex& r : roots)
                if (std::abs(r - z) < 1e-6 * (1.0 + std::abs(z))) dup = true;
            if (!dup) roots.push_back(z);
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); });
    return roots;
}

} // namespace detail

RootReport find_roots(const ProblemParams& p, double root_tol) {
    p.validate();
    RootReport report;

    SigmaRho sr{0.0, 0.0};
    bool degenerate = false;
    try {
        sr = sigma_rho(p);
    } catch (const DegenerateDenominator&) {
        degenerate = true;
    }

    if (degenerate) {
        // Classification does not apply; direct scan of Delta.
        const double imspan = std::max(2.0 * p.K0 / p.D0, 4.0);
        report.roots = detail::scan_delta_roots(p, -20.0, 20.0, -imspan, imspan, 220, 120, root_tol);
        report.classification_valid = false;
    } else {
        report.sigma = sr.sigma;
        report.rho = sr.rho;
        report.classification_valid = true;
        const RootCountResult rc = root_count(sr.sigma, sr.rho);
        report.ambiguous = rc.ambiguous;
        report.predicted_count = rc.count;

        // Scan H(y) on (0, 50]; roots come in +/- pairs.
        const int nbrackets = 10000;
        const double ymax = 50.0;
        std::vector<double> ys;
        double prev_y = ymax / nbrackets * 1e-3; // skip the removable origin
        double prev_f = h_equation(prev_y, sr.sigma, sr.rho);
        for (int i = 1; i <= nbrackets; ++i) {
            const double y = ymax * i / nbrackets;
            const double f = h_equation(y, sr.sigma, sr.rho);
            if (f == 0.0) {
                ys.push_back(y);
            } else if (prev_f != 0.0 && (f > 0.0) != (prev_f > 0.0)) {
                ys.push_back(bisect(prev_y, y, prev_f, sr.sigma, sr.rho));
            }
            prev_y = y;
            prev_f = f;
        }
        // near-degenerate Robin limits push a root pair far out (|y| >> 50);
        // extend the scan logarithmically when the prediction is not yet met
        if (!rc.ambiguous && 2 * static_cast<int>(ys.size()) < rc.count && sr.rho != 0.0) {
            double py = ymax;
            double pf = h_equation(py, sr.sigma, sr.rho);
            for (int i = 1; i <= 4000; ++i) {
                const double y = ymax * std::pow(1e12 / ymax, i / 4000.0);
                const double f = h_equation(y, sr.sigma, sr.rho);
                if (pf != 0.0 && (f > 0.0) != (pf > 0.0))
                    ys.push_back(bisect(py, y, pf, sr.sigma, sr.rho));
                py = y;
                pf = f;
            }
        }
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-8 * (1.0 + b); }),
                 ys.end());
        for (double y : ys) {
            if (y > 200.0 + p.kappa() * p.L) {
                // far pair: polish the upper root on the normalized form and
                // place the lower one by the exact symmetry pairing
                Complex up = polish_with(Complex(0.0, y / p.L - p.kappa()),
                                         [&](Complex w) { return delta_normalized(w, p); });
                report.roots.push_back(up);
                report.roots.push_back(Complex(0.0, -p.K0 / p.D0) - up);
                continue;
            }
            for (double s : {+1.0, -1.0}) {
                Complex lam(0.0, s * y / p.L - p.kappa());
                lam = polish_root(lam, p);
                if (std::abs(lam.imag() + p.kappa()) < 1e-9) continue;
                report.roots.push_back(lam);
            }
        }
        std::sort(report.roots.begin(), report.roots.end(),
                  [](const Complex& a, const Complex& b) { return a.imag() < b.imag(); });

        if (!report.ambiguous &&
            static_cast<int>(report.roots.size()) != report.predicted_count) {
            throw CountMismatch("find_roots: numeric count " +
                                std::to_string(report.roots.size()) +
                                " != predicted " + std::to_string(report.predicted_count));
        }
    }

    for (const Complex& r : report.roots) {
        if (!root_ok(r, p, root_tol))
            throw CountMismatch("find_roots: root failed |Delta| tolerance");
        if (r.imag() > 0.0) {
            if (!report.max_upper_imag || r.imag() > *report.max_upper_imag)
                report.max_upper_imag = r.imag();
        }
    }
    return report;
}

} // namespace fokas
