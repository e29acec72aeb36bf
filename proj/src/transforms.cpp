#include "fokas/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "fokas/quadrature.hpp"
#include "fokas/spectral.hpp"

namespace fokas {

namespace detail {

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

Complex integrate_gl(const std::function<Complex(double)>& f, double a, double b,
                     int panels, int nodes_per_panel) {
    const GaussRule& rule = gauss_legendre(nodes_per_panel);
    KahanComplex acc;
    const double w = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * w;
        const double mid = lo + 0.5 * w;
        for (int j = 0; j < nodes_per_panel; ++j)
            acc.add(f(mid + 0.5 * w * rule.nodes[j]) * (0.5 * w * rule.weights[j]));
    }
    return acc.value();
}

} // namespace detail

// ---------------------------------------------------------------------------
// InitialData
// ---------------------------------------------------------------------------

InitialData InitialData::piecewise_step(double height, double split) {
    InitialData d(Kind::PiecewiseStep);
    d.height_ = height;
    d.split_ = split;
    return d;
}

InitialData InitialData::half_cosine() { return InitialData(Kind::HalfCosine); }
InitialData InitialData::full_sine() { return InitialData(Kind::FullSine); }

InitialData InitialData::exp_sine(double growth) {
    InitialData d(Kind::ExpSine);
    d.growth_ = growth;
    return d;
}

InitialData InitialData::constant(double value) {
    InitialData d(Kind::Constant);
    d.value_ = value;
    return d;
}

InitialData InitialData::tabulated(std::vector<std::pair<double, double>> samples) {
    InitialData d(Kind::Tabulated);
    d.samples_ = std::move(samples);
    return d;
}

bool InitialData::is_zero() const {
    if (kind_ == Kind::Constant) return value_ == 0.0;
    if (kind_ == Kind::PiecewiseStep) return height_ == 0.0;
    if (kind_ == Kind::Tabulated) {
        for (const auto& s : samples_)
            if (s.second != 0.0) return false;
        return true;
    }
    return false;
}

void InitialData::validate(double L) const {
    if (kind_ == Kind::PiecewiseStep) {
        if (!(split_ > 0.0 && split_ < L))
            throw InvalidSpec("piecewise step split must lie inside (0, L)");
    }
    if (kind_ == Kind::Tabulated) {
        if (samples_.size() < 2) throw InvalidSpec("tabulated data needs at least 2 samples");
        for (size_t i = 1; i < samples_.size(); ++i)
            if (!(samples_[i].first > samples_[i - 1].first))
                throw InvalidSpec("tabulated samples must be strictly increasing in x");
        if (std::abs(samples_.front().first) > 1e-12 * L ||
            std::abs(samples_.back().first - L) > 1e-12 * L)
            throw InvalidSpec("tabulated samples must cover [0, L]");
    }
}

double InitialData::value(double x, double L) const {
    switch (kind_) {
        case Kind::PiecewiseStep:
            if (x < split_) return height_;
            if (x > split_) return 0.0;
            return 0.5 * height_;
        case Kind::HalfCosine:
            return std::cos(M_PI * x / (2.0 * L));
        case Kind::FullSine:
            return std::sin(M_PI * x / L);
        case Kind::ExpSine:
            return std::exp(growth_ * x) * std::sin(M_PI * x / L);
        case Kind::Constant:
            return value_;
        case Kind::Tabulated: {
            auto it = std::lower_bound(samples_.begin(), samples_.end(), x,
                                       [](const auto& s, double v) { return s.first < v; });
            if (it == samples_.begin()) return it->second;
            if (it == samples_.end()) return samples_.back().second;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double u = (x - lo.first) / (hi.first - lo.first);
            return lo.second + u * (hi.second - lo.second);
        }
    }
    return 0.0;
}

Complex InitialData::hat_quadrature(Complex lambda, double L, bool anchored) const {
    auto f = [&](double xi) {
        const Complex phase = anchored ? I * lambda * (L - xi) : -I * lambda * xi;
        return std::exp(phase) * value(xi, L);
    };
    return detail::integrate_gl(f, 0.0, L, 64, 8);
}

Complex InitialData::hat(Complex lambda, double L) const {
    switch (kind_) {
        case Kind::PiecewiseStep: {
            const double a = split_;
            if (std::abs(lambda) * a < 1e-6) {
                const Complex z = lambda * a;
                return height_ * a *
                       (1.0 - I * z / 2.0 - z * z / 6.0 + I * z * z * z / 24.0);
            }
            return height_ * (1.0 - std::exp(-I * lambda * a)) * (-I / lambda);
        }
        case Kind::Constant: {
            if (value_ == 0.0) return 0.0;
            if (std::abs(lambda) * L < 1e-6) {
                const Complex z = lambda * L;
                return value_ * L * (1.0 - I * z / 2.0 - z * z / 6.0 + I * z * z * z / 24.0);
            }
            return value_ * (1.0 - std::exp(-I * lambda * L)) * (-I / lambda);
        }
        case Kind::HalfCosine: {
            const double pi2 = M_PI * M_PI;
            const Complex den = 4.0 * lambda * lambda * L * L - pi2;
            if (std::abs(den) < 1e-6 * pi2) return hat_quadrature(lambda, L, false);
            return -2.0 * L * (2.0 * I * lambda * L + M_PI * std::exp(-I * lambda * L)) / den;
        }
        case Kind::FullSine: {
            const double pi2 = M_PI * M_PI;
            const Complex den = lambda * lambda * L * L - pi2;
            if (std::abs(den) < 1e-6 * pi2) return hat_quadrature(lambda, L, false);
            return -L * M_PI * (1.0 + std::exp(-I * lambda * L)) / den;
        }
        case Kind::ExpSine: {
            const double c = M_PI / L;
            const Complex b = growth_ - I * lambda;
            const Complex den = b * b + c * c;
            if (std::abs(den) < 1e-6 * c * c) return hat_quadrature(lambda, L, false);
            return c * (1.0 + std::exp(b * L)) / den;
        }
        case Kind::Tabulated:
            return hat_quadrature(lambda, L, false);
    }
    return 0.0;
}

Complex InitialData::hat_anchored(Complex lambda, double L) const {
    switch (kind_) {
        case Kind::PiecewiseStep: {
            const double a = split_;
            if (std::abs(lambda) * L < 1e-6) return std::exp(I * lambda * L) * hat(lambda, L);
            return height_ * (std::exp(I * lambda * L) - std::exp(I * lambda * (L - a))) *
                   (-I / lambda);
        }
        case Kind::Constant: {
            if (value_ == 0.0) return 0.0;
            if (std::abs(lambda) * L < 1e-6) return std::exp(I * lambda * L) * hat(lambda, L);
            return value_ * (std::exp(I * lambda * L) - 1.0) * (-I / lambda);
        }
        case Kind::HalfCosine: {
            const double pi2 = M_PI * M_PI;
            const Complex den = 4.0 * lambda * lambda * L * L - pi2;
            if (std::abs(den) < 1e-6 * pi2) return hat_quadrature(lambda, L, true);
            return -2.0 * L * (2.0 * I * lambda * L * std::exp(I * lambda * L) + M_PI) / den;
        }
        case Kind::FullSine: {
            const double pi2 = M_PI * M_PI;
            const Complex den = lambda * lambda * L * L - pi2;
            if (std::abs(den) < 1e-6 * pi2) return hat_quadrature(lambda, L, true);
            return -L * M_PI * (std::exp(I * lambda * L) + 1.0) / den;
        }
        case Kind::ExpSine: {
            const double c = M_PI / L;
            const Complex b = growth_ - I * lambda;
            const Complex den = b * b + c * c;
            if (std::abs(den) < 1e-6 * c * c) return hat_quadrature(lambda, L, true);
            return c * (std::exp(I * lambda * L) + std::exp(growth_ * L)) / den;
        }
        case Kind::Tabulated:
            return hat_quadrature(lambda, L, true);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// t-transforms
// ---------------------------------------------------------------------------

namespace {

// e^z - 1 without cancellation for small |z|.
Complex expm1c(Complex z) {
    if (std::abs(z) > 0.5) return std::exp(z) - 1.0;
    Complex term = z, sum = z;
    for (int k = 2; k < 24; ++k) {
        term *= z / static_cast<double>(k);
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

} // namespace

Complex ttransform_constant(double value, Complex w, double t) {
    if (value == 0.0 || t == 0.0) return 0.0;
    const Complex z = w * t;
    if (std::abs(z) < 1e-6)
        return value * t * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
    return value * expm1c(z) / w;
}

double phi_n(double t, int n, double tau, double T) {
    if (t <= tau || t > T) return 0.0;
    return std::sin(n * M_PI * (t - tau) / (T - tau));
}

namespace {

double phi_n_deriv(double t, int n, double tau, double T) {
    if (t <= tau || t > T) return 0.0;
    const double om = n * M_PI / (T - tau);
    return om * std::cos(om * (t - tau));
}

// int_tau^t e^{w s} sin(n pi (s-tau)/(T-tau)) ds by composite Gauss panels.
Complex varphi_quadrature(Complex w, double t, int n, double tau, double T) {
    auto f = [&](double s) { return std::exp(w * s) * phi_n(s, n, tau, T); };
    const int panels = std::max(8, 2 * n + 4);
    return detail::integrate_gl(f, tau, std::min(t, T), panels, 16);
}

} // namespace

Complex varphi_basis(Complex w, double t, int n, double tau, double T) {
    if (n < 1) throw InvalidSpec("varphi_basis: n >= 1 required");
    if (!(tau >= 0.0 && tau < T)) throw InvalidSpec("varphi_basis: need 0 <= tau < T");
    if (t <= tau) return 0.0;
    if (t > T) t = T;

    const double bt = tau - T;
    const double npi = n * M_PI;
    const Complex den = bt * bt * w * w + npi * npi;
    if (std::abs(den) < 1e-6 * npi * npi) return varphi_quadrature(w, t, n, tau, T);

    const double arg = npi * (tau - t) / bt;
    const Complex bracket = -npi * std::exp(w * tau) +
                            std::exp(w * t) * (npi * std::cos(arg) + bt * w * std::sin(arg));
    return bt / den * bracket;
}

Complex varphi_n(Complex lambda, double t, int n, double tau, double T, const ProblemParams& p) {
    return varphi_basis(omega(lambda, p), t, n, tau, T);
}

namespace detail {

Complex tt_basis_damped(Complex w, double t, int n, double tau, double T) {
    if (t <= tau) return 0.0;
    const double te = std::min(t, T);
    const double om = n * M_PI / (T - tau);
    const double ph = phi_n(te, n, tau, T);
    const double dph = phi_n_deriv(te, n, tau, T);
    const Complex w2 = w * w;
    const Complex den = w2 + om * om;

    if (std::abs(den) < 1e-4 * om * om) {
        // near the resonance point the closed form cancels; integrate directly
        auto f = [&](double s) { return std::exp(-w * (te - s)) * phi_n(s, n, tau, T); };
        const Complex q = integrate_gl(f, tau, te, std::max(8, 2 * n + 4), 16);
        return q - ph / w + dph / w2;
    }
    const Complex val =
        (om * om * (dph - w * ph) + w2 * om * std::exp(-w * (te - tau))) / (w2 * den);
    if (t > T) return std::exp(-w * (t - T)) * (val + ph / w - dph / w2);
    return val;
}

} // namespace detail

// ---------------------------------------------------------------------------
// BoundarySignal
// ---------------------------------------------------------------------------

BoundarySignal BoundarySignal::constant(double value) {
    BoundarySignal s(Kind::Constant);
    s.value_ = value;
    return s;
}

BoundarySignal BoundarySignal::sine_series(std::vector<double> coeffs, double tau, double T) {
    if (!(tau >= 0.0 && tau < T)) throw InvalidSpec("sine series requires 0 <= tau < T");
    BoundarySignal s(Kind::SineSeries);
    s.coeffs_ = std::move(coeffs);
    s.tau_ = tau;
    s.T_ = T;
    return s;
}

double BoundarySignal::value(double t) const {
    if (kind_ == Kind::Constant) return value_;
    double v = 0.0;
    for (size_t n = 0; n < coeffs_.size(); ++n)
        v += coeffs_[n] * phi_n(t, static_cast<int>(n) + 1, tau_, T_);
    return v;
}

double BoundarySignal::derivative(double t) const {
    if (kind_ == Kind::Constant) return 0.0;
    double v = 0.0;
    for (size_t n = 0; n < coeffs_.size(); ++n)
        v += coeffs_[n] * phi_n_deriv(t, static_cast<int>(n) + 1, tau_, T_);
    return v;
}

Complex BoundarySignal::ttransform(Complex w, double t) const {
    if (kind_ == Kind::Constant) return ttransform_constant(value_, w, t);
    Complex v = 0.0;
    for (size_t n = 0; n < coeffs_.size(); ++n)
        v += coeffs_[n] * varphi_basis(w, t, static_cast<int>(n) + 1, tau_, T_);
    return v;
}

Complex BoundarySignal::tt_damped(Complex w, double t) const {
    if (is_zero() || t == 0.0) return 0.0;
    if (kind_ == Kind::Constant) return -value_ * std::exp(-w * t) / w;
    if (t <= tau_) return 0.0;
    Complex v = 0.0;
    for (size_t n = 0; n < coeffs_.size(); ++n)
        v += coeffs_[n] * detail::tt_basis_damped(w, t, static_cast<int>(n) + 1, tau_, T_);
    return v;
}

Complex BoundarySignal::dropped_rational(Complex w, double t) const {
    if (is_zero() || t == 0.0) return 0.0;
    if (kind_ == Kind::Constant) return value_ / w;
    if (t <= tau_ || t > T_) return 0.0;
    return value(t) / w - derivative(t) / (w * w);
}

Complex sine_series_ttransform(const BoundarySignal& signal, Complex lambda, double t,
                               const ProblemParams& p) {
    if (signal.kind() != BoundarySignal::Kind::SineSeries)
        throw InvalidSpec("sine_series_ttransform expects a sine-series signal");
    return signal.ttransform(omega(lambda, p), t);
}

} // namespace fokas
