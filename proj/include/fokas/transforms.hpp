#pragma once

#include <utility>
#include <vector>

#include "fokas/types.hpp"

namespace fokas {

/// Initial profile catalog with closed-form half-interval Fourier transforms,
/// plus a tabulated fallback evaluated by composite Gauss quadrature.
class InitialData {
  public:
    enum class Kind { PiecewiseStep, HalfCosine, FullSine, ExpSine, Constant, Tabulated };

    static InitialData piecewise_step(double height, double split);
    static InitialData half_cosine();
    static InitialData full_sine();
    /// e^{a x} sin(pi x / L): the separable advection eigenmode weight.
    static InitialData exp_sine(double growth);
    static InitialData constant(double value);
    static InitialData zero() { return constant(0.0); }
    static InitialData tabulated(std::vector<std::pair<double, double>> samples);

    Kind kind() const { return kind_; }
    bool is_zero() const;
    bool is_catalog() const { return kind_ != Kind::Tabulated; }

    void validate(double L) const;

    /// Pointwise profile value.
    double value(double x, double L) const;

    /// Half-interval transform  hat(lambda) = int_0^L e^{-i lambda x} theta0 dx.
    /// Entire in lambda; removable points handled. Safe for Im(lambda) <= 0.
    Complex hat(Complex lambda, double L) const;

    /// e^{i lambda L} * hat(lambda), evaluated without large intermediates;
    /// the bounded grouping for Im(lambda) >= 0.
    Complex hat_anchored(Complex lambda, double L) const;

  private:
    InitialData(Kind k) : kind_(k) {}

    Complex hat_quadrature(Complex lambda, double L, bool anchored) const;

    Kind kind_;
    double height_ = 1.0;
    double split_ = 0.0;
    double value_ = 0.0;
    double growth_ = 0.0;
    std::vector<std::pair<double, double>> samples_;
};

/// t-transform of a constant signal: value * (e^{w t} - 1)/w, with the series
/// limit value*t for small |w t|.
Complex ttransform_constant(double value, Complex w, double t);

/// Control basis function, supported on [tau, T].
double phi_n(double t, int n, double tau, double T);

/// t-transform of phi_n as a function of the complex rate argument w.
/// Closed form with a near-resonance quadrature fallback.
Complex varphi_basis(Complex w, double t, int n, double tau, double T);

/// Spec interface: varphi_n(lambda, ...) = varphi_basis(omega(lambda), ...).
Complex varphi_n(Complex lambda, double t, int n, double tau, double T, const ProblemParams& p);

namespace detail {
/// Damped, rational-part-subtracted basis kernel
///   e^{-w t} varphi_basis(w,t) - phi_n(t)/w + phi_n'(t)/w^2,
/// valid for tau < t <= T; decays like 1/w^4 for large Re(w).
Complex tt_basis_damped(Complex w, double t, int n, double tau, double T);
} // namespace detail

/// Time signal at an endpoint.
class BoundarySignal {
  public:
    enum class Kind { Constant, SineSeries }; // Zero canonicalizes to Constant(0)

    static BoundarySignal zero() { return constant(0.0); }
    static BoundarySignal constant(double value);
    static BoundarySignal sine_series(std::vector<double> coeffs, double tau, double T);

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::Constant && value_ == 0.0; }

    double value(double t) const;
    double derivative(double t) const;

    /// Printed t-transform, function of the complex rate argument w.
    Complex ttransform(Complex w, double t) const;

    /// Damped transform with the non-decaying rational part removed:
    ///   e^{-w t} * ttransform(w, t) - dropped_rational(w, t).
    /// This is the part that is integrated numerically on the contour; the
    /// dropped part integrates to zero there.
    Complex tt_damped(Complex w, double t) const;

    /// The analytically-dropped rational part (for identity tests).
    Complex dropped_rational(Complex w, double t) const;

    const std::vector<double>& coeffs() const { return coeffs_; }
    double tau() const { return tau_; }
    double final_time() const { return T_; }
    double constant_value() const { return value_; }

  private:
    BoundarySignal(Kind k) : kind_(k) {}

    Kind kind_;
    double value_ = 0.0;
    std::vector<double> coeffs_;
    double tau_ = 0.0;
    double T_ = 0.0;
};

/// Sum of basis transforms, linear in the coefficients.
Complex sine_series_ttransform(const BoundarySignal& signal, Complex lambda, double t,
                               const ProblemParams& p);

} // namespace fokas
