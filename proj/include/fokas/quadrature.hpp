#pragma once

#include <functional>
#include <vector>

#include "fokas/types.hpp"

namespace fokas::detail {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order n (cached).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre integral of a complex-valued function over [a, b].
Complex integrate_gl(const std::function<Complex(double)>& f, double a, double b,
                     int panels, int nodes_per_panel);

/// Neumaier-compensated accumulator; keeps long quadrature sums near eps.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct KahanComplex {
    Kahan re, im;
    void add(Complex z) {
        re.add(z.real());
        im.add(z.imag());
    }
    Complex value() const { return {re.value(), im.value()}; }
};

} // namespace fokas::detail
