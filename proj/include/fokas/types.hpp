#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace fokas {

using Complex = std::complex<double>;

inline constexpr Complex I{0.0, 1.0};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidSpec : Error {
    using Error::Error;
};
struct DegenerateDenominator : Error {
    using Error::Error;
};
struct CountMismatch : Error {
    using Error::Error;
};
struct PoleOnContour : Error {
    using Error::Error;
};
struct ZeroTimeUnbounded : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

/// Robin coefficient at an endpoint. Neumann ends are an explicit marker,
/// never a large float; kernels on the Robin path must reject the marker.
class RobinCoeff {
  public:
    RobinCoeff() : value_(0.0), neumann_(false) {}

    static RobinCoeff finite(double v) {
        if (!(v >= 0.0)) throw InvalidSpec("Robin coefficient must be nonnegative");
        RobinCoeff c;
        c.value_ = v;
        return c;
    }
    static RobinCoeff neumann() {
        RobinCoeff c;
        c.neumann_ = true;
        return c;
    }

    bool is_neumann() const { return neumann_; }
    /// Finite value; throws on the Neumann marker.
    double value() const {
        if (neumann_) throw InvalidSpec("Neumann marker used on a Robin-coefficient path");
        return value_;
    }

  private:
    double value_;
    bool neumann_;
};

/// Physical/geometric constants of the interval problem.
struct ProblemParams {
    double D0 = 1.0;  // diffusivity, length^2/time
    double K0 = 0.0;  // advection speed, length/time
    double L = 1.0;   // interval length
    RobinCoeff alpha; // Robin coefficient at x = 0
    RobinCoeff beta;  // Robin coefficient at x = L

    /// K0 / (2 D0), the spectral shift.
    double kappa() const { return K0 / (2.0 * D0); }

    void validate() const {
        if (!(D0 > 0.0)) throw InvalidSpec("D0 must be positive");
        if (!(L > 0.0)) throw InvalidSpec("L must be positive");
        if (!(K0 >= 0.0)) throw InvalidSpec("K0 must be nonnegative");
    }
};

inline ProblemParams make_params(double D0, double K0, double L, double alpha, double beta) {
    ProblemParams p;
    p.D0 = D0;
    p.K0 = K0;
    p.L = L;
    p.alpha = RobinCoeff::finite(alpha);
    p.beta = RobinCoeff::finite(beta);
    p.validate();
    return p;
}

} // namespace fokas
