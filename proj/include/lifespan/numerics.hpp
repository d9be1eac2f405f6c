#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lifespan {

// Composite Simpson over [a,b] with n_intervals subintervals (made even
// internally). Second-order fields with smooth weights converge at fourth
// order, which keeps every quadrature-based tolerance in this project slack.
double simpson(const std::function<double(double)>& f, double a, double b, int n_intervals);

// 5-point Gauss-Legendre on [a,b]; used for partial cells at a kink radius.
double gauss5(const std::function<double(double)>& f, double a, double b);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t count = 0;
};

// Weighted least squares of y against x. Empty weights mean uniform.
LinearFit fit_line(std::span<const double> x, std::span<const double> y,
                   std::span<const double> w = {});

// Bisection for g(lo) <= 0 <= g(hi) (or the reverse sign arrangement), to a
// relative bracket width of rel_tol. Assumes a sign change on entry.
double bisect(const std::function<double(double)>& g, double lo, double hi, double rel_tol);

// x^p with a fast path for small integer exponents; the PDE and ODE kernels
// spend most of their time here. Negative bases are clamped to zero: the
// systems integrated are nonnegative and stray sign noise must not produce
// NaN through a real-exponent pow.
inline double pow_clamped(double x, double p) {
    if (x <= 0.0) return 0.0;
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    if (p == 3.0) return x * x * x;
    if (p == 4.0) {
        const double s = x * x;
        return s * s;
    }
    return std::pow(x, p);
}

}  // namespace lifespan
