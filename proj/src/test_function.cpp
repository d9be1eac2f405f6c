#include "lifespan/test_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lifespan/numerics.hpp"

namespace lifespan {

namespace {

constexpr double kPi = std::numbers::pi;

double j0(double x) { return std::cyl_bessel_j(0, x); }
double j1(double x) { return std::cyl_bessel_j(1, x); }

// J1(x)/x with the series branch near zero.
double j1_over_x(double x) {
    if (x < 1e-6) return 0.5 - x * x / 16.0;
    return j1(x) / x;
}

}  // namespace

double sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return 2.0 * kPi;
        case 3: return 4.0 * kPi;
    }
    throw UnsupportedDimension("sphere_area: n must be 1, 2, or 3");
}

double TestFunctionSpec::psi(double r) const {
    r = std::abs(r);
    if (r >= 1.0) return 0.0;
    switch (n) {
        case 1: return amp_ * std::cos(kPi * r / 2.0);
        case 2: return amp_ * j0(bessel_c_ * r);
        case 3: {
            if (r < 1e-4) {
                const double z = kPi * r, z2 = z * z;
                return amp_ * kPi * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
            }
            return amp_ * std::sin(kPi * r) / r;
        }
    }
    throw UnsupportedDimension("psi: unsupported dimension");
}

double TestFunctionSpec::dpsi(double r) const {
    r = std::abs(r);
    if (r >= 1.0) return 0.0;
    switch (n) {
        case 1: return -amp_ * (kPi / 2.0) * std::sin(kPi * r / 2.0);
        case 2: return -amp_ * bessel_c_ * j1(bessel_c_ * r);
        case 3: {
            if (r < 1e-4) {
                const double z = kPi * r, z2 = z * z;
                return amp_ * kPi * kPi * (-z / 3.0 + z * z2 / 30.0);
            }
            return amp_ * (kPi * r * std::cos(kPi * r) - std::sin(kPi * r)) / (r * r);
        }
    }
    throw UnsupportedDimension("dpsi: unsupported dimension");
}

double TestFunctionSpec::laplacian_psi(double r) const {
    r = std::abs(r);
    if (r >= 1.0) return 0.0;
    switch (n) {
        case 1: {
            const double q = kPi / 2.0;
            return -amp_ * q * q * std::cos(q * r);
        }
        case 2: {
            const double x = bessel_c_ * r;
            // psi'' = -amp c^2 (J0 - J1/x); psi'/r = -amp c^2 J1/x.
            const double psi2 = -amp_ * bessel_c_ * bessel_c_ * (j0(x) - j1_over_x(x));
            if (r < 1e-7) return 2.0 * psi2;  // symmetric limit: 2 psi''(0)
            return psi2 + dpsi(r) / r;
        }
        case 3: {
            if (r < 1e-4) {
                const double z = kPi * r, z2 = z * z;
                // series of psi'' + 2 psi'/r
                return amp_ * kPi * kPi * kPi * (-1.0 + z2 / 6.0 - z2 * z2 / 120.0);
            }
            const double s = std::sin(kPi * r), c = std::cos(kPi * r);
            const double psi2 =
                amp_ * (-kPi * kPi * r * r * s - 2.0 * kPi * r * c + 2.0 * s) / (r * r * r);
            return psi2 + 2.0 * dpsi(r) / r;
        }
    }
    throw UnsupportedDimension("laplacian_psi: unsupported dimension");
}

double TestFunctionSpec::phi(double r, double R) const {
    const double v = psi(r / R);
    return v * v;
}

double TestFunctionSpec::neg_laplacian_phi(double r, double R) const {
    const double rho = std::abs(r) / R;
    if (rho >= 1.0) return 0.0;
    const double v = psi(rho), dv = dpsi(rho), lap = laplacian_psi(rho);
    return -(2.0 / (R * R)) * (v * lap + dv * dv);
}

double TestFunctionSpec::psi_at_zero() const { return psi(0.0); }

TestFunctionSpec build_psi(int n) {
    if (n < 1 || n > 3)
        throw UnsupportedDimension("build_psi: n must be 1, 2, or 3 (larger n not implemented)");
    TestFunctionSpec spec;
    spec.n = n;
    switch (n) {
        case 1:
            spec.lambda = kPi * kPi / 2.0;
            spec.amp_ = kPi / 4.0;
            break;
        case 2: {
            // First zero of J0 by bracketing bisection.
            const double c = bisect([](double x) { return j0(x); }, 2.0, 3.0, 1e-15);
            spec.bessel_c_ = c;
            spec.lambda = 2.0 * c * c;
            spec.amp_ = c / (2.0 * kPi * j1(c));
            break;
        }
        case 3:
            spec.lambda = 2.0 * kPi * kPi;
            spec.amp_ = 0.25;
            break;
    }

    const int cells = std::max(512, spec.nodes_per_unit);
    spec.mass_ = sphere_area(n) * simpson([&](double r) { return spec.psi(r) * std::pow(r, n - 1); },
                                          0.0, 1.0, cells);
    spec.l2sq_ = sphere_area(n) * simpson(
                                      [&](double r) {
                                          const double v = spec.psi(r);
                                          return v * v * std::pow(r, n - 1);
                                      },
                                      0.0, 1.0, cells);

    if (std::abs(spec.mass_ - 1.0) > 1e-10)
        throw std::logic_error("build_psi: profile mass is not 1");
    double worst = 0.0;
    for (int i = 1; i < cells; ++i) {
        const double r = double(i) / cells;
        worst = std::max(worst,
                         std::abs(-spec.laplacian_psi(r) - 0.5 * spec.lambda * spec.psi(r)));
    }
    if (worst > 1e-8) throw std::logic_error("build_psi: eigen-residual too large");
    return spec;
}

namespace {

// Shared quadrature of sum_i w_i g(u_i, r_i) phi_R(r_i) r_i^{n-1} over the
// field mesh clipped at min(R, r_dom), with a Gauss tail on the partial cell.
template <class NodeValue>
double field_quadrature(const FieldState& field, const TestFunctionSpec& spec, double R,
                        const NodeValue& value) {
    if (!(R > 0)) throw DomainError("weighted_mass: R must be positive");
    const double h = field.h;
    const double r_dom = field.r_dom();
    const double r_end = std::min(R, r_dom);
    int last = static_cast<int>(std::floor(r_end / h + 1e-12));
    last = std::min(last, field.m() - 1);
    if (last + 1 < 32) throw MeshTooCoarse("weighted_mass: fewer than 32 nodes inside radius");

    const auto g = [&](int i) {
        const double r = i * h;
        return value(i) * spec.phi(r, R) * std::pow(r, field.n - 1);
    };

    double acc = 0.0;
    int simpson_last = last;
    if (last % 2 != 0) simpson_last = last - 3;
    for (int i = 1; i < simpson_last; ++i) acc += g(i) * (i % 2 ? 4.0 : 2.0);
    acc += g(0) + g(simpson_last);
    acc *= h / 3.0;
    if (simpson_last != last) {
        acc += 3.0 * h / 8.0 *
               (g(simpson_last) + 3.0 * g(simpson_last + 1) + 3.0 * g(simpson_last + 2) + g(last));
    }

    // Partial cell between the last node and R (linear interpolation of the
    // field; the weight and radius factor are exact).
    if (r_end < r_dom - 1e-12 * r_dom && r_end > last * h && last + 1 < field.m()) {
        const double a = last * h;
        const double va = value(last), vb = value(last + 1);
        acc += gauss5(
            [&](double r) {
                const double u = va + (vb - va) * (r - a) / h;
                return u * spec.phi(r, R) * std::pow(r, field.n - 1);
            },
            a, r_end);
    }
    return acc * sphere_area(field.n);
}

}  // namespace

double weighted_mass(const FieldState& field, const TestFunctionSpec& spec, double R, int j) {
    if (j < 0 || j >= field.k) throw DomainError("weighted_mass: component out of range");
    return field_quadrature(field, spec, R, [&](int i) { return field.u[j][i]; });
}

double weighted_mass_power(const FieldState& field, const TestFunctionSpec& spec, double R, int j,
                           double p) {
    if (j < 0 || j >= field.k) throw DomainError("weighted_mass: component out of range");
    return field_quadrature(field, spec, R,
                            [&](int i) { return pow_clamped(field.u[j][i], p); });
}

double weighted_mass_profile(const std::function<double(double)>& u, double support_radius,
                             const TestFunctionSpec& spec, double R, int n) {
    const double r_end = std::min(R, support_radius);
    if (!(r_end > 0)) return 0.0;
    int cells = static_cast<int>(std::ceil(spec.nodes_per_unit * r_end));
    cells = std::max(cells, 4096);
    return sphere_area(n) *
           simpson([&](double r) { return u(r) * spec.phi(r, R) * std::pow(r, n - 1); }, 0.0,
                   r_end, cells);
}

double solve_R0(const std::function<double(double)>& U0_curve, const Rational& alpha_j0, int n,
                const std::function<double(double)>& chain_threshold) {
    if (!(alpha_j0 > Rational(n, 2)))
        throw NotSupercritical("solve_R0: requires alpha_j0 > n/2");
    const auto gap = [&](double R) { return U0_curve(R) - chain_threshold(R); };

    double hi = 1.0;
    while (gap(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e14) {
            if (U0_curve(hi) <= 0.0)
                throw NoRoot("solve_R0: data functional vanishes identically");
            throw NoRoot("solve_R0: no crossing found below R = 1e14");
        }
    }
    double lo = std::min(1.0, hi / 2.0);
    while (gap(lo) > 0.0 && lo > 1e-14) lo /= 2.0;
    if (gap(lo) > 0.0) throw NoRoot("solve_R0: threshold curve already crossed at R = 1e-14");
    return bisect(gap, lo, hi, 1e-10);
}

}  // namespace lifespan
