#pragma once

// Test-only oracles, deliberately implemented independently of the library's
// computation paths: a fraction-free Bareiss solve for the exponent system,
// direct evaluation of the defining sums, a fixed-step classical RK4
// integrator, and a refined trapezoid quadrature.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "lifespan/rational.hpp"

namespace oracles {

using lifespan::BigInt;
using lifespan::Rational;

// Solves (P - I) x = 1 for the cyclic weighted shift matrix by Bareiss
// fraction-free elimination over scaled integers.
inline std::vector<Rational> alpha_by_bareiss(const std::vector<Rational>& p) {
    const int k = static_cast<int>(p.size());
    // Clear denominators: scale row j by den(p_j).
    std::vector<std::vector<BigInt>> a(k, std::vector<BigInt>(k + 1, BigInt(0)));
    for (int j = 0; j < k; ++j) {
        const BigInt num = boost::multiprecision::numerator(p[j]);
        const BigInt den = boost::multiprecision::denominator(p[j]);
        a[j][j] = -den;
        a[j][(j + 1) % k] += num;
        a[j][k] = den;  // rhs 1 scaled by den
    }
    BigInt prev(1);
    for (int col = 0; col < k; ++col) {
        int piv = -1;
        for (int r = col; r < k; ++r)
            if (a[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::runtime_error("bareiss: singular");
        std::swap(a[piv], a[col]);
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            for (int c = 0; c <= k; ++c)
                if (c != col) a[r][c] = (a[r][c] * a[col][col] - a[r][col] * a[col][c]) / prev;
            a[r][col] = 0;
        }
        prev = a[col][col];
    }
    std::vector<Rational> x(k);
    for (int j = 0; j < k; ++j) x[j] = Rational(a[j][k], a[j][j]);
    return x;
}

// P/Q by their defining sums (no recurrences).
inline void pq_by_sums(const std::vector<Rational>& p, std::vector<Rational>& P,
                       std::vector<Rational>& Q) {
    const int k = static_cast<int>(p.size());
    P.assign(k, Rational(0));
    Q.assign(k, Rational(0));
    for (int a = 0; a < k; ++a) {
        Rational sp = 1, sq = 1, run = 1;
        for (int h = 0; h + a <= k - 1; ++h) {
            run *= p[a + h];
            sp += run;
            if (h + a <= k - 2) sq += run;
        }
        P[a] = sp;
        Q[a] = sq;
    }
}

// Random valid exponent vector: rationals in [1, 5], not all equal to 1.
inline std::vector<Rational> random_p(std::mt19937_64& rng, int k) {
    std::uniform_int_distribution<int> num(0, 32), den(1, 8);
    for (;;) {
        std::vector<Rational> p(k);
        bool all_one = true;
        for (int j = 0; j < k; ++j) {
            Rational q = Rational(num(rng), den(rng));
            if (q > 4) q = 4;
            p[j] = 1 + q;
            if (p[j] != 1) all_one = false;
        }
        if (!all_one) return p;
    }
}

// Classical RK4 with a fixed step for the cyclic ODE system; stops and
// reports when any component exceeds `cap`.
struct FixedStepRun {
    std::vector<double> t;
    std::vector<std::vector<double>> f;
    bool escaped = false;
};

template <class Rhs>
FixedStepRun rk4_fixed(const Rhs& rhs, std::vector<double> y0, double t_end, double dt,
                       double cap, int record_stride = 1000) {
    FixedStepRun out;
    const int k = static_cast<int>(y0.size());
    std::vector<double> y = y0, k1(k), k2(k), k3(k), k4(k), tmp(k);
    double t = 0.0;
    long step = 0;
    out.t.push_back(t);
    out.f.push_back(y);
    while (t < t_end) {
        const double h = std::min(dt, t_end - t);
        rhs(t, y, k1);
        for (int i = 0; i < k; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        rhs(t + 0.5 * h, tmp, k2);
        for (int i = 0; i < k; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        rhs(t + 0.5 * h, tmp, k3);
        for (int i = 0; i < k; ++i) tmp[i] = y[i] + h * k3[i];
        rhs(t + h, tmp, k4);
        for (int i = 0; i < k; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += h;
        bool esc = false;
        for (double v : y)
            if (!std::isfinite(v) || v > cap) esc = true;
        if (++step % record_stride == 0 || esc || t >= t_end) {
            out.t.push_back(t);
            out.f.push_back(y);
        }
        if (esc) {
            out.escaped = true;
            break;
        }
    }
    return out;
}

// Refined composite trapezoid for cross-checking Simpson results.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    double acc = 0.5 * (f(a) + f(b));
    const double h = (b - a) / n;
    for (int i = 1; i < n; ++i) acc += f(a + i * h);
    return acc * h;
}

}  // namespace oracles
