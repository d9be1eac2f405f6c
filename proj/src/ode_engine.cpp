#include "lifespan/ode_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lifespan/exponents.hpp"
#include "lifespan/numerics.hpp"

namespace lifespan {

namespace {

// Dormand-Prince 5(4) tableau (FSAL: stage 7 is the next step's stage 1).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
// Error weights: 5th-order minus embedded 4th-order solution.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
    std::vector<double> y;   // 5th-order solution
    std::vector<double> k7;  // derivative at the new point (FSAL)
    double err = 0.0;        // scaled error norm
    bool finite = true;
};

class Stepper {
  public:
    explicit Stepper(const OdeSystemSpec& spec, double atol, double rtol)
        : spec_(spec), atol_(atol), rtol_(rtol) {
        const int k = spec.k();
        for (auto* v : {&k2_, &k3_, &k4_, &k5_, &k6_, &ytmp_}) v->assign(k, 0.0);
    }

    StepResult step(double t, const std::vector<double>& y, const std::vector<double>& k1,
                    double h) {
        const int k = spec_.k();
        StepResult out;
        out.y.assign(k, 0.0);
        out.k7.assign(k, 0.0);

        stage(y, h, {{a21, &k1}}, t + c2 * h, k2_);
        stage(y, h, {{a31, &k1}, {a32, &k2_}}, t + c3 * h, k3_);
        stage(y, h, {{a41, &k1}, {a42, &k2_}, {a43, &k3_}}, t + c4 * h, k4_);
        stage(y, h, {{a51, &k1}, {a52, &k2_}, {a53, &k3_}, {a54, &k4_}}, t + c5 * h, k5_);
        stage(y, h, {{a61, &k1}, {a62, &k2_}, {a63, &k3_}, {a64, &k4_}, {a65, &k5_}}, t + h, k6_);
        for (int i = 0; i < k; ++i)
            out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] +
                                   b6 * k6_[i]);
        spec_.rhs(t + h, out.y, out.k7);

        double acc = 0.0;
        for (int i = 0; i < k; ++i) {
            if (!std::isfinite(out.y[i])) out.finite = false;
            const double err_i = h * (e1 * k1[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                      e6 * k6_[i] + e7 * out.k7[i]);
            const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(out.y[i]));
            acc += (err_i / sc) * (err_i / sc);
        }
        out.err = std::sqrt(acc / k);
        if (!out.finite) out.err = std::numeric_limits<double>::infinity();
        return out;
    }

  private:
    void stage(const std::vector<double>& y, double h,
               std::initializer_list<std::pair<double, const std::vector<double>*>> terms,
               double t_stage, std::vector<double>& k_out) {
        const int k = spec_.k();
        for (int i = 0; i < k; ++i) {
            double acc = y[i];
            for (const auto& [coef, vec] : terms) acc += h * coef * (*vec)[i];
            ytmp_[i] = acc;
        }
        spec_.rhs(t_stage, ytmp_, k_out);
    }

    const OdeSystemSpec& spec_;
    double atol_, rtol_;
    std::vector<double> k2_, k3_, k4_, k5_, k6_, ytmp_;
};

bool escaped(const std::vector<double>& y) {
    for (double v : y)
        if (!std::isfinite(v) || v >= kOdeEscapeThreshold) return true;
    return false;
}

double max_abs(const std::vector<double>& y) {
    double m = 0.0;
    for (double v : y)
        if (std::isfinite(v)) m = std::max(m, std::abs(v));
    return m;
}

// Characteristic time of the fastest-growing component; caps dt so the
// terminal power-law regime is sampled densely enough for the fits.
double growth_time(const std::vector<double>& y, const std::vector<double>& dy) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] > 1e3 && dy[i] > 0.0) best = std::min(best, y[i] / dy[i]);
    return best;
}

}  // namespace

void OdeSystemSpec::validate() const {
    const int kk = k();
    if (kk < 1) throw DomainError("ode: k must be >= 1");
    if (static_cast<int>(coeff.size()) != kk || static_cast<int>(initial.size()) != kk)
        throw DomainError("ode: p, coeff, initial must all have k entries");
    for (double pj : p)
        if (!(pj >= 1.0)) throw DomainError("ode: every p_j must be >= 1");
    for (double c : coeff)
        if (!(c > 0.0)) throw DomainError("ode: coefficients must be positive");
    for (double f0 : initial)
        if (!(f0 >= 0.0)) throw DomainError("ode: initial data must be nonnegative");
    if (lambda_tilde < 0.0) throw DomainError("ode: lambda_tilde must be nonnegative");
}

void OdeSystemSpec::rhs(double t, const std::vector<double>& f, std::vector<double>& out) const {
    const int kk = k();
    out.resize(kk);
    for (int j = 0; j + 1 < kk; ++j) out[j] = coeff[j] * pow_clamped(f[j + 1], p[j]);
    out[kk - 1] = coeff[kk - 1] * std::exp(-lambda_tilde * t) * pow_clamped(f[0], p[kk - 1]);
}

IntegrateResult integrate(const OdeSystemSpec& spec, double horizon, double rel_tol) {
    spec.validate();
    if (!(rel_tol > 1e-12 && rel_tol < 1e-2))
        throw DomainError("integrate: rel_tol must lie in (1e-12, 1e-2)");
    if (!(horizon > 0)) throw DomainError("integrate: horizon must be positive");

    const int k = spec.k();
    const double atol = 1e-14 * (1.0 + max_abs(spec.initial));
    Stepper stepper(spec, atol, rel_tol);

    IntegrateResult result;
    auto& traj = result.trajectory;
    std::vector<double> y = spec.initial;
    std::vector<double> k1(k);
    double t = 0.0;
    spec.rhs(t, y, k1);
    traj.t.push_back(t);
    traj.f.push_back(y);

    double rate0 = 0.0;
    for (int i = 0; i < k; ++i) rate0 = std::max(rate0, std::abs(k1[i]) / (1.0 + std::abs(y[i])));
    double dt = std::min(horizon, 1e-2 / (rate0 + 1e-2));

    bool blow = false;
    double achieved = max_abs(y);

    while (t < horizon) {
        dt = std::min({dt, horizon - t, 0.04 * growth_time(y, k1)});
        if (dt < 1e-14 * std::max(1.0, t))
            throw ToleranceFailure("integrate: step size underflow");

        StepResult s = stepper.step(t, y, k1, dt);

        if (s.finite && s.err > 1.0 && !escaped(s.y)) {
            dt *= std::max(0.2, 0.9 * std::pow(s.err, -0.2));
            continue;
        }

        if (escaped(s.y)) {
            // Bisect the crossing inside [t, t + dt]; lo always holds a
            // finite, sub-threshold state.
            double lo = t, hi = t + dt;
            std::vector<double> y_lo = y, k_lo = k1;
            while (hi - lo > 1e-13 * std::max(1.0, hi)) {
                const double mid = 0.5 * (lo + hi);
                StepResult sm = stepper.step(lo, y_lo, k_lo, mid - lo);
                if (escaped(sm.y)) {
                    hi = mid;
                } else {
                    lo = mid;
                    y_lo = sm.y;
                    k_lo = sm.k7;
                    traj.t.push_back(lo);
                    traj.f.push_back(y_lo);
                    achieved = std::max(achieved, max_abs(y_lo));
                }
            }
            t = lo;
            y = y_lo;
            blow = true;
            achieved = std::max(achieved, max_abs(y));
            break;
        }

        // Accept. Components are nondecreasing for nonnegative data; a dip
        // beyond rounding slack means the integrator state is corrupt.
        for (int i = 0; i < k; ++i) {
            if (s.y[i] < y[i] - 1e-9 * (1.0 + std::abs(y[i])))
                throw std::logic_error("integrate: monotonicity violated at an accepted step");
            if (s.y[i] < 0.0) s.y[i] = 0.0;
        }
        t += dt;
        y = s.y;
        k1 = s.k7;
        traj.t.push_back(t);
        traj.f.push_back(y);
        achieved = std::max(achieved, max_abs(y));
        dt *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(s.err, 1e-10), -0.2)));
    }

    auto& est = result.blowup;
    est.achieved_max = achieved;
    if (!blow) {
        est.blew_up = false;
        est.horizon = horizon;
        return result;
    }

    est.blew_up = true;
    est.t_low = t;

    // Extrapolate T from f_1 ~ c (T - s)^{-alpha_1}: f_1^{-1/alpha_1} is
    // affine in time and hits zero at T. Fit over the final decade of f_1.
    const auto alpha = compute_alpha_real(spec.p);
    const double alpha1 = alpha[0];
    const double f1_end = traj.f.back()[0];
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double f1 = traj.f[i][0];
        if (f1 >= 0.1 * f1_end && f1 > 0.0) {
            ts.push_back(traj.t[i]);
            ys.push_back(std::pow(f1, -1.0 / alpha1));
        }
    }
    double T = 0.0;
    const LinearFit fit = fit_line(ts, ys);
    if (ts.size() >= 5 && fit.slope < 0.0) {
        T = -fit.intercept / fit.slope;
    } else {
        // One-point estimator from f' = alpha f / (T - t).
        std::vector<double> dy(k);
        spec.rhs(t, y, dy);
        const double slope = dy[0] > 0 ? alpha1 * y[0] / dy[0] : 0.0;
        T = t + slope;
    }
    if (!(T > t)) T = t * (1.0 + 1e-12) + 1e-300;
    est.T_num = T;
    est.t_high = T + 2.0 * (T - t) + 1e-12;

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (T - ts[i] > 0.0) {
            lx.push_back(std::log(T - ts[i]));
            ly.push_back(std::log(std::pow(ys[i], -alpha1)));
        }
    }
    est.extrapolation_exponent = fit_line(lx, ly).slope;
    return result;
}

ComparisonWitness comparison_check(const OdeSystemSpec& spec_f, const OdeSystemSpec& spec_g,
                                   double horizon) {
    spec_f.validate();
    spec_g.validate();
    const int k = spec_f.k();
    if (spec_g.k() != k || spec_f.p != spec_g.p || spec_f.lambda_tilde != spec_g.lambda_tilde)
        throw std::invalid_argument("comparison_check: systems must share (k, p, lambda_tilde)");
    bool strict = false;
    for (int i = 0; i < k; ++i) {
        if (spec_f.coeff[i] < spec_g.coeff[i])
            throw std::invalid_argument("comparison_check: f-coefficients must dominate");
        if (spec_f.initial[i] < spec_g.initial[i])
            throw std::invalid_argument("comparison_check: f(0) must dominate g(0)");
        if (spec_f.initial[i] > spec_g.initial[i]) strict = true;
    }
    if (!strict)
        throw std::invalid_argument("comparison_check: strict inequality needed somewhere at t=0");

    // Joint system: components [0,k) follow spec_f, [k,2k) follow spec_g,
    // integrated in lockstep so both see identical accepted times.
    OdeSystemSpec joint;
    joint.p.resize(2 * k);
    joint.coeff.resize(2 * k);
    joint.initial.resize(2 * k);
    joint.lambda_tilde = spec_f.lambda_tilde;
    for (int i = 0; i < k; ++i) {
        joint.p[i] = spec_f.p[i];
        joint.p[k + i] = spec_g.p[i];
        joint.coeff[i] = spec_f.coeff[i];
        joint.coeff[k + i] = spec_g.coeff[i];
        joint.initial[i] = spec_f.initial[i];
        joint.initial[k + i] = spec_g.initial[i];
    }

    const double atol = 1e-14 * (1.0 + max_abs(joint.initial));
    // Joint rhs needs custom cyclic wiring; reuse OdeSystemSpec::rhs per half.
    struct JointRhs {
        const OdeSystemSpec &f, &g;
        int k;
        mutable std::vector<double> buf_f, buf_g, out_f, out_g;
        void operator()(double t, const std::vector<double>& z, std::vector<double>& out) const {
            buf_f.assign(z.begin(), z.begin() + k);
            buf_g.assign(z.begin() + k, z.end());
            f.rhs(t, buf_f, out_f);
            g.rhs(t, buf_g, out_g);
            out.resize(2 * k);
            std::copy(out_f.begin(), out_f.end(), out.begin());
            std::copy(out_g.begin(), out_g.end(), out.begin() + k);
        }
    };

    // Wrap the joint RHS in a spec whose rhs we shadow via a local stepper
    // clone: simplest is a bespoke integration loop mirroring integrate().
    JointRhs rhs{spec_f, spec_g, k, {}, {}, {}, {}};

    std::vector<double> z = joint.initial, k1(2 * k), ytmp(2 * k);
    std::vector<double> k2(2 * k), k3(2 * k), k4(2 * k), k5(2 * k), k6(2 * k), k7(2 * k);
    double t = 0.0;
    rhs(t, z, k1);
    double rate0 = 0.0;
    for (int i = 0; i < 2 * k; ++i)
        rate0 = std::max(rate0, std::abs(k1[i]) / (1.0 + std::abs(z[i])));
    double dt = std::min(horizon, 1e-2 / (rate0 + 1e-2));
    const double rtol = 1e-8;

    ComparisonWitness witness;
    auto do_stage = [&](const std::vector<std::pair<double, const std::vector<double>*>>& terms,
                        double t_stage, std::vector<double>& k_out) {
        for (int i = 0; i < 2 * k; ++i) {
            double acc = z[i];
            for (const auto& [coef, vec] : terms) acc += dt * coef * (*vec)[i];
            ytmp[i] = acc;
        }
        rhs(t_stage, ytmp, k_out);
    };

    while (t < horizon) {
        dt = std::min(dt, horizon - t);
        if (dt < 1e-14 * std::max(1.0, t))
            throw ToleranceFailure("comparison_check: step size underflow");
        do_stage({{a21, &k1}}, t + c2 * dt, k2);
        do_stage({{a31, &k1}, {a32, &k2}}, t + c3 * dt, k3);
        do_stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}, t + c4 * dt, k4);
        do_stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, t + c5 * dt, k5);
        do_stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, t + dt, k6);
        std::vector<double> znew(2 * k);
        bool finite = true;
        for (int i = 0; i < 2 * k; ++i) {
            znew[i] = z[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            if (!std::isfinite(znew[i])) finite = false;
        }
        bool esc = !finite;
        for (int i = 0; i < 2 * k && !esc; ++i) esc = znew[i] >= kOdeEscapeThreshold;
        if (esc) break;
        rhs(t + dt, znew, k7);
        double acc = 0.0;
        for (int i = 0; i < 2 * k; ++i) {
            const double err_i = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                       e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(z[i]), std::abs(znew[i]));
            acc += (err_i / sc) * (err_i / sc);
        }
        const double err = std::sqrt(acc / (2 * k));
        if (err > 1.0) {
            dt *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }
        t += dt;
        z = znew;
        k1 = k7;
        dt *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));

        for (int i = 0; i < k; ++i) {
            if (!(z[i] > z[k + i])) {
                witness.ordered = false;
                witness.t = t;
                witness.component = i;
                witness.f_value = z[i];
                witness.g_value = z[k + i];
                return witness;
            }
        }
    }
    return witness;
}

std::vector<double> rate_probe(const IntegrateResult& run) {
    if (!run.blowup.blew_up) throw DomainError("rate_probe: requires a detected blow-up");
    const auto& traj = run.trajectory;
    const double T = run.blowup.T_num;
    const int k = static_cast<int>(traj.f.front().size());

    std::vector<double> slopes(k, 0.0);
    for (int j = 0; j < k; ++j) {
        double fmax = 0.0;
        for (const auto& f : traj.f) fmax = std::max(fmax, f[j]);
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < traj.t.size(); ++i) {
            const double fj = traj.f[i][j];
            if (fj >= 0.1 * fmax && fj > 0.0 && T - traj.t[i] > 0.0) {
                lx.push_back(std::log(T - traj.t[i]));
                ly.push_back(std::log(fj));
            }
        }
        if (lx.size() < 20)
            throw InsufficientData("rate_probe: fewer than 20 samples in the fit window");
        slopes[j] = fit_line(lx, ly).slope;
    }
    return slopes;
}

}  // namespace lifespan
