#include "lifespan/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lifespan/numerics.hpp"

namespace lifespan {

namespace {

// Finite-volume geometry of the uniform radial mesh: face areas r^{n-1} at
// r_{i +/- 1/2} and exact cell volumes. The discrete Laplacian telescopes, so
// interior mass changes only through the outer boundary flux.
struct MeshGeometry {
    int m = 0;
    double h = 0.0;
    int n = 1;
    std::vector<double> face_lo, face_hi, vol;

    void rebuild(int m_, double h_, int n_) {
        m = m_;
        h = h_;
        n = n_;
        face_lo.resize(m);
        face_hi.resize(m);
        vol.resize(m);
        for (int i = 0; i < m; ++i) {
            const double rlo = std::max(0.0, (i - 0.5) * h);
            const double rhi = std::min((i + 0.5) * h, (m - 1) * h);
            face_lo[i] = i == 0 ? 0.0 : std::pow(rlo, n - 1);
            face_hi[i] = std::pow(rhi, n - 1);
            vol[i] = (std::pow(rhi, n) - std::pow(rlo, n)) / n;
        }
    }
};

struct Scratch {
    std::vector<double> diag, upper, rhs;
};

// Backward-Euler diffusion solve: (I - dt Lap) u_new = w, one tridiagonal
// system per component. The matrix is an M-matrix for every dt > 0, so
// nonnegative w yields nonnegative u_new.
void diffuse_implicit(std::vector<double>& u, const MeshGeometry& geo, BoundaryKind boundary,
                      double dt, Scratch& s) {
    const int m = geo.m;
    const double h = geo.h;
    s.diag.resize(m);
    s.upper.resize(m);
    s.rhs.resize(m);

    // Assemble and eliminate in one forward sweep (Thomas algorithm).
    // Row i: -dt*lo[i]/ (vol h) * u_{i-1} + (1 + dt*(lo+hi)/(vol h)) u_i - dt*hi/(vol h) u_{i+1}.
    const int last = m - 1;
    for (int i = 0; i < m; ++i) {
        const double scale = dt / (geo.vol[i] * h);
        double lo = geo.face_lo[i] * scale;
        double hi = geo.face_hi[i] * scale;
        if (i == last) {
            if (boundary == BoundaryKind::Dirichlet) {
                s.diag[i] = 1.0;
                s.upper[i] = 0.0;
                s.rhs[i] = 0.0;
                continue;
            }
            hi = 0.0;  // zero outer flux
        }
        s.diag[i] = 1.0 + lo + hi;
        s.upper[i] = -hi;
        s.rhs[i] = u[i];
        if (i == last) continue;
        // store the lower entry implicitly through the sweep below
    }

    // Forward elimination with on-the-fly lower coefficients.
    for (int i = 1; i < m; ++i) {
        double lo;
        {
            const double scale = dt / (geo.vol[i] * h);
            lo = -geo.face_lo[i] * scale;
            if (i == last && boundary == BoundaryKind::Dirichlet) lo = 0.0;
        }
        const double w = lo / s.diag[i - 1];
        s.diag[i] -= w * s.upper[i - 1];
        s.rhs[i] -= w * s.rhs[i - 1];
    }
    u[last] = s.rhs[last] / s.diag[last];
    for (int i = last - 1; i >= 0; --i) u[i] = (s.rhs[i] - s.upper[i] * u[i + 1]) / s.diag[i];
}

void apply_step(FieldState& state, const std::vector<double>& p, const MeshGeometry& geo,
                bool couple, double dt, Scratch& scratch) {
    const int k = state.k;
    const int m = state.m();
    if (couple) {
        // Explicit reaction from the pre-step state of the next component.
        static thread_local std::vector<std::vector<double>> stage;
        stage.assign(state.u.begin(), state.u.end());
        for (int j = 0; j < k; ++j) {
            const auto& src = stage[(j + 1) % k];
            auto& dst = state.u[j];
            const double pj = p[j];
            for (int i = 0; i < m; ++i) dst[i] += dt * pow_clamped(src[i], pj);
        }
    }
    for (int j = 0; j < k; ++j) {
        diffuse_implicit(state.u[j], geo, state.boundary, dt, scratch);
        if (state.boundary == BoundaryKind::Dirichlet) state.u[j][m - 1] = 0.0;
        for (int i = 0; i < m; ++i) {
            double& v = state.u[j][i];
            if (v < 0.0) {
                if (v < -1e-10 * (1.0 + std::abs(v)))
                    throw std::logic_error("pde step: negativity beyond rounding slack");
                v = 0.0;
            }
        }
    }
    state.t += dt;
}

double sup_norm(const std::vector<double>& u) {
    double s = 0.0;
    for (double v : u) s = std::max(s, v);
    return s;
}

double l1_norm(const std::vector<double>& u, const MeshGeometry& geo, int n) {
    double s = 0.0;
    for (int i = 0; i < geo.m; ++i) s += u[i] * geo.vol[i];
    return s * sphere_area(n);
}

}  // namespace

double InitialData::amplitude_of(int j) const {
    if (amplitude.empty()) throw DomainError("initial data: no amplitude");
    if (static_cast<int>(amplitude.size()) == 1) return amplitude[0];
    if (j < 0 || j >= static_cast<int>(amplitude.size()))
        throw DomainError("initial data: component out of range");
    return amplitude[j];
}

double InitialData::eval(int j, double r) const {
    const double a = amplitude_of(j);
    switch (shape) {
        case Shape::Gaussian: {
            const double s = (r - center) / width;
            return a * std::exp(-0.5 * s * s);
        }
        case Shape::Bump: {
            const double s = (r - center) / width;
            if (std::abs(s) >= 1.0) return 0.0;
            return a * std::exp(1.0 - 1.0 / (1.0 - s * s));
        }
        case Shape::Constant: return a;
    }
    return 0.0;
}

double InitialData::support_radius() const {
    switch (shape) {
        case Shape::Gaussian: return center + 40.0 * width;
        case Shape::Bump: return center + width;
        case Shape::Constant: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

InitialData InitialData::scaled(double factor) const {
    InitialData out = *this;
    for (double& a : out.amplitude) a *= factor;
    return out;
}

FieldState make_initial_state(const InitialData& data, const SystemParams& params,
                              const SimConfig& cfg) {
    params.validate();
    double r_dom = cfg.r_dom;
    if (r_dom <= 0.0) {
        const double support = data.support_radius();
        if (!std::isfinite(support))
            throw DomainError("make_initial_state: constant data needs an explicit r_dom");
        r_dom = std::max(8.0, 4.0 * support);
    }
    const double h = 1.0 / cfg.nodes_per_unit;
    const int m = static_cast<int>(std::llround(r_dom / h)) + 1;

    FieldState state;
    state.t = 0.0;
    state.k = params.k;
    state.n = params.n;
    state.h = h;
    state.boundary = cfg.boundary;
    state.u.assign(params.k, std::vector<double>(m, 0.0));
    for (int j = 0; j < params.k; ++j) {
        for (int i = 0; i < m; ++i) state.u[j][i] = std::max(0.0, data.eval(j, i * h));
        if (cfg.boundary == BoundaryKind::Dirichlet) state.u[j][m - 1] = 0.0;
    }
    return state;
}

FieldState step(const FieldState& state, const SystemParams& params, double dt) {
    params.validate();
    if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
    if (state.k != params.k) throw DomainError("step: component count mismatch");
    FieldState out = state;
    MeshGeometry geo;
    geo.rebuild(out.m(), out.h, out.n);
    Scratch scratch;
    apply_step(out, to_double_vector(params.p), geo, true, dt, scratch);
    return out;
}

SimReport run(const InitialData& u0, const SystemParams& params, const TestFunctionSpec& spec,
              double horizon, const SimConfig& cfg) {
    params.validate();
    if (!(horizon > 0.0)) throw DomainError("run: horizon must be positive");

    FieldState state = make_initial_state(u0, params, cfg);
    MeshGeometry geo;
    geo.rebuild(state.m(), state.h, state.n);
    Scratch scratch;
    const auto p = to_double_vector(params.p);
    const auto alpha = compute_alpha_real(p);

    std::vector<double> l_vec = cfg.l_vector;
    if (l_vec.empty()) {
        // Default decay weights by regime: the supercritical shift when
        // alpha_max > n/2, the safeguarded subcritical choice otherwise.
        const auto profile = compute_alpha(params);
        if (profile.criticality == Criticality::Supercritical)
            l_vec = to_double_vector(profile.l_case2);
        else if (profile.criticality == Criticality::Subcritical)
            l_vec = to_double_vector(profile.l_case1);
        else
            l_vec = to_double_vector(profile.alpha);
    }

    SimReport report;
    report.trace_radius = cfg.trace_radius;
    report.horizon = horizon;
    report.l_vector = l_vec;

    std::size_t stride = 1, steps_since_record = 0;
    double m_running = 0.0;
    const auto record = [&]() {
        TraceSample sample;
        sample.t = state.t;
        sample.U.resize(state.k);
        sample.sup.resize(state.k);
        sample.l1.resize(state.k);
        double m_term = 0.0;
        for (int j = 0; j < state.k; ++j) {
            sample.U[j] = weighted_mass(state, spec, cfg.trace_radius, j);
            sample.sup[j] = sup_norm(state.u[j]);
            sample.l1[j] = l1_norm(state.u[j], geo, state.n);
            m_term += std::pow(1.0 + state.t, l_vec[j]) * sample.sup[j] +
                      std::pow(1.0 + state.t, l_vec[j] - 0.5 * state.n) * sample.l1[j];
        }
        m_running = std::max(m_running, m_term);
        sample.M_run = m_running;
        report.trace.push_back(std::move(sample));
        if (report.trace.size() > cfg.max_trace) {
            // Halve the trace in place and record half as often from now on.
            std::vector<TraceSample> kept;
            kept.reserve(report.trace.size() / 2 + 1);
            for (std::size_t i = 0; i < report.trace.size(); i += 2)
                kept.push_back(std::move(report.trace[i]));
            report.trace = std::move(kept);
            stride *= 2;
        }
    };

    record();
    std::size_t next_snapshot = 0;

    double dt_prev = cfg.dt_init;
    double achieved = 0.0;
    for (int j = 0; j < state.k; ++j) achieved = std::max(achieved, sup_norm(state.u[j]));
    const double achieved0 = achieved;

    FieldState saved;  // pre-step state kept near the detection threshold
    bool blew = false;
    double t_esc = 0.0;
    long step_count = 0;

    while (state.t < horizon) {
        // Controller: explicit-part rate limit plus a slowly opening cap.
        double rate = 0.0;
        std::vector<double> sups(state.k);
        for (int j = 0; j < state.k; ++j) sups[j] = sup_norm(state.u[j]);
        for (int j = 0; j < state.k; ++j) {
            const double drive = sups[(j + 1) % state.k];
            rate = std::max(rate, p[j] * pow_clamped(drive, p[j] - 1.0));
        }
        double dt = cfg.dt_safety / std::max(rate, 1e-300);
        dt = std::min(dt, cfg.dt_cap0 + cfg.dt_cap_growth * state.t);
        dt = std::min(dt, 1.15 * dt_prev);
        dt = std::min(dt, horizon - state.t);
        if (dt < 1e-12) throw StabilityFailure("run: explicit part forced dt below 1e-12");

        const double sup_now = *std::max_element(sups.begin(), sups.end());
        const bool near_threshold = sup_now >= 0.01 * cfg.sup_threshold;
        if (near_threshold) saved = state;

        apply_step(state, p, geo, cfg.couple, dt, scratch);
        dt_prev = dt;
        ++step_count;

        double sup_new = 0.0;
        for (int j = 0; j < state.k; ++j) sup_new = std::max(sup_new, sup_norm(state.u[j]));
        achieved = std::max(achieved, sup_new);

        if (sup_new >= cfg.sup_threshold) {
            // Bisect the crossing within the last step so the escape time is
            // sharp relative to the local step.
            if (near_threshold) {
                state = saved;
                double lo = 0.0, hi = dt;
                for (int it = 0; it < 20 && (hi - lo) > 1e-3 * dt; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    FieldState probe = state;
                    apply_step(probe, p, geo, cfg.couple, mid - lo, scratch);
                    double s = 0.0;
                    for (int j = 0; j < probe.k; ++j) s = std::max(s, sup_norm(probe.u[j]));
                    if (s >= cfg.sup_threshold) {
                        hi = mid;
                    } else {
                        state = std::move(probe);
                        lo = mid;
                        record();
                    }
                }
                // Land just past the threshold for the achieved_max record.
                apply_step(state, p, geo, cfg.couple, hi - lo, scratch);
                double s = 0.0;
                for (int j = 0; j < state.k; ++j) s = std::max(s, sup_norm(state.u[j]));
                achieved = std::max(achieved, s);
            }
            blew = true;
            t_esc = state.t;
            record();
            break;
        }

        if (steps_since_record++ % stride == 0) record();

        while (next_snapshot < cfg.snapshot_times.size() &&
               state.t >= cfg.snapshot_times[next_snapshot]) {
            report.snapshots.push_back(state);
            ++next_snapshot;
        }

        if (cfg.auto_extend && step_count % 16 == 0 &&
            state.u[0].size() < cfg.max_nodes) {
            const int m = state.m();
            const int zone = std::max(4, m / 16);
            double tail = 0.0;
            for (int j = 0; j < state.k; ++j)
                for (int i = m - zone; i < m - 1; ++i) tail = std::max(tail, state.u[j][i]);
            if (tail > 1e-13 * std::max(achieved0, sup_new)) {
                const int m_new =
                    std::min<std::size_t>(cfg.max_nodes, static_cast<std::size_t>(m * 3 / 2));
                if (m_new > m) {
                    for (auto& comp : state.u) comp.resize(m_new, 0.0);
                    geo.rebuild(m_new, state.h, state.n);
                }
            }
        }
    }

    auto& est = report.blowup;
    est.achieved_max = achieved;
    if (!blew) {
        est.blew_up = false;
        est.horizon = horizon;
        // Sup-norm decay exponents over the second half of the run.
        report.decay_exponent.assign(state.k, 0.0);
        for (int j = 0; j < state.k; ++j) {
            std::vector<double> lx, ly;
            for (const auto& s : report.trace)
                if (s.t >= horizon / 2 && s.sup[j] > 0.0) {
                    lx.push_back(std::log(1.0 + s.t));
                    ly.push_back(std::log(s.sup[j]));
                }
            if (lx.size() >= 3) report.decay_exponent[j] = -fit_line(lx, ly).slope;
        }
        return report;
    }

    est.blew_up = true;
    est.t_low = t_esc;

    // Power-law extrapolation on the fastest-diverging component.
    int jstar = 0;
    for (int j = 1; j < state.k; ++j)
        if (alpha[j] > alpha[jstar]) jstar = j;
    const double a_star = alpha[jstar];
    double sup_end = 0.0;
    for (const auto& s : report.trace) sup_end = std::max(sup_end, s.sup[jstar]);
    std::vector<double> ts, ys;
    for (const auto& s : report.trace)
        if (s.sup[jstar] >= 0.1 * sup_end && s.sup[jstar] > 0.0) {
            ts.push_back(s.t);
            ys.push_back(std::pow(s.sup[jstar], -1.0 / a_star));
        }
    double T = t_esc;
    const LinearFit fit = fit_line(ts, ys);
    if (ts.size() >= 5 && fit.slope < 0.0)
        T = -fit.intercept / fit.slope;
    if (!(T > t_esc)) T = t_esc * (1.0 + 1e-9) + 1e-300;
    est.T_num = T;
    est.t_high = T + 2.0 * (T - t_esc) + 1e-12;

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (T - ts[i] > 0.0) {
            lx.push_back(std::log(T - ts[i]));
            ly.push_back(-a_star * std::log(ys[i]));
        }
    est.extrapolation_exponent = fit_line(lx, ly).slope;
    return report;
}

InequalityWitness verify_ode_inequality(const SimReport& report, const TestFunctionSpec& spec,
                                        double R0, const std::vector<double>& Lambda,
                                        const SystemParams& params) {
    (void)spec;
    if (report.trace.size() < 100)
        throw InsufficientData("verify_ode_inequality: needs at least 100 samples");
    const int k = params.k;
    if (static_cast<int>(Lambda.size()) != k)
        throw DomainError("verify_ode_inequality: Lambda must have k entries");
    const auto p = to_double_vector(params.p);

    InequalityWitness witness;
    const auto& tr = report.trace;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
        const double dm = tr[i].t - tr[i - 1].t;
        const double dp = tr[i + 1].t - tr[i].t;
        if (dm <= 0.0 || dp <= 0.0) continue;
        for (int j = 0; j < k; ++j) {
            const double du = -dp / (dm * (dm + dp)) * tr[i - 1].U[j] +
                              (dp - dm) / (dm * dp) * tr[i].U[j] +
                              dm / (dp * (dm + dp)) * tr[i + 1].U[j];
            const double lhs = du + Lambda[j] / (R0 * R0) * tr[i].U[j];
            const double rhs =
                std::pow(R0, -double(params.n) * (p[j] - 1.0)) *
                pow_clamped(tr[i].U[(j + 1) % k], p[j]);
            if (lhs < rhs - 1e-6 * (1.0 + std::abs(rhs))) {
                witness.ok = false;
                witness.t = tr[i].t;
                witness.component = j;
                witness.lhs = lhs;
                witness.rhs = rhs;
                return witness;
            }
        }
    }
    return witness;
}

}  // namespace lifespan
