#pragma once

#include <cstddef>
#include <vector>

#include "lifespan/errors.hpp"
#include "lifespan/exponents.hpp"
#include "lifespan/field_state.hpp"
#include "lifespan/ode_engine.hpp"
#include "lifespan/test_function.hpp"

namespace lifespan {

// Radial initial data profiles. Amplitudes are per component (one entry
// broadcasts to all k).
struct InitialData {
    enum class Shape { Gaussian, Bump, Constant };
    Shape shape = Shape::Gaussian;
    std::vector<double> amplitude = {1.0};
    double width = 1.0;
    double center = 0.0;

    double eval(int j, double r) const;
    double amplitude_of(int j) const;
    // Radius past which the profile is numerically zero; +inf for Constant.
    double support_radius() const;
    InitialData scaled(double factor) const;
};

struct SimConfig {
    double sup_threshold = 1e8;  // blow-up declaration level for sup norms
    double trace_radius = 1.0;   // R used for the weighted functionals
    int nodes_per_unit = 512;
    double r_dom = 0.0;  // 0 = auto: max(8, 4 * data support radius)
    BoundaryKind boundary = BoundaryKind::Dirichlet;
    bool couple = true;        // false turns the nonlinearity off
    bool auto_extend = true;   // grow the domain when mass nears the edge
    double dt_init = 1e-6;
    double dt_safety = 0.02;      // explicit-part CFL fraction
    double dt_cap0 = 0.01;        // dt ceiling at t = 0 ...
    double dt_cap_growth = 0.02;  // ... growing linearly in t
    std::vector<double> l_vector;          // decay weights for M(t); empty = pick by case
    std::vector<double> snapshot_times;    // states captured for offline checks
    std::size_t max_trace = std::size_t(1) << 17;
    std::size_t max_nodes = std::size_t(1) << 22;
};

struct TraceSample {
    double t = 0.0;
    std::vector<double> U;    // weighted functionals at trace_radius
    std::vector<double> sup;  // per-component sup norms
    std::vector<double> l1;   // per-component L1 norms
    double M_run = 0.0;       // running sup of the weighted norm
};

struct SimReport {
    BlowupEstimate blowup;
    std::vector<TraceSample> trace;
    std::vector<double> decay_exponent;  // per component, global runs only
    std::vector<FieldState> snapshots;
    double trace_radius = 1.0;
    double horizon = 0.0;
    std::vector<double> l_vector;
};

FieldState make_initial_state(const InitialData& data, const SystemParams& params,
                              const SimConfig& cfg);

// One IMEX step: explicit nonlinearity, implicit radial diffusion
// (finite-volume Laplacian, tridiagonal solve per component). Preserves
// nonnegativity for nonnegative input at any dt > 0.
FieldState step(const FieldState& state, const SystemParams& params, double dt);

// Adaptive time stepping to blow-up or horizon, tracing the functionals at
// cfg.trace_radius. Global runs fit sup-norm decay exponents on the second
// half of the horizon.
SimReport run(const InitialData& u0, const SystemParams& params, const TestFunctionSpec& spec,
              double horizon, const SimConfig& cfg);

struct InequalityWitness {
    bool ok = true;
    double t = 0.0;
    int component = -1;
    double lhs = 0.0;
    double rhs = 0.0;
};

// Differentiates the traced functionals and checks, at every interior sample,
//   U_j' + Lambda_j R0^{-2} U_j >= R0^{-n(p_j - 1)} U_{j+1}^{p_j} - delta,
// with slack delta = 1e-6 (1 + |rhs|). Throws InsufficientData below 100
// samples; returns the first violation otherwise.
InequalityWitness verify_ode_inequality(const SimReport& report, const TestFunctionSpec& spec,
                                        double R0, const std::vector<double>& Lambda,
                                        const SystemParams& params);

}  // namespace lifespan
