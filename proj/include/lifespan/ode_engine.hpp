#pragma once

#include <vector>

#include "lifespan/errors.hpp"

namespace lifespan {

// Cyclic ODE system integrated as equalities:
//   f_j' = C_j f_{j+1}^{p_j} (j < k),   f_k' = C_k e^{-lambda_tilde t} f_1^{p_k}.
// k = 1 degenerates to f' = C e^{-lambda_tilde t} f^p.
struct OdeSystemSpec {
    std::vector<double> p;      // size k, each >= 1
    std::vector<double> coeff;  // size k, positive
    double lambda_tilde = 0.0;
    std::vector<double> initial;  // size k, nonnegative

    int k() const { return static_cast<int>(p.size()); }
    void validate() const;
    void rhs(double t, const std::vector<double>& f, std::vector<double>& out) const;
};

struct BlowupEstimate {
    bool blew_up = false;
    double T_num = 0.0;    // extrapolated blow-up time when blew_up
    double horizon = 0.0;  // "global up to" marker otherwise
    double t_low = 0.0;    // escape time: the solution is finite here
    double t_high = 0.0;   // soft upper edge of the estimate bracket
    double extrapolation_exponent = 0.0;  // fitted log f_1 vs log(T-t) slope
    double achieved_max = 0.0;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> f;  // f[i] has k entries at time t[i]
};

struct IntegrateResult {
    Trajectory trajectory;
    BlowupEstimate blowup;
};

// Escape threshold past which a component counts as blown up; the remaining
// gap to the singularity is recovered by power-law extrapolation.
inline constexpr double kOdeEscapeThreshold = 1e12;

// Embedded Dormand-Prince 5(4) with step rejection. Declares blow-up when a
// component exceeds kOdeEscapeThreshold, refines the crossing by bisecting
// the last step, and extrapolates T_num by fitting f_1 ~ c (T - t)^{-alpha_1}
// over the final decade of f_1 growth. rel_tol must lie in (1e-12, 1e-2).
IntegrateResult integrate(const OdeSystemSpec& spec, double horizon, double rel_tol);

struct ComparisonWitness {
    bool ordered = true;  // strict ordering held at every accepted step
    double t = 0.0;
    int component = -1;
    double f_value = 0.0;
    double g_value = 0.0;
};

// Integrates both systems in lockstep (shared step sequence) and checks the
// strict ordering f_j(t) > g_j(t) at every accepted step in (0, horizon).
// Preconditions: identical (k, p, lambda_tilde), f-coefficients >= g's,
// f(0) >= g(0) with strict inequality somewhere.
ComparisonWitness comparison_check(const OdeSystemSpec& spec_f, const OdeSystemSpec& spec_g,
                                   double horizon);

// Per-component fitted slopes of log f_j against log(T_num - t) over each
// component's final decade of growth; expected to approximate -alpha_j.
// Throws InsufficientData with fewer than 20 points in a fit window.
std::vector<double> rate_probe(const IntegrateResult& run);

}  // namespace lifespan
