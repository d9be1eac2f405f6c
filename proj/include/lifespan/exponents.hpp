#pragma once

#include <vector>

#include "lifespan/rational.hpp"

namespace lifespan {

// Parameters of the weakly coupled system: k components on R^n, component j
// driven by |u_{j+1}|^{p_j} with cyclic indexing (u_{k+1} = u_1).
// All indices in code are 0-based; printed output uses 1-based labels.
struct SystemParams {
    int k = 1;
    std::vector<Rational> p;  // size k, each >= 1, not all equal to 1
    int n = 1;

    // Throws DomainError / SingularSystem on invalid parameters.
    void validate() const;

    const Rational& p_cyc(int j) const { return p[((j % k) + k) % k]; }
};

enum class Criticality { Subcritical, Critical, Supercritical };

const char* to_string(Criticality c);

// Exponent vector alpha solving (P - I) alpha = 1 together with the derived
// classification and the decay-exponent vectors used by the a-priori bound.
struct ExponentProfile {
    int k = 1;
    int n = 1;
    std::vector<Rational> alpha;
    Rational alpha_max;
    int argmax_index = 0;  // smallest index attaining the max
    Criticality criticality = Criticality::Subcritical;
    Rational case1_eps;             // epsilon with (1+eps) alpha_max < n/2 (Subcritical)
    std::vector<Rational> l_case1;  // (1+eps) alpha, filled when Subcritical
    std::vector<Rational> l_case2;  // alpha - (alpha_max - n/2), filled when Supercritical
};

// Recursive weight sequences of the concatenation argument:
//   P_k = p_k + 1, Q_k = 1,
//   P_{k-j} = p_{k-j} P_{k-j+1} + 1, Q_{k-j} = p_{k-j} Q_{k-j+1} + 1.
struct PQSequences {
    std::vector<Rational> P;
    std::vector<Rational> Q;

    int k() const { return static_cast<int>(P.size()); }
    // p is recoverable exactly: p_j = (P_j - 1)/P_{j+1} for j < k, p_k = P_k - 1.
    Rational p_of(int j) const;
};

// Closed-form alpha, cross-checked internally against the exact linear solve
// of (P - I) alpha = 1. Throws SingularSystem when all p_j = 1.
ExponentProfile compute_alpha(const SystemParams& params);
ExponentProfile compute_alpha(const SystemParams& params, const Rational& case1_eps);

// Same exponents in floating point, for real-valued p (simulation side).
std::vector<double> compute_alpha_real(const std::vector<double>& p);

// P/Q via the recurrences; the defining-sum and product identities are
// asserted exactly before returning. Requires k >= 2 (DomainError otherwise).
PQSequences compute_pq(const SystemParams& params);

// Checks p_{j-1} alpha_j - 1 = alpha_{j-1} cyclically, exact arithmetic.
std::vector<bool> blowup_rate_identity(const SystemParams& params);

// Predicted log-log slope of lifespan against data size:
// -1/(alpha_max - n/2). Throws NotSupercritical when alpha_max <= n/2.
Rational lifespan_exponent(const ExponentProfile& profile);

}  // namespace lifespan
