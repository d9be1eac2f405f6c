#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "lifespan/errors.hpp"
#include "lifespan/exponents.hpp"

namespace lifespan {

// Constant chain attached to the cyclic ODE system
//   f_j' >= C_j f_{j+1}^{p_j} (j < k),   f_k' >= C_k e^{-lt} f_1^{p_k}:
//   A_k = C_k / P_k,    A_{k-j} = C_{k-j} A_{k-j+1}^{p_{k-j}} / P_{k-j},
//   L_k = l,            L_{k-j} = p_{k-j} L_{k-j+1},
//   C* = L_1^{-1} (P_1 - Q_1 - 1) 2^{-p_1 (P_2 - 1)/Q_1} P_1^{1/Q_1} A_1^{1/Q_1}.
// Evaluation is templated on the scalar so the quad-precision oracle reuses
// the exact same formulas.
template <class Real>
struct BasicChain {
    std::vector<Real> coeff;  // C_j, all positive
    Real lambda_tilde{};
    std::vector<Real> A;
    std::vector<Real> L;
    std::optional<Real> composite;  // C* above; engaged only when lambda_tilde > 0

    Real composite_or_throw() const {
        if (!composite) throw ZeroLambda("composite constant requires lambda_tilde > 0");
        return *composite;
    }
};

using ChainConstants = BasicChain<double>;

// Explicit minorant for f_1 below the blow-up time:
//   minorant(t) = amplitude (e^{-rate t} - e^{-rate T0_tilde})^{-alpha_1} - offset.
template <class Real>
struct BasicMinorant {
    Real threshold{};  // data size the second component must strictly exceed
    Real T0_tilde{};
    Real offset{};
    Real amplitude{};
    Real rate{};
    Real alpha1{};

    Real value(Real t) const {
        using std::exp;
        using std::pow;
        const Real gap = exp(-rate * t) - exp(-rate * T0_tilde);
        return amplitude * pow(gap, -alpha1) - offset;
    }
};

using MinorantResult = BasicMinorant<double>;

template <class Real>
BasicChain<Real> build_chain_t(const PQSequences& pq, std::vector<Real> coeff, Real lambda_tilde);

ChainConstants build_chain(const PQSequences& pq, std::vector<double> coeff, double lambda_tilde);

template <class Real>
BasicMinorant<Real> minorant_t(const BasicChain<Real>& chain, const PQSequences& pq,
                               const std::vector<Real>& alpha, Real f2_0);

// Throws BelowThreshold(threshold) when f2_0 does not strictly exceed it.
MinorantResult minorant(const ChainConstants& chain, const PQSequences& pq,
                        const std::vector<double>& alpha, double f2_0);

// Scale-dependent prefactor of the instantiated chain,
//   K(R) = C*^{-1} A_2^{1/(alpha_1 P_2)} C_1^{-Q_2/(alpha_1 P_2)},
// with C_j = R^{-n(p_j - 1)} and lambda_tilde = factor * lambda * (P_1-Q_1-1) R^{-2}.
// Scales exactly as R^{-(2 alpha_2 - n)/alpha_2}.
template <class Real>
Real chain_prefactor_t(const PQSequences& pq, const std::vector<Real>& alpha, int n, Real lambda,
                       Real R, Real lambda_factor);

double chain_prefactor(const PQSequences& pq, const std::vector<double>& alpha, int n,
                       double lambda, double R, double lambda_factor = 2.0);

struct UpperBoundResult {
    double R0 = 0;
    double T0 = 0;
    std::vector<double> Lambda;  // exponential weights, original component order
    double threshold = 0;        // minorant threshold of the chain instantiated at R0
    double T0_tilde = 0;         // equals T0 by the normalization defining R0
    int j0 = 0;                  // distinguished component, original order (0-based)
    double lambda = 0;
    double lambda_factor = 2.0;
    double quadratic_const = 0;  // T0 / R0^2, depends only on (p, n, lambda)
    double lifespan_const = 0;   // T0 * U0(R0)^{1/(alpha_{j0} - n/2)}
    double U0_at_R0 = 0;
};

// Lifespan upper bound: picks R0 as the unique scale where the weighted data
// mass crosses the chain threshold curve, then reads off T0 from the
// instantiated minorant. U0 maps R to the weighted mass of component j0 at
// time zero; it must be nondecreasing, vanish at 0+, and be positive
// somewhere. k = 1 is handled by duplicating the component, which leaves the
// scalar dynamics and functionals unchanged.
UpperBoundResult pde_upper_bound(const SystemParams& params, double lambda,
                                 const std::function<double(double)>& U0, int j0,
                                 double lambda_factor = 2.0);

}  // namespace lifespan
