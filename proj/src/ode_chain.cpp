#include "lifespan/ode_chain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lifespan/test_function.hpp"

namespace lifespan {

namespace {

template <class Real>
Real rat(const Rational& r);

template <>
double rat<double>(const Rational& r) {
    return to_double(r);
}

template <>
Quad rat<Quad>(const Rational& r) {
    return to_quad(r);
}

template <class Real>
bool close_rel(const Real& a, const Real& b, double tol) {
    using std::abs;
    const Real diff = abs(a - b);
    const Real scale = std::max(Real(abs(a)), Real(abs(b)));
    return diff <= Real(tol) * scale || diff == 0;
}

}  // namespace

template <class Real>
BasicChain<Real> build_chain_t(const PQSequences& pq, std::vector<Real> coeff, Real lambda_tilde) {
    using std::pow;
    const int k = pq.k();
    if (static_cast<int>(coeff.size()) != k)
        throw DomainError("chain: coefficient vector must have k entries");
    for (const auto& c : coeff)
        if (!(c > 0)) throw DomainError("chain: coefficients must be positive");
    if (lambda_tilde < 0) throw DomainError("chain: lambda_tilde must be nonnegative");

    std::vector<Real> p(k), P(k), Q(k);
    for (int i = 0; i < k; ++i) {
        p[i] = rat<Real>(pq.p_of(i));
        P[i] = rat<Real>(pq.P[i]);
        Q[i] = rat<Real>(pq.Q[i]);
    }

    BasicChain<Real> chain;
    chain.coeff = std::move(coeff);
    chain.lambda_tilde = lambda_tilde;
    chain.A.resize(k);
    chain.L.resize(k);
    chain.A[k - 1] = chain.coeff[k - 1] / P[k - 1];
    chain.L[k - 1] = lambda_tilde;
    for (int i = k - 2; i >= 0; --i) {
        chain.A[i] = chain.coeff[i] * pow(chain.A[i + 1], p[i]) / P[i];
        chain.L[i] = p[i] * chain.L[i + 1];
    }

    // Recurrences against the direct product formulas (paper indices: the
    // value at 1-based position k - j corresponds to 0-based i = k - 1 - j).
    for (int j = 1; j <= k - 1; ++j) {
        const int i = k - 1 - j;
        Real direct = chain.coeff[i] / P[i];
        for (int h = 0; h <= j - 1; ++h) {
            const int idx = k - 1 - h;
            Real expo = 1;
            for (int l = k - j; l <= k - h - 1; ++l) expo *= p[l - 1];
            direct *= pow(chain.coeff[idx] / P[idx], expo);
        }
        if (!close_rel(chain.A[i], direct, 1e-12))
            throw std::logic_error("chain: A recurrence disagrees with product formula");

        Real ldirect = lambda_tilde;
        for (int m = k - j; m <= k - 1; ++m) ldirect *= p[m - 1];
        if (!close_rel(chain.L[i], ldirect, 1e-12))
            throw std::logic_error("chain: L recurrence disagrees with product formula");
    }

    if (lambda_tilde > 0) {
        chain.composite = (P[0] - Q[0] - 1) / chain.L[0] * pow(Real(2), -p[0] * (P[1] - 1) / Q[0]) *
                          pow(P[0], 1 / Q[0]) * pow(chain.A[0], 1 / Q[0]);
    }
    return chain;
}

ChainConstants build_chain(const PQSequences& pq, std::vector<double> coeff, double lambda_tilde) {
    return build_chain_t<double>(pq, std::move(coeff), lambda_tilde);
}

template <class Real>
BasicMinorant<Real> minorant_t(const BasicChain<Real>& chain, const PQSequences& pq,
                               const std::vector<Real>& alpha, Real f2_0) {
    using std::log;
    using std::pow;
    if (pq.k() < 2 || static_cast<int>(alpha.size()) < 2)
        throw DomainError("minorant: needs k >= 2");
    if (!(f2_0 > 0)) throw DomainError("minorant: f2_0 must be positive");

    const Real a1 = alpha[0], a2 = alpha[1];
    const Real P2 = rat<Real>(pq.P[1]), Q1 = rat<Real>(pq.Q[0]), Q2 = rat<Real>(pq.Q[1]);
    const Real composite = chain.composite_or_throw();
    const Real C1 = chain.coeff[0];
    const Real A2 = chain.A[1];

    // K = C*^{-1} A_2^{1/(a1 P2)} C_1^{-Q2/(a1 P2)}; the threshold is K^{a2}.
    const Real K = pow(A2, 1 / (a1 * P2)) * pow(C1, -Q2 / (a1 * P2)) / composite;
    BasicMinorant<Real> result;
    result.threshold = pow(K, a2);
    if (!(f2_0 > result.threshold)) throw BelowThreshold(static_cast<double>(result.threshold));

    const Real inner = K * pow(f2_0, -1 / a2);  // in (0,1) above threshold
    result.rate = chain.L[0] / Q1;
    result.T0_tilde = -log(1 - inner) / result.rate;
    result.amplitude = pow(composite, -1 / a1);
    result.offset = pow(A2, -1 / P2) * pow(C1, Q2 / P2) * pow(f2_0, Q1 / P2);
    result.alpha1 = a1;
    return result;
}

MinorantResult minorant(const ChainConstants& chain, const PQSequences& pq,
                        const std::vector<double>& alpha, double f2_0) {
    return minorant_t<double>(chain, pq, alpha, f2_0);
}

template <class Real>
Real chain_prefactor_t(const PQSequences& pq, const std::vector<Real>& alpha, int n, Real lambda,
                       Real R, Real lambda_factor) {
    using std::pow;
    const int k = pq.k();
    std::vector<Real> coeff(k);
    for (int i = 0; i < k; ++i) coeff[i] = pow(R, -Real(n) * (rat<Real>(pq.p_of(i)) - 1));
    const Real lt = lambda_factor * lambda * rat<Real>(pq.P[0] - pq.Q[0] - 1) / (R * R);
    const auto chain = build_chain_t<Real>(pq, coeff, lt);
    const Real a1 = alpha[0];
    const Real P2 = rat<Real>(pq.P[1]), Q2 = rat<Real>(pq.Q[1]);
    return pow(chain.A[1], 1 / (a1 * P2)) * pow(chain.coeff[0], -Q2 / (a1 * P2)) /
           chain.composite_or_throw();
}

double chain_prefactor(const PQSequences& pq, const std::vector<double>& alpha, int n,
                       double lambda, double R, double lambda_factor) {
    return chain_prefactor_t<double>(pq, alpha, n, lambda, R, lambda_factor);
}

UpperBoundResult pde_upper_bound(const SystemParams& params, double lambda,
                                 const std::function<double(double)>& U0, int j0,
                                 double lambda_factor) {
    params.validate();
    if (!(lambda > 0)) throw DomainError("pde_upper_bound: lambda must be positive");
    if (j0 < 0 || j0 >= params.k) throw DomainError("pde_upper_bound: j0 out of range");
    const auto profile = compute_alpha(params);
    if (!(profile.alpha[j0] > Rational(params.n, 2)))
        throw NotSupercritical("pde_upper_bound: alpha_{j0} must exceed n/2");

    // Work in a relabeled system whose 0-based position 1 is the
    // distinguished component; k = 1 duplicates the single component, which
    // leaves both the dynamics and the functionals unchanged.
    SystemParams work;
    std::vector<int> orig_of;
    if (params.k == 1) {
        work.k = 2;
        work.p = {params.p[0], params.p[0]};
        work.n = params.n;
        orig_of = {0, 0};
    } else {
        work.k = params.k;
        work.n = params.n;
        work.p.resize(params.k);
        orig_of.resize(params.k);
        for (int i = 0; i < params.k; ++i) {
            orig_of[i] = (i - 1 + j0 + params.k) % params.k;
            work.p[i] = params.p[orig_of[i]];
        }
    }

    const auto pq = compute_pq(work);
    const auto alpha_w = to_double_vector(compute_alpha(work).alpha);
    const double a2 = alpha_w[1];
    const double half_n = 0.5 * params.n;

    const auto threshold_curve = [&](double R) {
        return std::pow(2.0 * chain_prefactor(pq, alpha_w, params.n, lambda, R, lambda_factor),
                        a2);
    };
    const double R0 = solve_R0(U0, profile.alpha[j0], params.n, threshold_curve);

    UpperBoundResult result;
    result.R0 = R0;
    result.j0 = j0;
    result.lambda = lambda;
    result.lambda_factor = lambda_factor;

    std::vector<double> coeff(work.k);
    for (int i = 0; i < work.k; ++i)
        coeff[i] = std::pow(R0, -double(params.n) * (to_double(work.p[i]) - 1.0));
    const double lt =
        lambda_factor * lambda * to_double(pq.P[0] - pq.Q[0] - 1) / (R0 * R0);
    const auto chain = build_chain(pq, coeff, lt);

    result.U0_at_R0 = U0(R0);
    const auto mr = minorant(chain, pq, alpha_w, result.U0_at_R0);
    result.threshold = mr.threshold;
    result.T0 = mr.T0_tilde;
    result.T0_tilde = mr.T0_tilde;
    result.quadratic_const = result.T0 / (R0 * R0);
    result.lifespan_const = result.T0 * std::pow(result.U0_at_R0, 1.0 / (a2 - half_n));

    // Scaling consistency: T0 = B R0^2 with B independent of the data, and
    // R0^2 = (2 K(1))^{a2/(a2 - n/2)} U^{-1/(a2 - n/2)}, so the lifespan
    // constant must equal B (2 K(1))^{a2/(a2 - n/2)} whatever the data was.
    {
        const double K1 = chain_prefactor(pq, alpha_w, params.n, lambda, 1.0, lambda_factor);
        double L1_at_unit = lambda_factor * lambda * to_double(pq.P[0] - pq.Q[0] - 1);
        for (int m = 0; m < work.k - 1; ++m) L1_at_unit *= to_double(work.p[m]);
        const double B = std::numbers::ln2 * to_double(pq.Q[0]) / L1_at_unit;
        const double expected = B * std::pow(2.0 * K1, a2 / (a2 - half_n));
        if (!std::isfinite(expected) ||
            std::abs(expected - result.lifespan_const) >
                1e-8 * std::max(std::abs(expected), std::abs(result.lifespan_const)))
            throw std::logic_error("pde_upper_bound: lifespan-constant identity failed");
        if (!close_rel(result.quadratic_const * R0 * R0, result.T0, 1e-12))
            throw std::logic_error("pde_upper_bound: T0 = const R0^2 identity failed");
    }

    // Exponential weights in original component order. Relabeled position
    // k-1 carries lambda_factor * lambda; earlier positions multiply by p.
    std::vector<double> lam_w(work.k);
    lam_w[work.k - 1] = lambda_factor * lambda;
    for (int i = work.k - 2; i >= 0; --i) lam_w[i] = to_double(work.p[i]) * lam_w[i + 1];
    result.Lambda.assign(params.k, 0.0);
    for (int i = 0; i < work.k; ++i)
        result.Lambda[orig_of[i]] = std::max(result.Lambda[orig_of[i]], lam_w[i]);

    if (!std::isfinite(result.T0) || !std::isfinite(result.R0))
        throw std::logic_error("pde_upper_bound: non-finite bound");
    return result;
}

template BasicChain<double> build_chain_t<double>(const PQSequences&, std::vector<double>, double);
template BasicChain<Quad> build_chain_t<Quad>(const PQSequences&, std::vector<Quad>, Quad);
template BasicMinorant<double> minorant_t<double>(const BasicChain<double>&, const PQSequences&,
                                                  const std::vector<double>&, double);
template BasicMinorant<Quad> minorant_t<Quad>(const BasicChain<Quad>&, const PQSequences&,
                                              const std::vector<Quad>&, Quad);
template double chain_prefactor_t<double>(const PQSequences&, const std::vector<double>&, int,
                                          double, double, double);
template Quad chain_prefactor_t<Quad>(const PQSequences&, const std::vector<Quad>&, int, Quad,
                                      Quad, Quad);

}  // namespace lifespan
