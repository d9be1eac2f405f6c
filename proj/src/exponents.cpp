#include "lifespan/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lifespan {

namespace {

// Exact dense solve of M x = rhs by Gaussian elimination over the rationals.
// k <= 8 in practice, so no pivoting strategy beyond nonzero selection.
std::vector<Rational> solve_rational(std::vector<std::vector<Rational>> m,
                                     std::vector<Rational> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (m[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw SingularSystem("exponent matrix P - I is singular");
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col || m[r][col] == 0) continue;
            const Rational factor = m[r][col] / m[col][col];
            for (int c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
            rhs[r] -= factor * rhs[col];
        }
    }
    std::vector<Rational> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
    return x;
}

}  // namespace

void SystemParams::validate() const {
    if (k < 1) throw DomainError("k must be >= 1");
    if (static_cast<int>(p.size()) != k) throw DomainError("p must have k entries");
    if (n < 1) throw DomainError("n must be >= 1");
    bool all_one = true;
    for (const auto& pj : p) {
        if (pj < 1) throw DomainError("every p_j must be >= 1");
        if (pj != 1) all_one = false;
    }
    if (all_one) throw SingularSystem("p = (1,...,1) is excluded");
}

const char* to_string(Criticality c) {
    switch (c) {
        case Criticality::Subcritical: return "subcritical";
        case Criticality::Critical: return "critical";
        case Criticality::Supercritical: return "supercritical";
    }
    return "?";
}

Rational PQSequences::p_of(int j) const {
    const int kk = k();
    if (j < 0 || j >= kk) throw DomainError("p_of: index out of range");
    if (j == kk - 1) return P[j] - 1;
    return (P[j] - 1) / P[j + 1];
}

ExponentProfile compute_alpha(const SystemParams& params) {
    // Negative sentinel selects the default Case-1 margin: half the
    // multiplicative slack below criticality, clamped to 1.
    return compute_alpha(params, Rational(-1));
}

ExponentProfile compute_alpha(const SystemParams& params, const Rational& case1_eps) {
    params.validate();
    const int k = params.k;

    Rational prod_all = 1;
    for (const auto& pj : params.p) prod_all *= pj;
    const Rational denom = prod_all - 1;
    if (denom == 0) throw SingularSystem("p = (1,...,1) is excluded");

    ExponentProfile profile;
    profile.k = k;
    profile.n = params.n;
    profile.alpha.resize(k);
    for (int j = 0; j < k; ++j) {
        Rational num = 1;
        Rational run = 1;
        for (int h = 0; h <= k - 2; ++h) {
            run *= params.p[(j + h) % k];
            num += run;
        }
        profile.alpha[j] = num / denom;
    }

    // Cross-check against the exact linear solve of (P - I) alpha = 1.
    {
        std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k, Rational(0)));
        std::vector<Rational> rhs(k, Rational(1));
        for (int j = 0; j < k; ++j) {
            m[j][j] = -1;
            m[j][(j + 1) % k] += params.p[j];
        }
        const auto solved = solve_rational(std::move(m), std::move(rhs));
        for (int j = 0; j < k; ++j)
            if (solved[j] != profile.alpha[j])
                throw std::logic_error("closed-form alpha disagrees with (P-I) alpha = 1");
    }

    profile.alpha_max = profile.alpha[0];
    profile.argmax_index = 0;
    for (int j = 1; j < k; ++j)
        if (profile.alpha[j] > profile.alpha_max) {
            profile.alpha_max = profile.alpha[j];
            profile.argmax_index = j;
        }

    const Rational half_n(params.n, 2);
    if (profile.alpha_max < half_n)
        profile.criticality = Criticality::Subcritical;
    else if (profile.alpha_max == half_n)
        profile.criticality = Criticality::Critical;
    else
        profile.criticality = Criticality::Supercritical;

    if (profile.criticality == Criticality::Subcritical) {
        Rational eps = case1_eps;
        if (eps < 0) {
            eps = (half_n / profile.alpha_max - 1) / 2;
            if (eps > 1) eps = 1;
        }
        if ((1 + eps) * profile.alpha_max >= half_n)
            throw DomainError("case-1 epsilon too large: (1+eps) alpha_max must stay below n/2");
        profile.case1_eps = eps;
        profile.l_case1.resize(k);
        for (int j = 0; j < k; ++j) profile.l_case1[j] = (1 + eps) * profile.alpha[j];
    } else if (profile.criticality == Criticality::Supercritical) {
        const Rational shift = profile.alpha_max - half_n;
        profile.l_case2.resize(k);
        for (int j = 0; j < k; ++j) profile.l_case2[j] = profile.alpha[j] - shift;
    }
    return profile;
}

std::vector<double> compute_alpha_real(const std::vector<double>& p) {
    const int k = static_cast<int>(p.size());
    if (k < 1) throw DomainError("k must be >= 1");
    double prod_all = 1;
    for (double pj : p) {
        if (pj < 1.0) throw DomainError("every p_j must be >= 1");
        prod_all *= pj;
    }
    if (prod_all - 1.0 < 1e-14) throw SingularSystem("p = (1,...,1) is excluded");
    std::vector<double> alpha(k);
    for (int j = 0; j < k; ++j) {
        double num = 1, run = 1;
        for (int h = 0; h <= k - 2; ++h) {
            run *= p[(j + h) % k];
            num += run;
        }
        alpha[j] = num / (prod_all - 1.0);
    }
    return alpha;
}

PQSequences compute_pq(const SystemParams& params) {
    params.validate();
    const int k = params.k;
    if (k < 2) throw DomainError("P/Q sequences are defined for k >= 2");

    PQSequences pq;
    pq.P.resize(k);
    pq.Q.resize(k);
    pq.P[k - 1] = params.p[k - 1] + 1;
    pq.Q[k - 1] = 1;
    for (int i = k - 2; i >= 0; --i) {
        pq.P[i] = params.p[i] * pq.P[i + 1] + 1;
        pq.Q[i] = params.p[i] * pq.Q[i + 1] + 1;
    }

    // Defining sums, recomputed directly.
    for (int a = 0; a < k; ++a) {
        Rational sp = 1, sq = 1, run = 1;
        for (int h = 0; h <= k - 1 - a; ++h) {
            run *= params.p[a + h];
            sp += run;
            if (h <= k - 2 - a) sq += run;
        }
        if (sp != pq.P[a] || sq != pq.Q[a])
            throw std::logic_error("P/Q recurrences disagree with their defining sums");
    }

    // Product identity P_i - Q_i = p_i p_{i+1} ... p_k.
    for (int a = 0; a < k; ++a) {
        Rational prod = 1;
        for (int m = a; m < k; ++m) prod *= params.p[m];
        if (pq.P[a] - pq.Q[a] != prod)
            throw std::logic_error("product identity P - Q failed");
    }

    // alpha_1 = Q_1/(P_1 - Q_1 - 1), alpha_2 = P_2/(P_1 - Q_1 - 1).
    {
        const auto profile = compute_alpha(params);
        const Rational d = pq.P[0] - pq.Q[0] - 1;
        if (profile.alpha[0] != pq.Q[0] / d || profile.alpha[1] != pq.P[1] / d)
            throw std::logic_error("alpha identity against P/Q failed");
    }
    return pq;
}

std::vector<bool> blowup_rate_identity(const SystemParams& params) {
    params.validate();
    const auto profile = compute_alpha(params);
    const int k = params.k;
    std::vector<bool> ok(k);
    for (int j = 0; j < k; ++j) {
        const int prev = (j - 1 + k) % k;
        ok[j] = (params.p[prev] * profile.alpha[j] - 1 == profile.alpha[prev]);
    }
    return ok;
}

Rational lifespan_exponent(const ExponentProfile& profile) {
    const Rational half_n(profile.n, 2);
    if (profile.criticality != Criticality::Supercritical)
        throw NotSupercritical("lifespan exponent requires alpha_max > n/2");
    return Rational(-1) / (profile.alpha_max - half_n);
}

}  // namespace lifespan
