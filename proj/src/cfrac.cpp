#include "rmgeom/cfrac.hpp"

#include "rmgeom/errors.hpp"

#include <map>
#include <utility>

namespace rmgeom {

namespace {

long required_bits(const mpz_class& q) {
    return 2 * static_cast<long>(mpz_sizeinbase(q.get_mpz_t(), 2)) + kCfGuardBits;
}

void push_term(CFExpansion& cf, const mpz_class& a) {
    // p_{-1} = 1, q_{-1} = 0, p_0 = 0, q_0 = 1
    const std::size_t n = cf.p.size();
    mpz_class pm1 = n >= 1 ? cf.p[n - 1] : mpz_class(0);
    mpz_class qm1 = n >= 1 ? cf.q[n - 1] : mpz_class(1);
    mpz_class pm2 = n >= 2 ? cf.p[n - 2] : (n == 1 ? mpz_class(0) : mpz_class(1));
    mpz_class qm2 = n >= 2 ? cf.q[n - 2] : (n == 1 ? mpz_class(1) : mpz_class(0));
    cf.partial_quotients.push_back(a);
    cf.p.push_back(a * pm1 + pm2);
    cf.q.push_back(a * qm1 + qm2);
}

CFExpansion expand_real(const Real& x, std::size_t n, bool strict) {
    if (x.sign() <= 0 || mpfr_cmp_ui(x.raw(), 1) > 0)
        throw DomainError("cf_expand: x must lie in (0,1]; reduce to the fractional part first");
    CFExpansion cf;
    cf.precision_bits = x.precision();
    Real y = x;
    while (cf.partial_quotients.size() < n) {
        Real r = y.reciprocal();
        mpz_class a = r.floor_int();
        // next denominator, checked against the guard-digit rule before accepting
        const std::size_t k = cf.q.size();
        mpz_class qm1 = k >= 1 ? cf.q[k - 1] : mpz_class(1);
        mpz_class qm2 = k >= 2 ? cf.q[k - 2] : (k == 1 ? mpz_class(1) : mpz_class(0));
        mpz_class qn = a * qm1 + qm2;
        if (required_bits(qn) > x.precision()) {
            if (strict)
                throw PrecisionExhausted("cf_expand: " + std::to_string(x.precision()) +
                                         " bits cannot certify term " + std::to_string(k + 1) +
                                         " (needs " + std::to_string(required_bits(qn)) + ")");
            cf.precision_limited = true;
            break;
        }
        push_term(cf, a);
        y = std::move(r);
        y.sub_int(a);
        if (y.is_zero()) {
            cf.terminated = true;
            break;
        }
    }
    return cf;
}

}  // namespace

CFExpansion cf_expand(const Real& x, std::size_t n) { return expand_real(x, n, true); }

CFExpansion cf_expand_certified(const Real& x, std::size_t max_terms) {
    return expand_real(x, max_terms, false);
}

CFExpansion cf_expand(const mpq_class& x) {
    if (sgn(x) <= 0 || x > 1) throw DomainError("cf_expand: x must lie in (0,1]");
    CFExpansion cf;
    mpz_class num = x.get_num(), den = x.get_den();
    // x = num/den; 1/x = den/num
    while (sgn(num) != 0) {
        mpz_class a, r;
        mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), den.get_mpz_t(), num.get_mpz_t());
        push_term(cf, a);
        den = num;
        num = r;
    }
    cf.terminated = true;
    return cf;
}

QuadraticCF quadratic_cf(const FieldElement& theta) {
    mpq_class x = theta.sqrt_x(), y = theta.sqrt_y();
    if (sgn(y) == 0) throw DomainError("quadratic_cf: theta is rational");
    mpz_class w;
    mpz_lcm(w.get_mpz_t(), x.get_den_mpz_t(), y.get_den_mpz_t());
    mpz_class u = x.get_num() * (w / x.get_den());
    mpz_class v = y.get_num() * (w / y.get_den());
    // theta = (P + sqrt M)/Q with Q | M - P^2
    mpz_class M = v * v * theta.field().d;
    mpz_class P = sgn(v) > 0 ? u : mpz_class(-u);
    mpz_class Q = sgn(v) > 0 ? w : mpz_class(-w);
    if ((M - P * P) % Q != 0) {
        mpz_class aq = abs(Q);
        P *= aq;
        M *= Q * Q;
        Q *= aq;
    }
    const mpz_class rM = isqrt(M);
    std::map<std::pair<mpz_class, mpz_class>, std::size_t> seen;
    std::vector<mpz_class> quotients;
    for (;;) {
        auto key = std::make_pair(P, Q);
        auto it = seen.find(key);
        if (it != seen.end()) {
            QuadraticCF out;
            out.preperiod.assign(quotients.begin(), quotients.begin() + static_cast<long>(it->second));
            out.period.assign(quotients.begin() + static_cast<long>(it->second), quotients.end());
            return out;
        }
        seen.emplace(key, quotients.size());
        mpz_class a, num = P + rM;
        if (sgn(Q) > 0) {
            mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
        } else {
            mpz_class aq = -Q;
            mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), aq.get_mpz_t());
            a = -a - 1;
        }
        quotients.push_back(a);
        mpz_class P2 = a * Q - P;
        mpz_class Q2 = (M - P2 * P2) / Q;
        P = P2;
        Q = Q2;
    }
}

std::vector<mpz_class> unroll(const QuadraticCF& cf, std::size_t n) {
    std::vector<mpz_class> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < cf.preperiod.size()) {
            out.push_back(cf.preperiod[i]);
        } else {
            out.push_back(cf.period[(i - cf.preperiod.size()) % cf.period.size()]);
        }
    }
    return out;
}

}  // namespace rmgeom
