#pragma once

#include "rmgeom/field.hpp"
#include "rmgeom/real.hpp"

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace rmgeom {

// x = [0; a1, a2, ...] with convergents p_n/q_n, n = 1..size.
struct CFExpansion {
    std::vector<mpz_class> partial_quotients;
    std::vector<mpz_class> p, q;
    bool terminated = false;        // x is rational and the expansion is complete
    bool precision_limited = false;  // stopped because the guard-digit rule forbids more terms
    long precision_bits = 0;         // 0 for exact input
};

// Expand x in (0,1] to n terms.  Enforces prec >= 2 log2(q_n) + 64 and throws
// PrecisionExhausted when the precision cannot certify n terms.
CFExpansion cf_expand(const Real& x, std::size_t n);

// As many terms as the precision certifies (at most max_terms).
CFExpansion cf_expand_certified(const Real& x, std::size_t max_terms = 1 << 20);

// Exact expansion of a rational in (0,1].
CFExpansion cf_expand(const mpq_class& x);

// Guard bits demanded on top of 2 log2(q).
constexpr long kCfGuardBits = 64;

struct QuadraticCF {
    std::vector<mpz_class> preperiod;  // starts with the integer part a0
    std::vector<mpz_class> period;
};

// Exact eventually periodic expansion [a0; a1, ...] of a quadratic irrational.
QuadraticCF quadratic_cf(const FieldElement& theta);

// First n partial quotients (a0 first) generated from a QuadraticCF.
std::vector<mpz_class> unroll(const QuadraticCF& cf, std::size_t n);

// f(q, q', s) on coprime q >= q' >= 1 with the caller's claim |f| <= C q^-eps.
struct BoundaryFunction {
    std::function<std::complex<double>(std::uint64_t q, std::uint64_t qp, std::complex<double> s)> f;
    double decay_exponent = 1.0;
    double constant = 1.0;

    std::complex<double> operator()(std::uint64_t q, std::uint64_t qp, std::complex<double> s = {}) const {
        return f(q, qp, s);
    }
    // Spot-check the declared bound on coprime pairs with q <= qmax. Returns the
    // worst ratio |f|/(C q^-eps).
    double bound_ratio(std::uint64_t qmax, std::complex<double> s = {}) const;
};

BoundaryFunction zero_function();
BoundaryFunction q_power(double e);              // q^-e
BoundaryFunction q2_qp1();                       // 1/(q^2 q')
BoundaryFunction q_power_param();                // q^-s, decay declared at Re s

struct LevySum {
    std::complex<double> value;
    double tail_bound = 0;
    std::size_t terms = 0;
};

// sum_{n=1}^{N} f(q_n, q_{n-1}) with q_0 = 1; tail bounded by
// C q_N^-eps / (1 - phi^-eps) since q_{N+k} >= phi^(k-1) q_N.
LevySum levy_transform(const BoundaryFunction& f, const CFExpansion& cf, std::size_t N,
                       std::complex<double> s = {});
LevySum levy_transform(const BoundaryFunction& f, const Real& x, std::size_t N,
                       std::complex<double> s = {});

struct QuadratureConfig {
    std::size_t nodes = 100000;  // total sample points over (a, b]
    int farey_order = 32;        // strata = Farey intervals of this order
    long precision_bits = 128;   // per-sample expansion precision
    std::uint64_t rhs_qmax = 10000;
};

struct LevyIntegral {
    std::complex<double> value;
    double error_estimate = 0;  // |Q(nodes) - Q(nodes/2)| + expansion tail
    std::size_t strata = 0;
    std::size_t nodes = 0;
};

// Integral of l(f)(x, s) over (lo, hi] with lo, hi rational in [0, 1],
// stratified over Farey intervals, shifted-midpoint nodes placed at
// irrational offsets so no sample is rational.
LevyIntegral levy_integral(const BoundaryFunction& f, const mpq_class& lo, const mpq_class& hi,
                           const QuadratureConfig& cfg, std::complex<double> s = {});

struct LevyRhs {
    std::complex<double> value;     // sum over coprime q >= q' >= 1, each pair once
    std::complex<double> strict;    // the q > q' part of `value`
    std::complex<double> diagonal;  // the (1,1) term f(1,1)/2
    double tail_bound = 0;
};

// sum over coprime q >= q' >= 1, q <= qmax, of f(q,q')/(q(q+q')).
LevyRhs levy_rhs(const BoundaryFunction& f, std::uint64_t qmax, std::complex<double> s = {});

struct LevyLemmaResult {
    std::complex<double> lhs, rhs;
    double gap = 0;
    double lhs_error = 0, rhs_tail = 0;
    // Each pair q > q' is reached by two cylinders (the reversed expansion of
    // q/q' may end in 1 or not), so the integral of l(f) over (0,1] equals
    // 2*strict + diagonal rather than rhs.  Reported alongside, not substituted.
    std::complex<double> rhs_cylinder;
    double cylinder_gap = 0;
};

LevyLemmaResult levy_lemma_check(const BoundaryFunction& f, const QuadratureConfig& cfg);

}  // namespace rmgeom
