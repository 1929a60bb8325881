#include <doctest.h>

#include "rmgeom/cfrac.hpp"
#include "rmgeom/errors.hpp"

#include <chrono>
#include <cmath>

using namespace rmgeom;

namespace {

Real inv_golden(long prec) {
    auto F = make_field(5);
    return Real::from_field(FieldElement::omega(F) - FieldElement::from_integer(F, 1), prec);  // 1/phi = phi - 1
}

Real frac_part(const FieldElement& t, long prec) {
    mpz_class fl = t.floor_first();
    return Real::from_field(t - FieldElement(t.field(), mpq_class(fl), 0), prec);
}

void check_convergent_identities(const CFExpansion& cf) {
    for (std::size_t n = 0; n < cf.q.size(); ++n) {
        if (n > 0) CHECK(cf.q[n] > cf.q[n - 1]);
        mpz_class pm1 = n ? cf.p[n - 1] : mpz_class(0), qm1 = n ? cf.q[n - 1] : mpz_class(1);
        // n counts from 1 in the expansion, so the sign is (-1)^(n-1) with n = index + 1
        mpz_class det = cf.p[n] * qm1 - pm1 * cf.q[n];
        CHECK(det == (n % 2 == 0 ? 1 : -1));
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), cf.q[n].get_mpz_t(), qm1.get_mpz_t());
        CHECK(g == 1);
    }
}

}  // namespace

TEST_CASE("cf_expand examples") {
    auto g = cf_expand(inv_golden(256), 50);
    CHECK(g.partial_quotients.size() == 50);
    for (auto& a : g.partial_quotients) CHECK(a == 1);
    check_convergent_identities(g);

    auto F2 = make_field(2);
    auto s = cf_expand(Real::from_field(FieldElement(F2, -1, 1), 256), 40);
    for (auto& a : s.partial_quotients) CHECK(a == 2);
    check_convergent_identities(s);

    auto r = cf_expand(mpq_class(2, 5));
    CHECK(r.terminated);
    REQUIRE(r.partial_quotients.size() == 2);
    CHECK(r.partial_quotients[0] == 2);
    CHECK(r.partial_quotients[1] == 2);
    CHECK(r.p.back() == 2);
    CHECK(r.q.back() == 5);

    auto half = cf_expand(Real::from_double(0.5, 128), 10);
    CHECK(half.terminated);
    CHECK(half.partial_quotients.size() == 1);

    auto one = cf_expand(Real::from_double(1.0, 128), 10);
    CHECK(one.terminated);
    CHECK(one.partial_quotients.size() == 1);

    CHECK_THROWS_AS(cf_expand(Real::from_double(1.5, 128), 3), DomainError);
    CHECK_THROWS_AS(cf_expand(Real::from_double(0.0, 128), 3), DomainError);
    CHECK_THROWS_AS(cf_expand(mpq_class(3, 2)), DomainError);
}

TEST_CASE("guard-digit rule") {
    // q_n of 1/phi grows like phi^n: 128 bits certify roughly (128-64)/(2*0.694) terms
    CHECK_THROWS_AS(cf_expand(inv_golden(128), 60), PrecisionExhausted);
    auto c = cf_expand_certified(inv_golden(128));
    CHECK(c.precision_limited);
    CHECK(!c.terminated);
    long bits = 2 * static_cast<long>(mpz_sizeinbase(c.q.back().get_mpz_t(), 2)) + kCfGuardBits;
    CHECK(bits <= 128);
    for (auto& a : c.partial_quotients) CHECK(a == 1);
    CHECK_NOTHROW(cf_expand(inv_golden(128), c.q.size()));
}

TEST_CASE("approximation bound |x - p/q| < 1/(q_n q_{n+1})") {
    auto F = make_field(7);
    for (const FieldElement& t : {FieldElement(F, 0, 1), FieldElement(F, mpq_class(1, 3), mpq_class(2, 5))}) {
        Real x = frac_part(t, 512);
        auto cf = cf_expand(x, 60);
        check_convergent_identities(cf);
        for (std::size_t n = 0; n + 1 < cf.q.size(); ++n) {
            Real conv = Real::from_rational(mpq_class(cf.p[n], cf.q[n]), 512);
            Real diff = x;
            diff -= conv;
            mpfr_abs(diff.raw(), diff.raw(), MPFR_RNDN);
            Real bound = Real::from_rational(mpq_class(mpz_class(1), cf.q[n] * cf.q[n + 1]), 512);
            CHECK(mpfr_less_p(diff.raw(), bound.raw()));
        }
    }
}

TEST_CASE("quadratic_cf") {
    auto F2 = make_field(2), F5 = make_field(5);
    auto s2 = quadratic_cf(FieldElement(F2, 0, 1));
    REQUIRE(s2.preperiod.size() == 1);
    CHECK(s2.preperiod[0] == 1);
    REQUIRE(s2.period.size() == 1);
    CHECK(s2.period[0] == 2);

    auto g = quadratic_cf(FieldElement::omega(F5));
    CHECK(g.preperiod.empty());
    REQUIRE(g.period.size() == 1);
    CHECK(g.period[0] == 1);

    CHECK_THROWS_AS(quadratic_cf(FieldElement(F5, mpq_class(3, 7), 0)), DomainError);

    // sqrt 3 = [1; 1, 2], sqrt 7 = [2; 1, 1, 1, 4]
    auto s3 = quadratic_cf(FieldElement(make_field(3), 0, 1));
    CHECK(s3.period.size() == 2);
    auto s7 = quadratic_cf(FieldElement(make_field(7), 0, 1));
    CHECK(s7.period.size() == 4);
    CHECK(s7.period.back() == 4);
}

TEST_CASE("quadratic_cf re-expanded matches the floating expansion for 50 terms") {
    for (long d : {2L, 3L, 5L, 7L, 13L, 19L, 46L, 94L}) {
        auto F = make_field(d);
        for (const FieldElement& t :
             {FieldElement(F, 0, 1), FieldElement(F, mpq_class(-3, 7), mpq_class(5, 3)),
              FieldElement(F, mpq_class(11, 2), mpq_class(-1, 4))}) {
            auto exact = unroll(quadratic_cf(t), 51);
            CHECK(exact[0] == t.floor_first());
            auto fl = cf_expand(frac_part(t, 4096), 50);
            for (std::size_t i = 0; i < 50; ++i) CHECK_MESSAGE(fl.partial_quotients[i] == exact[i + 1], "d=" << d << " i=" << i);
        }
    }
}

TEST_CASE("levy_transform") {
    Real x = inv_golden(256);
    auto z = levy_transform(zero_function(), x, 20);
    CHECK(z.value == std::complex<double>(0));

    auto f = q_power(3);
    double prev_tail = 1e300;
    for (std::size_t N : {5u, 10u, 20u, 40u}) {
        auto ls = levy_transform(f, x, N);
        // denominators of 1/phi are Fibonacci numbers F(2), F(3), ...
        double oracle = 0, a = 1, b = 1;
        for (std::size_t n = 1; n <= N; ++n) {
            oracle += 1.0 / (b * b * b);
            double c = a + b;
            a = b;
            b = c;
        }
        CHECK(std::fabs(ls.value.real() - oracle) < 1e-15);
        CHECK(ls.tail_bound < prev_tail);
        prev_tail = ls.tail_bound;
        // tail bound really bounds the remaining terms
        auto far = levy_transform(f, x, 80);
        CHECK(std::fabs(far.value.real() - ls.value.real()) <= ls.tail_bound);
    }
    CHECK(q_power(3).bound_ratio(60) <= 1.0);
    CHECK(q2_qp1().bound_ratio(60) <= 1.0);
}

TEST_CASE("integral of l(f) counts each pair q > q' through two cylinders") {
    for (const auto& f : {q_power(3), q2_qp1()}) {
        double prev = 1e300;
        LevyLemmaResult r;
        for (int level = 0; level < 3; ++level) {
            QuadratureConfig cfg;
            cfg.nodes = level == 0 ? 500 : level == 1 ? 5000 : 50000;
            cfg.rhs_qmax = level == 0 ? 30 : level == 1 ? 300 : 3000;
            cfg.farey_order = 16;
            r = levy_lemma_check(f, cfg);
            CHECK(r.cylinder_gap < prev);
            prev = r.cylinder_gap;
        }
        CHECK(r.cylinder_gap < 1e-3);
        // the single-count sum misses exactly the strict part once more
        double strict = std::abs(r.rhs_cylinder - r.rhs);
        CHECK(std::fabs(r.gap - strict) <= r.cylinder_gap + 1e-12);
        CHECK(r.gap > 0.02);
    }
    QuadratureConfig small;
    small.nodes = 200;
    small.rhs_qmax = 10;
    auto z = levy_lemma_check(zero_function(), small);
    CHECK(z.lhs == std::complex<double>(0));
    CHECK(z.rhs == std::complex<double>(0));
}

TEST_CASE("cylinder count for f = q^-3 against an exact enumeration") {
    // sum over all cylinders of depth n with q_n <= 400 of f(q_n, q_{n-1}) * |cylinder|,
    // |cylinder| = 1/(q_n (q_n + q_{n-1})), enumerated by walking partial quotients
    double total = 0;
    const std::uint64_t Q = 400;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> stack{{1, 0}};  // (q_n, q_{n-1})
    while (!stack.empty()) {
        auto [q, qm] = stack.back();
        stack.pop_back();
        for (std::uint64_t a = 1;; ++a) {
            std::uint64_t qn = a * q + qm;
            if (qn > Q) break;
            double dq = static_cast<double>(qn);
            total += 1.0 / (dq * dq * dq) / (dq * (dq + static_cast<double>(q)));
            stack.emplace_back(qn, q);
        }
    }
    auto rhs = levy_rhs(q_power(3), Q);
    CHECK(std::fabs(total - (2.0 * rhs.strict + rhs.diagonal).real()) < 1e-12);
    CHECK(std::fabs(total - rhs.value.real()) > 0.02);
}
