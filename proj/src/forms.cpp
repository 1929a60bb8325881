#include "rmgeom/forms.hpp"

#include "rmgeom/errors.hpp"

#include <algorithm>
#include <set>

namespace rmgeom {

bool QuadraticFormZ::primitive() const {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g == 1;
}

bool operator<(const QuadraticFormZ& x, const QuadraticFormZ& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    return x.c < y.c;
}

void validate_form(const QuadraticFormZ& Q) {
    mpz_class D = Q.disc();
    if (sgn(D) <= 0) throw DomainError("quadratic form: discriminant must be positive, got " + D.get_str());
    if (is_square(D)) throw DomainError("quadratic form: discriminant " + D.get_str() + " is a square");
}

bool is_reduced(const QuadraticFormZ& Q) {
    mpz_class r = isqrt(Q.disc());
    mpz_class twoa = 2 * abs(Q.a);
    // 0 < b < sqrt D and sqrt D - b < 2|a| < sqrt D + b, D non-square
    return sgn(Q.b) > 0 && Q.b <= r && twoa + Q.b > r && twoa <= r + Q.b;
}

QuadraticFormZ act(const QuadraticFormZ& Q, const Mat2& g) {
    const mpz_class &p = g[0][0], &q = g[0][1], &r = g[1][0], &s = g[1][1];
    QuadraticFormZ R;
    R.a = Q.a * p * p + Q.b * p * r + Q.c * r * r;
    R.b = 2 * Q.a * p * q + Q.b * (p * s + q * r) + 2 * Q.c * r * s;
    R.c = Q.a * q * q + Q.b * q * s + Q.c * s * s;
    return R;
}

QuadraticFormZ rho(const QuadraticFormZ& Q, Mat2* g) {
    mpz_class D = Q.disc();
    mpz_class r = isqrt(D);
    if (sgn(Q.c) == 0) throw InvariantViolation("rho: c = 0 on a non-square discriminant");
    mpz_class m = 2 * abs(Q.c);
    // b' = -b mod m in [lo, lo + m)
    mpz_class lo = abs(Q.c) > r ? mpz_class(-abs(Q.c) + 1) : mpz_class(r - m + 1);
    mpz_class t = -Q.b - lo, k;
    mpz_fdiv_r(k.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t());
    mpz_class bp = lo + k;
    QuadraticFormZ R{Q.c, bp, (bp * bp - D) / (4 * Q.c)};
    if (g) {
        (*g)[0][0] = 0;
        (*g)[0][1] = -1;
        (*g)[1][0] = 1;
        (*g)[1][1] = (Q.b + bp) / (2 * Q.c);
    }
    return R;
}

QuadraticFormZ reduce_form(const QuadraticFormZ& Q) {
    validate_form(Q);
    QuadraticFormZ R = Q;
    // |a| + |c| decreases until reduced; a generous cap catches bugs
    for (long it = 0; it < 1000000; ++it) {
        if (is_reduced(R)) return R;
        R = rho(R);
    }
    throw InvariantViolation("reduce_form: no reduced form reached");
}

std::vector<QuadraticFormZ> reduced_cycle(const QuadraticFormZ& Q) {
    QuadraticFormZ start = reduce_form(Q);
    std::vector<QuadraticFormZ> cyc{start};
    QuadraticFormZ R = rho(start);
    while (!(R == start)) {
        if (!is_reduced(R)) throw InvariantViolation("reduced_cycle: rho left the reduced set");
        cyc.push_back(R);
        R = rho(R);
    }
    return cyc;
}

std::vector<QuadraticFormZ> reduced_forms(const mpz_class& D) {
    if (sgn(D) <= 0 || is_square(D)) throw DomainError("reduced_forms: bad discriminant " + D.get_str());
    mpz_class dm4 = D % 4;
    if (dm4 != 0 && dm4 != 1) throw DomainError("reduced_forms: discriminant must be 0 or 1 mod 4");
    std::vector<QuadraticFormZ> out;
    mpz_class r = isqrt(D);
    for (mpz_class b = (D % 2 == 0) ? 2 : 1; b <= r; b += 2) {
        mpz_class ac = (b * b - D) / 4;  // negative
        mpz_class amin = (r - b + 2) / 2, amax = (r + b) / 2;
        for (mpz_class a = amin; a <= amax; ++a) {
            if (sgn(a) == 0 || ac % a != 0) continue;
            for (int s : {1, -1}) {
                QuadraticFormZ Q{s * a, b, ac / (s * a)};
                if (is_reduced(Q)) out.push_back(Q);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<QuadraticFormZ>> primitive_cycles(const mpz_class& D) {
    std::vector<std::vector<QuadraticFormZ>> cycles;
    std::set<QuadraticFormZ> seen;
    for (const auto& Q : reduced_forms(D)) {
        if (!Q.primitive() || seen.count(Q)) continue;
        auto cyc = reduced_cycle(Q);
        for (const auto& R : cyc) seen.insert(R);
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

long narrow_class_number(const mpz_class& D) {
    return static_cast<long>(primitive_cycles(D).size());
}

}  // namespace rmgeom
